// Serial reference kernels against the OpenMP sweeps on the same workloads.

#include <benchmark/benchmark.h>

#include <numbers>

#include "hfol/disintegration.hpp"
#include "hfol/holder_metric.hpp"
#include "hfol/smoothing.hpp"

using namespace hfol;

namespace {

const HolderClass hc{4.0, 0.5, 0.25};

Foliation fixture()
{
    MollifyParams mp;
    mp.r = 0.001;
    Foliation f3 = interpolate_identity(mollify(shear(1.0 / (8.0 * std::numbers::pi)), mp),
                                        interpolation_params(0.01, 4.0));
    return dyadic_perturb(f3, PerturbationParams{0.01, 0.01, 10, IntervalQ::make(1, 4, 1, 2)}, hc);
}

EvalSettings with(Exec ex)
{
    EvalSettings s;
    s.exec = ex;
    return s;
}

void membership_table(benchmark::State& state)
{
    Foliation f = fixture();
    MembershipOptions opt;
    opt.settings = with(static_cast<Exec>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(membership_A(f, 10, 10, IntervalQ::make(1, 4, 1, 2), opt).clearance);
}

void bi_holder(benchmark::State& state)
{
    Foliation f = fixture();
    SampleScheme s;
    s.random_pairs = 4000;
    EvalSettings es = with(static_cast<Exec>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(certify_bi_holder(f, hc, s, 1e-2, es).upper);
}

void distance(benchmark::State& state)
{
    Foliation f = fixture();
    SampleScheme s;
    s.random_pairs = 1000;
    MetricOptions mo;
    mo.refine = false;
    mo.settings = with(static_cast<Exec>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(d_alpha(shear(0.02), f, hc, s, mo).total.value);
}

} // namespace

// Argument 0 is the serial reference, 1 the OpenMP kernel.
BENCHMARK(membership_table)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(bi_holder)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(distance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
