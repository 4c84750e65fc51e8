// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hfol/disintegration.hpp"
#include "hfol/holder_metric.hpp"
#include "hfol/pipeline.hpp"
#include "hfol/smoothing.hpp"

using namespace hfol;

namespace {

const double kappa = 1.0 / (8.0 * std::numbers::pi);
const HolderClass hc_quarter{4.0, 0.5, 0.25};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Foliation mollified_shear()
{
    MollifyParams mp;
    mp.r = 0.001;
    return interpolate_identity(mollify(shear(kappa), mp), interpolation_params(0.01, 4.0));
}

Foliation perturbed_shear(int n, double delta)
{
    return dyadic_perturb(mollified_shear(), PerturbationParams{delta, delta, n, IntervalQ::make(1, 4, 1, 2)},
                          hc_quarter);
}

// Criterion 1 result, shared with 2 and 5.
PipelineResult& identity_run()
{
    static PipelineResult r = construct_in_B(identity(), hc_quarter, 0.5, 10, IntervalQ::make(1, 4, 1, 2));
    return r;
}

Outcome criterion1()
{
    auto t0 = std::chrono::steady_clock::now();
    const Certificate& c = identity_run().cert;
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double third = c.xi / 3.0;
    bool stages = c.d_f_f2.total.value < third && c.d_f2_f3.total.value < third && c.d_f3_ft.total.value < third;
    bool ok = c.pass() && stages && c.membership.pass && c.membership.exhaustive && secs < 120.0;
    return {ok, fmt("n=%d method=%s clearance=%.4g stages=(%.3g, %.3g, %.3g) < %.4g, %zu rows, %.1fs",
                    c.perturbation.n, c.membership.method.c_str(), c.membership.clearance,
                    c.d_f_f2.total.value, c.d_f2_f3.total.value, c.d_f3_ft.total.value, third, c.rows.size(), secs)};
}

Outcome criterion2()
{
    std::string detail;
    bool ok = true;
    PipelineResult sheared = construct_in_B(shear(kappa), hc_quarter, 0.5, 10, IntervalQ::make(1, 4, 1, 2));
    for (const PipelineResult* r : {&identity_run(), &sheared}) {
        const Certificate& c = r->cert;
        int n = c.perturbation.n;
        SampleScheme s;
        s.extra_levels = {n - 1, n, n + 1};
        HolderClass h3 = hc_quarter;
        h3.C = c.interpolation.C_eps;
        BiHolderCertificate b2 = certify_bi_holder(r->f2, hc_quarter, s);
        BiHolderCertificate b3 = certify_bi_holder(r->f3, h3, s);
        BiHolderCertificate bt = certify_bi_holder(r->ft, hc_quarter, s);
        bool strict = h3.C < hc_quarter.C;
        ok = ok && b2.pass && b3.pass && bt.pass && strict;
        detail += fmt("[n=%d f2 %.3g/%.3g f3 %.3g/%.3g at C_eps=%.9g ft %.3g/%.3g] ", n, b2.upper, b2.lower,
                      b3.upper, b3.lower, h3.C, bt.upper, bt.lower);
    }
    return {ok, detail + "(upper/lower constants, declared C=4)"};
}

Outcome criterion3()
{
    std::vector<std::pair<const char*, Foliation>> fixtures{
        {"identity", identity()},  {"shear", shear(kappa)},         {"warp", warp(0.5)},
        {"mollified", mollified_shear()}, {"perturbed", perturbed_shear(8, 0.01)}};
    double worst_sum = 0.0, worst_refine = 0.0, worst_id = 0.0, worst_ratio = 0.0;
    bool ok = true;
    for (auto& [name, f] : fixtures) {
        std::vector<double> parent{1.0};
        for (int n = 1; n <= 10; ++n) {
            std::vector<double> row(std::size_t{1} << n);
            double sum = 0.0;
            for (std::uint64_t i = 0; i < row.size(); ++i)
                sum += row[i] = strip_measure(f, n, i);
            double tol = std::ldexp(1e-10, n);
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0) / tol);
            for (std::size_t i = 0; i < parent.size(); ++i)
                worst_refine = std::max(worst_refine, std::abs(parent[i] - row[2 * i] - row[2 * i + 1]) / tol);
            parent = std::move(row);
        }
    }
    ok = worst_sum <= 1.0 && worst_refine <= 1.0;
    for (int n = 1; n <= 10; ++n)
        for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) {
            worst_id = std::max(worst_id, std::abs(strip_measure(identity(), n, i) - std::ldexp(1.0, -n)));
            for (const IntervalQ& I : {IntervalQ::make(1, 4, 1, 2), IntervalQ::make(1, 3, 5, 7)}) {
                double ratio = strip_measure_in(identity(), n, i, I) / strip_measure(identity(), n, i);
                worst_ratio = std::max(worst_ratio, std::abs(ratio - I.length()));
            }
        }
    ok = ok && worst_id <= 1e-10 && worst_ratio <= 1e-9;
    return {ok, fmt("sum error %.3g, refinement error %.3g (in units of 2^n*1e-10); identity strip %.3g; identity ratio %.3g",
                    worst_sum, worst_refine, worst_id, worst_ratio)};
}

// Cell-center count on an nx x ny lattice: a cell belongs to strip i when its
// center lies between the two bounding leaves of its column.
std::vector<double> lattice_oracle(const Foliation& f, int n, int nx, int ny)
{
    std::vector<double> area(std::size_t{1} << n, 0.0);
    std::vector<double> leaves(area.size() + 1);
    for (int c = 0; c < nx; ++c) {
        double x = (c + 0.5) / nx;
        for (std::size_t i = 0; i < leaves.size(); ++i)
            leaves[i] = f.eval(x, std::ldexp(static_cast<double>(i), -n));
        // centers (k + 1/2)/ny below v: ceil(v*ny - 1/2)
        auto below = [&](double v) { return std::clamp(std::ceil(v * ny - 0.5), 0.0, static_cast<double>(ny)); };
        for (std::size_t i = 0; i < area.size(); ++i)
            area[i] += below(leaves[i + 1]) - below(leaves[i]);
    }
    for (double& a : area)
        a /= static_cast<double>(nx) * ny;
    return area;
}

Outcome criterion4()
{
    const int nx = 2048, ny = 16384;
    std::vector<std::pair<const char*, Foliation>> fixtures{
        {"shear", shear(kappa)}, {"warp", warp(0.5)}, {"perturbed", perturbed_shear(6, 0.01)}};
    double worst = 0.0;
    std::string where;
    for (auto& [name, f] : fixtures)
        for (int n = 1; n <= 6; ++n) {
            std::vector<double> oracle = lattice_oracle(f, n, nx, ny);
            for (std::uint64_t i = 0; i < oracle.size(); ++i) {
                double e = std::abs(strip_measure(f, n, i) - oracle[i]);
                if (e > worst) {
                    worst = e;
                    where = fmt("%s n=%d i=%llu", name, n, static_cast<unsigned long long>(i));
                }
            }
        }
    return {worst <= 1e-5, fmt("%d cells, worst |strip - oracle| = %.3g at %s (limit 1e-5)", nx * ny, worst,
                               where.c_str())};
}

Outcome criterion5()
{
    const PipelineResult& r = identity_run();
    const IntervalQ I = r.cert.I;
    int witness = r.cert.perturbation.n;
    double lo = 1.0 / r.cert.m, hi = 1.0 - lo;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int inside = 0;
    double closest = 1.0;
    for (int k = 0; k < 16; ++k) {
        RatioSequence seq = ratio_sequence(r.ft, u(rng), I, witness, 62);
        for (const RatioEntry& e : seq.entries) {
            double gap = std::min(std::abs(e.ratio - lo), std::abs(e.ratio - hi));
            closest = std::min(closest, gap);
            inside += e.ratio >= lo && e.ratio <= hi;
        }
    }
    double id_dev = 0.0;
    for (int k = 0; k < 16; ++k)
        for (const RatioEntry& e : ratio_sequence(identity(), u(rng), I, 1, 62).entries)
            id_dev = std::max(id_dev, std::abs(e.ratio - I.length()));
    bool ok = inside == 0 && id_dev <= 1e-9;
    return {ok, fmt("16 leaves, levels %d..62: %d ratios inside [%.2g, %.2g], closest distance %.4g; identity deviation %.3g",
                    witness, inside, lo, hi, closest, id_dev)};
}

Outcome criterion6()
{
    auto t0 = std::chrono::steady_clock::now();
    HolderClass hc{4.0, 0.5, 0.0};
    std::vector<ScheduleItem> schedule;
    for (IntervalQ I : {IntervalQ::make(0, 1, 1, 2), IntervalQ::make(1, 4, 3, 4), IntervalQ::make(1, 2, 1, 1),
                        IntervalQ::make(1, 8, 3, 8)})
        schedule.push_back({8, I});
    ResidualOptions ro;
    ro.mollifier_nodes = {64, 4};
    ro.pipeline.scheme.random_pairs = 2000;
    ro.on_step = [&](int k, const Certificate& c) {
        double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("  step %d: n=%d certificate %s (%.0fs)\n", k, c.perturbation.n, c.pass() ? "pass" : "FAIL", t);
        std::fflush(stdout);
    };
    ResidualResult r = residual_iterate(identity(), schedule, 0.5, hc, ro);
    if (!r.completed)
        return {false, "residual iteration stopped: " + r.failure};
    bool certified = true;
    for (const Certificate& c : r.certificates)
        certified = certified && c.pass() && c.membership.pass;
    CauchyTable ct = cauchy_probe(r.iterates, hc, ro.pipeline.scheme, 0.5, true);
    std::string dist;
    for (std::size_t k = 0; k + 1 < r.iterates.size(); ++k)
        dist += fmt("%.3g<%.3g ", ct.distance[k][k + 1], ct.budget[k]);

    const Foliation& last = r.iterates.back();
    int level = r.certificates.back().perturbation.n;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double min_mass = 1.0, id_dev = 0.0;
    for (int k = 0; k < 8; ++k) {
        double y = u(rng);
        min_mass = std::min(min_mass, atom_locate(last, y, level, 8).steps.back().mass);
        id_dev = std::max(id_dev, std::abs(atom_locate(identity(), y, level, 8).steps.back().mass - 1.0 / 256));
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = certified && ct.pass && min_mass > 0.9 && id_dev <= 1e-3 && secs < 900.0;
    return {ok, fmt("certified=%s cauchy=%s [%s] min window mass %.4g (need > 0.9), identity |mass - 2^-8| %.3g, %.0fs",
                    certified ? "yes" : "no", ct.pass ? "pass" : "FAIL", dist.c_str(), min_mass, id_dev, secs)};
}

Outcome criterion7()
{
    std::vector<double> xs;
    for (int i = 0; i <= 32; ++i)
        xs.push_back(i / 32.0);
    const int n = 10;
    const double delta2 = 1.0 / 60.0;
    ACReport sh = ac_report(shear(kappa), xs, std::ldexp(1.0, -n));
    ACReport pt = ac_report(perturbed_shear(n, delta2), xs, std::ldexp(1.0, -n));
    double need = (1.0 - delta2) / delta2;
    bool ok = sh.global_ratio <= 2.0 && pt.global_ratio >= need && need >= 50.0;
    return {ok, fmt("scale 2^-%d: shear ratio %.4g (<= 2), perturbed (delta2=1/60) ratio %.4g (>= %.4g)", n,
                    sh.global_ratio, pt.global_ratio, need)};
}

Outcome criterion8()
{
    std::vector<Foliation> pool{identity(), shear(kappa), shear(-kappa / 2), warp(0.5), warp(-0.3),
                                mollified_shear(), perturbed_shear(6, 0.01)};
    SampleScheme s;
    s.x_intervals = 8;
    s.ladder_k = 12;
    s.anchors = 16;
    s.random_pairs = 500;
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    // Distances are cached per unordered pair; symmetry is checked on both orders.
    std::map<std::pair<std::size_t, std::size_t>, DistanceEstimate> cache;
    auto d = [&](std::size_t a, std::size_t b) -> const DistanceEstimate& {
        auto key = std::make_pair(a, b);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, d_alpha(pool[a], pool[b], hc_quarter, s)).first;
        return it->second;
    };
    bool symmetric = true, zero = true, triangle = true, monotone = true;
    double worst_excess = 0.0;
    for (int t = 0; t < 50; ++t) {
        std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
        const DistanceEstimate& ab = d(a, b);
        symmetric = symmetric && ab.total.value == d(b, a).total.value;
        zero = zero && d(a, a).total.value == 0.0;
        const DistanceEstimate& bc = d(b, c);
        const DistanceEstimate& ac = d(a, c);
        // refinement tolerance: the largest change a doubling produces on the three sides
        double tol = 0.0;
        for (const DistanceEstimate* e : {&ab, &bc, &ac}) {
            tol = std::max(tol, std::abs(e->total.refined_value - e->total.value));
            monotone = monotone && e->total.refinement_monotone && e->total.refined_value >= e->total.value;
        }
        double excess = ac.total.value - ab.total.value - bc.total.value;
        worst_excess = std::max(worst_excess, excess);
        triangle = triangle && excess <= 2.0 * tol;
    }
    bool ok = symmetric && zero && triangle && monotone;
    return {ok, fmt("50 triples over %zu fixtures: symmetric=%d zero=%d triangle=%d (worst excess %.3g) monotone=%d",
                    pool.size(), symmetric, zero, triangle, worst_excess, monotone)};
}

} // namespace

int main()
{
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7, criterion8};
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %zu: %s  %s  [%.1fs]\n", k + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
