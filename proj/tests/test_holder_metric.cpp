#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "hfol/holder_metric.hpp"

using namespace hfol;

namespace {

const double kappa = 1.0 / (8.0 * std::numbers::pi);

SampleScheme small_scheme()
{
    SampleScheme s;
    s.x_intervals = 8;
    s.ladder_k = 12;
    s.anchors = 16;
    s.random_pairs = 2000;
    return s;
}

// Independent brute-force maximum of kappa*x*sin(2 pi y) on a fine grid.
double shear_c0_oracle()
{
    double best = 0.0;
    for (int i = 0; i <= 400; ++i)
        for (int j = 0; j <= 400; ++j)
            best = std::max(best, std::abs(kappa * (i / 400.0) * std::sin(2 * std::numbers::pi * j / 400.0)));
    return best;
}

} // namespace

TEST_CASE("c0 distance")
{
    SampleScheme s = small_scheme();
    CHECK(c0_distance(shear(kappa), shear(kappa), s).value == 0.0);
    NormEstimate e = c0_distance(identity(), shear(kappa), s);
    CHECK(e.value == doctest::Approx(shear_c0_oracle()).epsilon(1e-12));
    CHECK(e.value == doctest::Approx(0.039788735772973836).epsilon(1e-12));
    CHECK(e.refinement_monotone);
    CHECK(e.refined_value >= e.value);
}

TEST_CASE("holder seminorm of one-variable maps")
{
    SampleScheme s = small_scheme();
    CHECK(holder_seminorm([](double) { return 0.0; }, 0.3, s).value == 0.0);
    CHECK(holder_seminorm([](double y) { return y; }, 0.5, s).value == doctest::Approx(1.0));
    CHECK(holder_seminorm([](double y) { return y * y; }, 0.0, s).value == doctest::Approx(1.0));
}

TEST_CASE("d_alpha axioms on builtins")
{
    SampleScheme s = small_scheme();
    HolderClass hc{4.0, 0.5, 0.25};
    std::vector<Foliation> fs{identity(), shear(kappa), shear(-0.5 * kappa), warp(0.4), warp(-0.3)};
    for (auto& f : fs)
        CHECK(d_alpha(f, f, hc, s).total.value == 0.0);
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = i + 1; j < fs.size(); ++j) {
            double a = d_alpha(fs[i], fs[j], hc, s, {false}).total.value;
            double b = d_alpha(fs[j], fs[i], hc, s, {false}).total.value;
            CHECK(a == b);
            CHECK(a > 0.0);
        }
    DistanceEstimate fg = d_alpha(fs[0], fs[1], hc, s);
    DistanceEstimate gh = d_alpha(fs[1], fs[3], hc, s);
    DistanceEstimate fh = d_alpha(fs[0], fs[3], hc, s);
    CHECK(fh.total.value <= fg.total.value + gh.total.value + 1e-9);
    CHECK(fg.total.refinement_monotone);
    CHECK(fg.c0 == doctest::Approx(kappa));
    CHECK(fg.c0_dx == doctest::Approx(kappa));
}

TEST_CASE("serial and parallel sweeps agree bit for bit")
{
    SampleScheme s = small_scheme();
    HolderClass hc{4.0, 0.5, 0.25};
    MetricOptions par{false, {}};
    MetricOptions ser{false, {}};
    ser.settings.exec = Exec::serial;
    DistanceEstimate a = d_alpha(shear(kappa), warp(0.4), hc, s, par);
    DistanceEstimate b = d_alpha(shear(kappa), warp(0.4), hc, s, ser);
    CHECK(a.total.value == b.total.value);
    CHECK(a.holonomy_inverse == b.holonomy_inverse);
}

TEST_CASE("bi-Holder certificates")
{
    SampleScheme s = small_scheme();
    HolderClass hc{1.5, 0.5, 0.25};
    BiHolderCertificate id = certify_bi_holder(identity(), hc, s);
    CHECK(id.pass);
    CHECK(id.upper <= 1.0);
    BiHolderCertificate sh = certify_bi_holder(shear(kappa), HolderClass{4.0 / 3.0, 0.5, 0.25}, s);
    CHECK(sh.pass);
    // Passing at beta also passes at any smaller beta.
    CHECK(certify_bi_holder(shear(kappa), HolderClass{4.0 / 3.0, 0.3, 0.1}, s).pass);

    // A flat spot: f(1,.) constant on [1/8, 1/8 + 2^-6], aligned with a ladder anchor.
    int nx = 4, ny = 64;
    std::vector<double> v;
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j)
            v.push_back(static_cast<double>(j) / ny);
    v[static_cast<std::size_t>(nx) * (ny + 1) + 9] = v[static_cast<std::size_t>(nx) * (ny + 1) + 8];
    Foliation flat = grid_sampled(nx, ny, v, hc);
    BiHolderCertificate bad = certify_bi_holder(flat, hc, s);
    CHECK_FALSE(bad.pass);
    CHECK(std::isinf(bad.lower));
    CHECK(bad.worst_lower.x == 1.0);
}

TEST_CASE("cauchy probe")
{
    SampleScheme s = small_scheme();
    HolderClass hc{4.0, 0.5, 0.25};
    CauchyTable same = cauchy_probe({shear(kappa), shear(kappa), shear(kappa)}, hc, s, 0.5);
    CHECK(same.pass);
    CHECK(same.successive[0] == 0.0);
    CauchyTable alt = cauchy_probe({identity(), shear(kappa), identity(), shear(kappa)}, hc, s, 0.1);
    CHECK_FALSE(alt.pass);
    CHECK(alt.distance[0][2] == 0.0);
}
