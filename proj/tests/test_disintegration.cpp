#include "doctest.h"

#include <cmath>
#include <numbers>

#include "hfol/disintegration.hpp"
#include "hfol/errors.hpp"

using namespace hfol;

namespace {

const double kappa = 1.0 / (8.0 * std::numbers::pi);

Foliation perturbed_shear(int n, double delta = 0.01)
{
    MollifyParams mp;
    mp.r = 0.001;
    Foliation f3 = interpolate_identity(mollify(shear(kappa), mp), interpolation_params(0.01, 4.0));
    return dyadic_perturb(f3, PerturbationParams{delta, delta, n, IntervalQ::make(1, 4, 1, 2)},
                          HolderClass{4.0, 0.5, 0.25});
}

} // namespace

TEST_CASE("identity strips")
{
    IntervalQ I = IntervalQ::make(1, 4, 1, 2);
    for (int n : {0, 3, 10})
        for (std::uint64_t i : {std::uint64_t{0}, (std::uint64_t{1} << n) - 1}) {
            CHECK(std::abs(strip_measure(identity(), n, i) - std::ldexp(1.0, -n)) <= 1e-10);
            CHECK(strip_measure_in(identity(), n, i, I) == doctest::Approx(std::ldexp(0.25, -n)).epsilon(1e-12));
        }
    CHECK_THROWS_AS(strip_measure(identity(), 3, 8), InputError);
}

TEST_CASE("partition of unity and refinement consistency")
{
    for (const Foliation& f : {shear(kappa), warp(0.5), perturbed_shear(6)}) {
        for (int n : {1, 4, 7}) {
            double sum = 0.0;
            for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i)
                sum += strip_measure(f, n, i);
            CHECK(std::abs(sum - 1.0) <= std::ldexp(1e-10, n));
        }
        for (std::uint64_t i : {0, 5, 31}) {
            double parent = strip_measure(f, 5, i);
            double kids = strip_measure(f, 6, 2 * i) + strip_measure(f, 6, 2 * i + 1);
            CHECK(std::abs(parent - kids) <= 1e-10 * std::ldexp(1.0, -5));
        }
    }
}

TEST_CASE("strip measures are monotone in the x interval")
{
    Foliation f = perturbed_shear(6);
    double small = strip_measure_in(f, 6, 9, IntervalQ::make(1, 3, 1, 2));
    double big = strip_measure_in(f, 6, 9, IntervalQ::make(1, 4, 1, 2));
    CHECK(small <= big);
    CHECK(strip_measure_in(f, 6, 9, IntervalQ::make(0, 1, 1, 1)) == strip_measure(f, 6, 9));
}

TEST_CASE("strips below the central curves compress in the flat profile region")
{
    Foliation f = perturbed_shear(8);
    LipschitzEstimates le = estimate_lipschitz(as_dyadic(f)->inner());
    double a = 0.01, b = 0.25 - 0.01;
    for (std::uint64_t i : {0, 40, 200}) {
        double m = strip_measure_window(f, 8, i, a, b) / (b - a);
        CHECK(m <= 2 * le.L * 0.01 * std::ldexp(1.0, -8));
    }
}

TEST_CASE("membership in A and B")
{
    MembershipOptions opt;
    CHECK_FALSE(membership_A(identity(), 4, 10, IntervalQ::make(1, 4, 1, 2), opt).pass);
    MembershipReport ok = membership_A(identity(), 4, 10, IntervalQ::make(0, 1, 1, 20), opt);
    CHECK(ok.pass);
    CHECK(ok.table.size() == 16);
    CHECK(ok.table[3].ratio == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(membership_B(identity(), 10, IntervalQ::make(0, 1, 1, 20), 6) == 1);
    CHECK_FALSE(membership_B(identity(), 10, IntervalQ::make(1, 4, 1, 2), 6).has_value());
    CHECK_THROWS_AS(membership_B(identity(), 10, IntervalQ::make(1, 4, 1, 2), 25), ParameterError);

    Foliation f = perturbed_shear(8);
    MembershipReport rep = membership_A(f, 8, 10, IntervalQ::make(1, 4, 1, 2), opt);
    CHECK(rep.pass);
    CHECK(rep.method == "enumerated");

    // Above the enumeration limit the closed-form envelope covers every strip.
    MembershipOptions small = opt;
    small.enumerate_limit = 4;
    MembershipReport loose = membership_A(f, 8, 10, IntervalQ::make(1, 4, 1, 2), small);
    CHECK(loose.clearance <= rep.clearance + 1e-12);
    Foliation tight = perturbed_shear(8, 0.002);
    MembershipReport env = membership_A(tight, 8, 10, IntervalQ::make(1, 4, 1, 2), small);
    CHECK(env.method == "envelope");
    CHECK(env.exhaustive);
    CHECK(env.pass);
    CHECK(env.clearance <= membership_A(tight, 8, 10, IntervalQ::make(1, 4, 1, 2), opt).clearance + 1e-12);
    MembershipReport sampled = membership_A(shear(kappa), 9, 10, IntervalQ::make(1, 4, 1, 2), small);
    CHECK(sampled.method == "sampled");
    CHECK_FALSE(sampled.exhaustive);
}

TEST_CASE("membership at level 58")
{
    IntervalQ I = IntervalQ::make(1, 4, 1, 2);
    Foliation ft = dyadic_perturb(identity(), PerturbationParams{0.002, 0.002, 58, I}, HolderClass{4.0, 0.5, 0.25});
    MembershipOptions opt;
    opt.samples = 16;
    MembershipReport rep = membership_A(ft, 58, 10, I, opt);
    CHECK(rep.pass);
    CHECK(rep.envelope->q == 1.0);
    for (const StripRow& r : rep.table)
        CHECK((r.index % 2 == 0 ? r.ratio > 0.9 : r.ratio < 0.1));
}

TEST_CASE("ratio sequences")
{
    IntervalQ I = IntervalQ::make(1, 4, 1, 2);
    RatioSequence rs = ratio_sequence(identity(), 1.0 / 3.0, I, 1, 20);
    for (const RatioEntry& e : rs.entries)
        CHECK(std::abs(e.ratio - 0.25) <= 1e-9);
    // Leaves on dyadic lines belong to the strip above.
    CHECK(ratio_sequence(identity(), 0.5, I, 1, 1).entries[0].index == 1);
    CHECK_THROWS_AS(ratio_sequence(identity(), 0.0, I, 1, 3), InputError);

    // Each entry is the measure-weighted mix of its two children.
    Foliation f = perturbed_shear(6);
    double y = 0.3141;
    RatioSequence s = ratio_sequence(f, y, I, 3, 9);
    for (std::size_t k = 0; k + 1 < s.entries.size(); ++k) {
        const RatioEntry& e = s.entries[k];
        int n = e.n + 1;
        double m0 = strip_measure(f, n, 2 * e.index), m1 = strip_measure(f, n, 2 * e.index + 1);
        double r0 = strip_measure_in(f, n, 2 * e.index, I) / m0, r1 = strip_measure_in(f, n, 2 * e.index + 1, I) / m1;
        CHECK(e.ratio == doctest::Approx((m0 * r0 + m1 * r1) / (m0 + m1)).epsilon(1e-9));
    }
}

TEST_CASE("atom localisation")
{
    AtomReport id = atom_locate(identity(), 0.4, 10, 8);
    CHECK_FALSE(id.atomic);
    for (std::size_t k = 0; k < id.steps.size(); ++k) {
        CHECK(id.steps[k].mass == doctest::Approx(std::ldexp(1.0, -static_cast<int>(k) - 1)).epsilon(1e-9));
        CHECK(id.steps[k].tie);
    }
    CHECK(id.x_P == doctest::Approx(std::ldexp(1.0, -9)));
    Foliation f = perturbed_shear(6);
    AtomReport p = atom_locate(f, 0.37, 6, 6);
    CHECK(p.atom_y == f.eval(p.x_P, 0.37));
    for (std::size_t k = 1; k < p.steps.size(); ++k)
        CHECK(p.steps[k].mass <= p.steps[k - 1].mass);
}

TEST_CASE("absolute continuity diagnostics")
{
    std::vector<double> xs;
    for (int i = 0; i <= 16; ++i)
        xs.push_back(i / 16.0);
    ACReport id = ac_report(identity(), xs, std::ldexp(1.0, -10));
    CHECK(id.global_ratio == 1.0);
    ACReport sh = ac_report(shear(kappa), xs, std::ldexp(1.0, -10));
    CHECK(sh.global_min >= 0.75);
    CHECK(sh.global_max <= 1.25);
    CHECK(sh.global_ratio <= 5.0 / 3.0);
    ACReport pt = ac_report(perturbed_shear(8), xs, std::ldexp(1.0, -8));
    CHECK(pt.global_ratio >= 0.99 / 0.01);
}
