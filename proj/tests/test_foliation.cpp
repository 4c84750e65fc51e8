#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "hfol/errors.hpp"
#include "hfol/foliation.hpp"

using namespace hfol;

namespace {
const double kappa = 1.0 / (8.0 * std::numbers::pi);
}

TEST_CASE("identity evaluates to its leaf parameter")
{
    Foliation id = identity();
    CHECK(id.eval(0.7, 0.3) == 0.3);
    CHECK(id.eval_dx(0.2, 0.9) == 0.0);
    CHECK(invert_y(id, 0.5, 0.42) == doctest::Approx(0.42).epsilon(1e-12));
}

TEST_CASE("shear closed form")
{
    Foliation s = shear(kappa);
    // 0.25 + 1/(8 pi), computed independently.
    CHECK(s.eval(1.0, 0.25) == doctest::Approx(0.2897887357729738).epsilon(1e-15));
    CHECK(s.eval_dx(0.5, 0.25) == doctest::Approx(0.039788735772973836).epsilon(1e-15));
    CHECK(invert_y(s, 1.0, 0.5) == 0.5);
    CHECK(invert_y(s, 1.0, 0.2897887357729738) == doctest::Approx(0.25).epsilon(1e-11));
    CHECK_THROWS_AS(shear(1.0), ParameterError);
}

TEST_CASE("builtin rejects unknown names and bad ranges")
{
    CHECK_THROWS_AS(builtin("spiral"), InputError);
    CHECK_THROWS_AS(warp(1.2), ParameterError);
    CHECK_THROWS_AS(identity().eval(1.5, 0.2), InputError);
    CHECK_THROWS_AS(invert_y(identity(), 0.5, 1.5), InputError);
}

TEST_CASE("boundary pins on a 64x64 sample")
{
    for (const Foliation& f : {identity(), shear(kappa), warp(0.6), warp(-0.4)}) {
        double worst = 0.0;
        for (int i = 0; i < 64; ++i) {
            double t = i / 63.0;
            worst = std::max(worst, std::abs(f.eval(0.0, t) - t));
            worst = std::max(worst, std::abs(f.eval(t, 0.0)));
            worst = std::max(worst, std::abs(f.eval(t, 1.0) - 1.0));
        }
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("round trip, monotonicity and derivative consistency")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    EvalSettings es;
    for (const Foliation& f : {shear(kappa), warp(0.6)}) {
        double worst_rt = 0.0, worst_dx = 0.0;
        bool monotone = true;
        for (int k = 0; k < 1000; ++k) {
            double x = u(rng), y = u(rng), y2 = u(rng);
            worst_rt = std::max(worst_rt, std::abs(invert_y(f, x, f.eval(x, y), es) - y));
            if (y > y2)
                std::swap(y, y2);
            if (y < y2 && !(f.eval(x, y) < f.eval(x, y2)))
                monotone = false;
            double h = 1e-4;
            double xc = std::clamp(x, h, 1.0 - h);
            double fd = (f.eval(xc + h, y) - f.eval(xc - h, y)) / (2 * h);
            worst_dx = std::max(worst_dx, std::abs(fd - f.eval_dx(xc, y)));
        }
        CHECK(worst_rt <= 10 * es.root_tol);
        CHECK(monotone);
        CHECK(worst_dx <= 1e-4);
    }
}

TEST_CASE("increments agree with differences and resolve tiny cells")
{
    Foliation s = shear(kappa);
    Foliation w = warp(0.3);
    for (double y : {0.1, 0.37, 0.5, 0.93}) {
        Abscissa a(y), b(y + 0.01);
        CHECK(s.increment(0.6, a, b) == doctest::Approx(s.eval(0.6, b.value()) - s.eval(0.6, y)).epsilon(1e-12));
        CHECK(w.increment(0.6, a, b) == doctest::Approx(w.eval(0.6, b.value()) - w.eval(0.6, y)).epsilon(1e-12));
    }
    // A cell of width 2^-58 next to y = 1.
    Abscissa lo = Abscissa::dyadic((1ULL << 58) - 2, 58), hi = Abscissa::dyadic((1ULL << 58) - 1, 58);
    double h = std::ldexp(1.0, -58);
    CHECK(identity().increment(0.3, lo, hi) == h);
    // Near y = 1 the slope of the shear is 1 + 2 pi kappa x.
    CHECK(s.increment(0.5, lo, hi) / h == doctest::Approx(1.0 + 2 * std::numbers::pi * kappa * 0.5).epsilon(1e-9));
}

TEST_CASE("grid sampled foliation")
{
    int nx = 4, ny = 8;
    std::vector<double> v;
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j)
            v.push_back(static_cast<double>(j) / ny);
    Foliation g = grid_sampled(nx, ny, v, HolderClass{});
    CHECK(g.eval(0.3, 0.41) == doctest::Approx(0.41));
    v[1] = 0.5;
    CHECK_THROWS_AS(grid_sampled(nx, ny, v, HolderClass{}), InputError);
    Foliation cache = sample_on_grid(warp(0.5), 16, 16);
    CHECK(cache.eval(0.5, 0.5) == doctest::Approx(warp(0.5).eval(0.5, 0.5)).epsilon(1e-12));
}

TEST_CASE("double-double dyadic abscissas")
{
    Abscissa a = Abscissa::dyadic((1ULL << 60) - 1, 60);
    CHECK(a.hi == 1.0);
    CHECK(a.lo == -std::ldexp(1.0, -60));
    DyadicLocation loc = locate(a, 59);
    CHECK(loc.index == (1LL << 59) - 1);
    CHECK(loc.frac == 0.5);
    CHECK((Abscissa(1.0) - a) == std::ldexp(1.0, -60));
}

TEST_CASE("dyadic location beyond 2^53")
{
    std::uint64_t i = 222924825444565508ULL;   // even, above 2^57
    DyadicLocation lo = locate(Abscissa::dyadic(i, 58), 57);
    CHECK(lo.index == static_cast<std::int64_t>(i / 2));
    CHECK(lo.frac == 0.0);
    DyadicLocation hi = locate(Abscissa::dyadic(i + 1, 58), 57);
    CHECK(hi.index == static_cast<std::int64_t>(i / 2));
    CHECK(hi.frac == 0.5);
}
