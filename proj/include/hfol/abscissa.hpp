#pragma once

#include <cmath>
#include <cstdint>

namespace hfol {

/**
 * A point of [0,1] (or a small neighbourhood) stored as an unevaluated sum
 * hi + lo with |lo| <= ulp(hi)/2. Dyadic cells at level 58 are narrower than
 * the spacing of doubles near 1, so strip widths are computed from pairs of
 * these rather than from rounded doubles.
 */
struct Abscissa {
    double hi = 0.0;
    double lo = 0.0;

    constexpr Abscissa() = default;
    constexpr Abscissa(double v) : hi(v), lo(0.0) {}
    constexpr Abscissa(double h, double l) : hi(h), lo(l) {}

    double value() const { return hi + lo; }

    /// i / 2^n, exact for i < 2^62.
    static Abscissa dyadic(std::uint64_t i, int n)
    {
        double h = static_cast<double>(i >> 32) * 4294967296.0;
        double l = static_cast<double>(i & 0xffffffffULL);
        Abscissa a = two_sum(h, l);
        return {std::ldexp(a.hi, -n), std::ldexp(a.lo, -n)};
    }

    static Abscissa two_sum(double a, double b)
    {
        double s = a + b;
        double bb = s - a;
        double e = (a - (s - bb)) + (b - bb);
        return {s, e};
    }

    Abscissa operator+(double d) const
    {
        Abscissa s = two_sum(hi, d);
        return two_sum(s.hi, s.lo + lo);
    }
    Abscissa operator-(double d) const { return *this + (-d); }
    Abscissa operator-() const { return {-hi, -lo}; }

    /// Difference rounded to double; exact when the operands are close.
    friend double operator-(const Abscissa& a, const Abscissa& b)
    {
        Abscissa s = two_sum(a.hi, -b.hi);
        return s.hi + (s.lo + (a.lo - b.lo));
    }

    friend bool operator<(const Abscissa& a, const Abscissa& b) { return (a - b) < 0.0; }
    friend bool operator<=(const Abscissa& a, const Abscissa& b) { return (a - b) <= 0.0; }
    friend bool operator==(const Abscissa& a, const Abscissa& b) { return a.hi == b.hi && a.lo == b.lo; }

    /// Reflection 2 - p.
    Abscissa reflect_one() const
    {
        Abscissa s = two_sum(2.0, -hi);
        return two_sum(s.hi, s.lo - lo);
    }
};

/// Position of p in the level-k dyadic grid: p*2^k = index + frac, frac in [0,1).
struct DyadicLocation {
    std::int64_t index;
    double frac;
};

inline DyadicLocation locate(const Abscissa& p, int k)
{
    // Scaling by 2^k is exact; split each part into integer and fraction
    // separately because lo can itself carry integer bits once hi >= 2^53.
    double h = std::ldexp(p.hi, k);
    double l = std::ldexp(p.lo, k);
    double fh = std::floor(h), fl = std::floor(l);
    auto idx = static_cast<std::int64_t>(fh) + static_cast<std::int64_t>(fl);
    double frac = (h - fh) + (l - fl);
    if (frac >= 1.0) {
        idx += 1;
        frac -= 1.0;
    }
    return {idx, frac};
}

} // namespace hfol
