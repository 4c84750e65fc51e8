#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hfol {

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
    static Rational parse(std::string_view text);
    friend bool operator==(const Rational& a, const Rational& b) { return a.num * b.den == b.num * a.den; }
};

/// I = [b1, b2] with rational endpoints, 0 <= b1 < b2 <= 1.
struct IntervalQ {
    Rational b1{0, 1};
    Rational b2{1, 1};

    double lo() const { return b1.value(); }
    double hi() const { return b2.value(); }
    double length() const { return hi() - lo(); }
    bool contains(double x) const { return x >= lo() && x <= hi(); }
    std::string str() const;

    /// Parses "p/q:r/s" (integers are accepted as n/1).
    static IntervalQ parse(std::string_view text);
    static IntervalQ make(std::int64_t p, std::int64_t q, std::int64_t r, std::int64_t s);
};

} // namespace hfol
