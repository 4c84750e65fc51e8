#include "hfol/interval.hpp"

#include <numeric>

#include "hfol/errors.hpp"
#include "hfol/text.hpp"

namespace hfol {

std::string Rational::str() const { return std::to_string(num) + "/" + std::to_string(den); }

Rational Rational::parse(std::string_view text)
{
    std::string t = trim(text);
    auto slash = t.find('/');
    Rational r;
    if (slash == std::string::npos) {
        r.num = parse_int(t);
        r.den = 1;
    } else {
        r.num = parse_int(t.substr(0, slash));
        r.den = parse_int(t.substr(slash + 1));
    }
    if (r.den <= 0)
        throw InputError("rational '" + t + "' needs a positive denominator");
    std::int64_t g = std::gcd(r.num, r.den);
    if (g > 1) {
        r.num /= g;
        r.den /= g;
    }
    return r;
}

std::string IntervalQ::str() const { return b1.str() + ":" + b2.str(); }

IntervalQ IntervalQ::parse(std::string_view text)
{
    auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw InputError("interval must be written p/q:r/s, got '" + std::string(text) + "'");
    IntervalQ I;
    I.b1 = Rational::parse(text.substr(0, colon));
    I.b2 = Rational::parse(text.substr(colon + 1));
    // Compare exactly by cross-multiplication.
    auto less = [](Rational a, Rational b) { return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den; };
    if (less(I.b1, Rational{0, 1}) || less(Rational{1, 1}, I.b2) || !less(I.b1, I.b2))
        throw InputError("interval must satisfy 0 <= b1 < b2 <= 1, got '" + std::string(text) + "'");
    return I;
}

IntervalQ IntervalQ::make(std::int64_t p, std::int64_t q, std::int64_t r, std::int64_t s)
{
    return parse(std::to_string(p) + "/" + std::to_string(q) + ":" + std::to_string(r) + "/" + std::to_string(s));
}

} // namespace hfol
