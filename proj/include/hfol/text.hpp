#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hfol {

/// Round-trip exact text form of a double (C99 hex float).
std::string hexfloat(double v);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

/// Short decimal for human-readable columns.
std::string decimal(double v, int digits = 10);

/// 64-bit FNV-1a digest rendered as 16 hex digits.
std::string digest(std::string_view text);

std::string trim(std::string_view s);

} // namespace hfol
