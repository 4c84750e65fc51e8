#pragma once

#include <stdexcept>
#include <string>

namespace hfol {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: out-of-domain arguments, malformed manifests.
class InputError : public Error {
public:
    using Error::Error;
};

// No admissible parameters exist for the requested construction.
class ParameterError : public Error {
public:
    using Error::Error;
};

// A numerical self-check failed (quadrature drift, bisection cap).
class PrecisionError : public Error {
public:
    using Error::Error;
};

// A foliation broke one of its structural invariants.
class CorruptFoliationError : public Error {
public:
    using Error::Error;
};

} // namespace hfol
