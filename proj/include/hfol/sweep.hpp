#pragma once

// Data-parallel kernels used by every certificate sweep. Each has an OpenMP
// path and a plain serial reference; both return bit-identical results.

#include <cstddef>
#include <exception>
#include <limits>
#include <vector>

#include "hfol/settings.hpp"

namespace hfol::sweep {

struct MaxResult {
    double value = -std::numeric_limits<double>::infinity();
    std::size_t index = 0;
};

inline void absorb(MaxResult& acc, double v, std::size_t i)
{
    // Ties and NaN resolve toward the lower index so the parallel and
    // serial kernels agree.
    if (v > acc.value || (v == acc.value && i < acc.index) || (v != v && acc.value == acc.value)) {
        acc.value = v;
        acc.index = i;
    }
}

template <class F>
MaxResult max_serial(std::size_t n, F&& fn)
{
    MaxResult acc;
    for (std::size_t i = 0; i < n; ++i)
        absorb(acc, fn(i), i);
    return acc;
}

template <class F>
MaxResult max_parallel(std::size_t n, F&& fn)
{
#ifdef _OPENMP
    MaxResult best;
    std::exception_ptr err;
    const auto count = static_cast<long long>(n);
#pragma omp parallel
    {
        MaxResult local;
#pragma omp for schedule(dynamic, 64) nowait
        for (long long i = 0; i < count; ++i) {
            try {
                absorb(local, fn(static_cast<std::size_t>(i)), static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical(hfol_sweep_err)
                if (!err) err = std::current_exception();
            }
        }
#pragma omp critical(hfol_sweep_max)
        {
            if (local.value > best.value || (local.value == best.value && local.index < best.index))
                best = local;
        }
    }
    if (err) std::rethrow_exception(err);
    return best;
#else
    return max_serial(n, fn);
#endif
}

template <class F>
MaxResult max_of(std::size_t n, F&& fn, Exec ex)
{
    return ex == Exec::parallel ? max_parallel(n, fn) : max_serial(n, fn);
}

template <class F>
std::vector<double> map_serial(std::size_t n, F&& fn)
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = fn(i);
    return out;
}

template <class F>
std::vector<double> map_parallel(std::size_t n, F&& fn)
{
#ifdef _OPENMP
    std::vector<double> out(n);
    std::exception_ptr err;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(hfol_sweep_err)
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
#else
    return map_serial(n, fn);
#endif
}

template <class F>
std::vector<double> map(std::size_t n, F&& fn, Exec ex)
{
    return ex == Exec::parallel ? map_parallel(n, fn) : map_serial(n, fn);
}

/// Sum in index order, so the result does not depend on the thread count.
inline double ordered_sum(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s;
}

} // namespace hfol::sweep
