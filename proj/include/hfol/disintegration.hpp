#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hfol/foliation.hpp"
#include "hfol/interval.hpp"
#include "hfol/perturbation.hpp"

namespace hfol {

/// Lebesgue measure of P_i = {y in [f(x,i/2^n), f(x,(i+1)/2^n))}.
double strip_measure(const Foliation& f, int n, std::uint64_t i, const EvalSettings& settings = {});
/// Measure of P_i restricted to x in I.
double strip_measure_in(const Foliation& f, int n, std::uint64_t i, const IntervalQ& I,
                        const EvalSettings& settings = {});
/// Measure of P_i restricted to x in [a,b].
double strip_measure_window(const Foliation& f, int n, std::uint64_t i, double a, double b,
                            const EvalSettings& settings = {});

struct StripRow {
    std::uint64_t index = 0;
    double measure = 0.0;
    double inside = 0.0;
    double ratio = 0.0;
    bool outside_band = false;
};

struct MembershipOptions {
    EvalSettings settings{};
    int enumerate_limit = 20;     // enumerate all strips up to this level
    int samples = 64;             // exactly integrated strips beyond it
    std::uint64_t seed = 11;
    double q = -1.0;              // width variation bound; <0 means derive it
};

struct MembershipReport {
    int n = 0;
    int m = 0;
    IntervalQ I;
    bool pass = false;
    bool exhaustive = false;
    std::string method;           // "enumerated", "envelope" or "sampled"
    std::vector<StripRow> table;
    std::optional<EnvelopeBounds> envelope;
    double clearance = 0.0;       // min distance of any ratio into [1/m, 1-1/m]; <0 inside
};

MembershipReport membership_A(const Foliation& f, int n, int m, const IntervalQ& I,
                              const MembershipOptions& opt = {});
/// Smallest n <= n_max (<= 24) with membership_A passing.
std::optional<int> membership_B(const Foliation& f, int m, const IntervalQ& I, int n_max,
                                const MembershipOptions& opt = {});

struct RatioEntry {
    int n = 0;
    std::uint64_t index = 0;
    double measure = 0.0;
    double inside = 0.0;
    double ratio = 0.0;
};

struct RatioSequence {
    double y_P = 0.0;
    IntervalQ I;
    std::vector<RatioEntry> entries;
    double rel_tol = 0.0;         // per-entry quadrature tolerance relative to 2^-n
};

/// Ratios mu(P_n cap I~)/mu(P_n) for the strips containing y_P, n_min <= n <= n_max <= 62.
RatioSequence ratio_sequence(const Foliation& f, double y_P, const IntervalQ& I, int n_min, int n_max,
                             const EvalSettings& settings = {});

struct AtomStep {
    double lo = 0.0, hi = 1.0;
    double mass = 1.0;            // conditional mass of the kept window
    bool tie = false;
};

struct AtomReport {
    double y_P = 0.0;
    int level = 0;                // N: level whose strip stands in for the leaf
    std::vector<AtomStep> steps;
    double x_P = 0.5;
    double atom_y = 0.0;          // f(x_P, y_P)
    bool atomic = false;          // final window holds > 0.9 of the mass
};

AtomReport atom_locate(const Foliation& f, double y_P, int level, int depth,
                       const EvalSettings& settings = {});

struct ACRow {
    double x = 0.0, min = 0.0, max = 0.0, ratio = 1.0;
};

struct ACReport {
    double scale = 0.0;
    std::vector<ACRow> rows;
    double global_min = 0.0, global_max = 0.0, global_ratio = 1.0;
    std::string hint;
};

/// Holonomy density quotients (f(x,y+s)-f(x,y))/s on a y grid of ny
/// points and the same points shifted by s.
ACReport ac_report(const Foliation& f, const std::vector<double>& x_grid, double scale, int ny = 64,
                   const EvalSettings& settings = {});

} // namespace hfol
