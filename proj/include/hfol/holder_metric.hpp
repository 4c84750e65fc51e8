#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hfol/foliation.hpp"

namespace hfol {

/**
 * Discretization of the sup norms. Refinement doubles every count and adds
 * one ladder rung; because random pairs come from a fixed-seed stream, the
 * refined sample set contains the original one.
 */
struct SampleScheme {
    int x_intervals = 16;            // x grid j / x_intervals
    int ladder_k = 20;               // y separations 2^-k, k = 0..ladder_k
    int anchors = 32;                // ladder pairs start at j / anchors
    int random_pairs = 10000;
    int inverse_ladder_k = 20;       // cap for the inverse-holonomy ladder
    std::vector<int> extra_levels;   // further separations 2^-n (e.g. the perturbation level)
    std::uint64_t seed = 1;

    SampleScheme refined() const;
    void validate() const;
    std::string describe() const;
    std::string digest() const;
};

struct NormEstimate {
    double value = 0.0;
    double refined_value = std::numeric_limits<double>::quiet_NaN();
    bool refinement_monotone = true;
    std::string scheme_digest;

    bool has_refinement() const { return refined_value == refined_value; }
    /// |refined - value| relative to max(value, floor).
    double relative_change(double floor = 1e-12) const;
};

struct DistanceEstimate {
    NormEstimate total;
    double c0 = 0.0;
    double c0_dx = 0.0;
    double holonomy_forward = 0.0;   // sup_x ||h_{0,x} difference||_alpha
    double holonomy_inverse = 0.0;   // sup_x ||h_{x,0} difference||_alpha
};

struct MetricOptions {
    bool refine = true;
    EvalSettings settings{};
};

struct WorstPair {
    double x = 0.0;
    double y1 = 0.0;
    double y2 = 0.0;
    double quotient = 0.0;
};

struct BiHolderCertificate {
    double upper = 0.0;     // smallest C' with |df| <= C'|dy|^beta on the samples
    double lower = 0.0;     // smallest C' with |df| >= |dy|^(1/beta)/C'
    double declared_C = 0.0;
    double beta = 0.0;
    double slack = 1e-2;
    bool pass = false;
    WorstPair worst_upper;
    WorstPair worst_lower;
    std::string scheme_digest;
    std::size_t pairs = 0;
};

struct CauchyTable {
    std::vector<std::vector<double>> distance;  // NaN where not computed
    std::vector<double> successive;
    std::vector<double> budget;                 // xi0 / 2^k
    std::vector<bool> within_budget;
    bool pass = false;
};

NormEstimate c0_distance(const Foliation& f, const Foliation& g, const SampleScheme& scheme,
                         const MetricOptions& opt = {});
NormEstimate dx_distance(const Foliation& f, const Foliation& g, const SampleScheme& scheme,
                         const MetricOptions& opt = {});
NormEstimate holder_seminorm(const std::function<double(double)>& h, double alpha,
                             const SampleScheme& scheme, const MetricOptions& opt = {});
DistanceEstimate d_alpha(const Foliation& f, const Foliation& g, const HolderClass& hc,
                         const SampleScheme& scheme, const MetricOptions& opt = {});
BiHolderCertificate certify_bi_holder(const Foliation& f, const HolderClass& hc,
                                      const SampleScheme& scheme, double slack = 1e-2,
                                      const EvalSettings& settings = {});
/// Pairwise distances of a sequence; with successive_only the off-diagonal
/// band is all that is computed.
CauchyTable cauchy_probe(const std::vector<Foliation>& seq, const HolderClass& hc,
                         const SampleScheme& scheme, double xi0, bool successive_only = false,
                         const MetricOptions& opt = {});

/// The x positions a scheme samples.
std::vector<double> scheme_x_grid(const SampleScheme& scheme);

} // namespace hfol
