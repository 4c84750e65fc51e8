#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hfol/disintegration.hpp"
#include "hfol/holder_metric.hpp"
#include "hfol/perturbation.hpp"
#include "hfol/smoothing.hpp"

namespace hfol {

/// One verified inequality lhs <= rhs (or lhs < rhs when strict).
struct CertificateRow {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool strict = false;
    bool enforced = true;

    double margin() const { return rhs - lhs; }
    bool holds() const { return strict ? lhs < rhs : lhs <= rhs; }
    bool pass() const { return !enforced || holds(); }
};

struct Certificate {
    HolderClass hc;
    double xi = 0.0;
    int m = 0;
    IntervalQ I;
    bool short_circuited = false;

    std::vector<CertificateRow> rows;
    MollifyParams mollify;
    InterpolationParams interpolation;
    LipschitzEstimates lipschitz;
    DeltaChoice deltas;
    PerturbationParams perturbation;
    BiHolderCertificate input_cert, f2_cert, f3_cert, ft_cert;
    DistanceEstimate d_f_f2, d_f2_f3, d_f3_ft, d_f_ft;
    MembershipReport membership;
    std::string scheme;
    std::string scheme_digest;
    std::string settings_digest;

    bool pass() const;
    std::vector<const CertificateRow*> failures() const;
};

struct PipelineOptions {
    SampleScheme scheme{};
    EvalSettings settings{};
    SmoothingOptions smoothing{};
    MembershipOptions membership{};
    double slack = 1e-2;
    int precheck_levels = 8;
    bool refine_distances = true;
    double stability_gate = 0.05;
    bool direct_distance = true;     // also measure d(f, f~) in one step
};

struct PipelineResult {
    Foliation f2, f3, ft;
    Certificate cert;
};

/// Mollify, interpolate with the identity and perturb dyadically so that the
/// result lies in B_{m,I} within d_alpha distance xi of f.
PipelineResult construct_in_B(const Foliation& f, const HolderClass& hc, double xi, int m,
                              const IntervalQ& I, const PipelineOptions& opt = {});

struct ScheduleItem {
    int m = 2;
    IntervalQ I;
};

struct OpennessCheck {
    int step = 0;          // iterate index being retested
    int earlier = 0;       // step whose membership is retested
    int n = 0;
    bool pass = false;
    bool exhaustive = false;
    double clearance = 0.0;
};

struct ResidualResult {
    std::vector<Foliation> iterates;
    std::vector<Certificate> certificates;
    std::vector<OpennessCheck> openness;
    bool completed = false;
    std::string failure;
};

struct ResidualOptions {
    PipelineOptions pipeline{};
    /// Convolution order per step; the last entry repeats. Each nested
    /// mollification multiplies evaluation cost by its order, and every one
    /// is still guarded by the doubling drift check.
    std::vector<int> mollifier_nodes{64, 8, 4};
    int openness_samples = 8;
    std::function<void(int, const Certificate&)> on_step;
};

ResidualResult residual_iterate(const Foliation& f0, const std::vector<ScheduleItem>& schedule, double xi0,
                                const HolderClass& hc, const ResidualOptions& opt = {});

} // namespace hfol
