#pragma once

#include <array>
#include <vector>

#include "hfol/foliation.hpp"
#include "hfol/holder_metric.hpp"

namespace hfol {

/// exp(1/(u^2-1)) on (-1,1), zero outside.
double bump_profile(double u);

/// Normalized kernel phi_r(t) = (c/r) exp(1/((t/r)^2-1)) with its convolution rule.
struct Mollifier {
    double r = 0.0;
    double c = 0.0;
    std::vector<double> t;   // nodes on (-r,r)
    std::vector<double> w;   // weights, sum exactly normalized to 1 by c
    std::vector<double> dw;  // weights of the derivative kernel phi_r'

    static Mollifier make(double r, int nodes);
    double operator()(double t) const;
};

struct MollifyParams {
    double r = 0.0;
    double r_cap = 0.0;
    std::array<double, 3> cap_terms{};   // the three closed-form bounds on r
    double modulus = 0.0;                // measured C_r(df/dx)
    int halvings = 0;
    int nodes = 64;
};

struct InterpolationParams {
    double epsilon = 0.0;
    double C_eps = 0.0;
    double dx_norm = 0.0;                // measured ||df2/dx||_C0
    std::array<double, 4> terms{};
};

struct LipschitzEstimates {
    double L = 1.0;
    double K = 0.0;
    double safety = 1.25;
    double L_raw = 1.0;
    double K_raw = 0.0;
    int finest_level = 14;
};

/// f1: f on [0,1], odd reflections about (.,0,0) and (.,1,1) outside.
class ExtendedEvaluator {
public:
    explicit ExtendedEvaluator(Foliation f) : f_(std::move(f)) {}
    double value(double x, double y) const;
    double dx(double x, double y) const;
    double increment(double x, const Abscissa& lo, const Abscissa& hi) const;
    /// Integral of f1(x,u) du over [lo, hi] with -1 < lo <= hi < 2.
    double integral(double x, const Abscissa& lo, const Abscissa& hi) const;
    const Foliation& base() const { return f_; }

private:
    Foliation f_;
};

ExtendedEvaluator reflect_extend(const Foliation& f);

/// min of the three closed-form radius bounds.
double r_cap(const HolderClass& hc, double xi, std::array<double, 3>* terms = nullptr);
/// C_eps = max{C(1-eps)+eps, C/(1-eps+C eps)}.
double c_eps(double C, double eps);

struct SmoothingOptions {
    EvalSettings settings{};
    int modulus_x = 64;       // x grid for the measured modulus
    int modulus_y = 32;
    SampleScheme scheme{};    // grid for ||df2/dx|| in choose_epsilon
};

/// sup over sampled |x - x'| <= r of |df/dx(x,y) - df/dx(x',y)|.
double dx_modulus(const Foliation& f, double r, const SmoothingOptions& opt = {});

MollifyParams choose_r(const Foliation& f, const HolderClass& hc, double xi,
                       const SmoothingOptions& opt = {});
Foliation mollify(const Foliation& f, const MollifyParams& mp, const EvalSettings& settings = {});

InterpolationParams choose_epsilon(const Foliation& f2, const HolderClass& hc, double xi,
                                   const SmoothingOptions& opt = {});
InterpolationParams interpolation_params(double epsilon, double C);
Foliation interpolate_identity(const Foliation& f2, const InterpolationParams& ip);

LipschitzEstimates estimate_lipschitz(const Foliation& f3, double safety = 1.25,
                                      const EvalSettings& settings = {}, int finest_level = 14);

} // namespace hfol
