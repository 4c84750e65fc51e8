#pragma once

#include <array>
#include <string>
#include <vector>

#include "hfol/foliation.hpp"
#include "hfol/interval.hpp"
#include "hfol/smoothing.hpp"

namespace hfol {

/// a(x) = (1/gamma) * integral_0^x exp(1/((2t-1)^2-1)) dt.
double bump_a(double x);
double bump_a_derivative(double x);
double bump_gamma();

/**
 * The profile ~a: 1/2 at x = 0, flat delta2 away from I, flat 1-delta2 on
 * I, joined by rescaled copies of a over ramps of width delta1.
 */
class BumpTilde {
public:
    BumpTilde(double delta1, double delta2, IntervalQ I);

    double operator()(double x) const;
    double derivative(double x) const;
    /// Ramp edges, in increasing order.
    const std::vector<double>& knots() const { return knots_; }

    double delta1() const { return d1_; }
    double delta2() const { return d2_; }
    const IntervalQ& interval() const { return I_; }

private:
    double d1_, d2_, b1_, b2_;
    IntervalQ I_;
    std::vector<double> knots_;
};

struct PerturbationParams {
    double delta1 = 0.0;
    double delta2 = 0.0;
    int n = 0;
    IntervalQ I;
};

/// The two branches of the lema5 maximum.
std::array<double, 2> lema5_terms(double L3, double delta1, double delta2, double mu);

/**
 * Bounds on every level-n strip ratio of a dyadic perturbation with profile
 * p, when the cell widths w_a(x) vary by at most a factor q across x.
 * Even strips carry weight p(x), odd strips 1 - p(x).
 */
struct EnvelopeBounds {
    double A = 0.0, B = 0.0, Ac = 0.0, Bc = 0.0;   // integrals of p and 1-p over I and its complement
    double q = 1.0;
    double even_lo = 0.0, even_hi = 1.0;
    double odd_lo = 0.0, odd_hi = 1.0;
    /// Smallest distance of the ratio ranges into [1/m, 1-1/m] (negative = inside).
    double clearance(int m) const;
};

EnvelopeBounds envelope_bounds(const BumpTilde& p, double q);
/// Same, for a query interval J other than the profile's own.
EnvelopeBounds envelope_bounds(const BumpTilde& p, double q, const IntervalQ& J);

struct DeltaChoice {
    double delta1 = 0.0;
    double delta2 = 0.0;
    std::array<double, 2> lema5{};
    double envelope_clearance = 0.0;
    int halvings = 0;
};

DeltaChoice choose_deltas(double L3, int m, const IntervalQ& I);

/// lhs and rhs of the lema4 conditions at a given n.
struct ConditionValue {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds() const { return lhs <= rhs; }
};

struct Lema4Inputs {
    double delta1 = 0.0, delta2 = 0.0;
    double L3 = 1.0, K3 = 0.0;
    double C_eps = 1.0;
    double xi = 0.5;
    HolderClass hc;
};

ConditionValue lema4_condition(int which, int n, const Lema4Inputs& in);
/// The four branches of condition (4) at n.
std::array<double, 4> lema4_condition4_terms(int n, const Lema4Inputs& in);

/// Smallest n <= 64 meeting conditions (1), (3) and (4).
int choose_n(const Lema4Inputs& in);

/// f~ over the inner generator f3 (closed form; no quadrature).
Foliation dyadic_perturb(const Foliation& f3, const PerturbationParams& pp, HolderClass declared);

/// Accessor for the structure of a dyadic-perturbed foliation.
class DyadicPerturbedView {
public:
    virtual ~DyadicPerturbedView() = default;
    virtual const PerturbationParams& params() const = 0;
    virtual const BumpTilde& profile() const = 0;
    virtual const Foliation& inner() const = 0;
    /// w_a(x) = f3(x, (2a+2)/2^n) - f3(x, 2a/2^n).
    virtual double cell_width(double x, std::uint64_t a) const = 0;
};

const DyadicPerturbedView* as_dyadic(const Foliation& f);

} // namespace hfol
