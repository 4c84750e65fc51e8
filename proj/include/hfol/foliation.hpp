#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hfol/abscissa.hpp"
#include "hfol/settings.hpp"

namespace hfol {

enum class Kind { base_analytic, mollified, identity_interpolated, dyadic_perturbed, grid_sampled };

std::string to_string(Kind k);

class FoliationNode;
using NodePtr = std::shared_ptr<const FoliationNode>;

/// Key/value description of one node, used by the manifest writer.
struct NodeDescription {
    std::string kind;
    std::map<std::string, std::string> params;
    std::vector<NodePtr> inputs;
};

/**
 * One generator f(x,y) on [0,1]^2. Implementations are immutable and may
 * be shared between threads. Callers guarantee x, y in [0,1]; the checked
 * entry points live on Foliation.
 */
class FoliationNode {
public:
    explicit FoliationNode(HolderClass declared) : declared_(declared) {}
    virtual ~FoliationNode() = default;

    virtual Kind kind() const = 0;
    virtual double value(double x, double y) const = 0;
    virtual double dx(double x, double y) const = 0;
    /// f(x,hi) - f(x,lo) for lo <= hi, accurate relative to the difference.
    virtual double increment(double x, const Abscissa& lo, const Abscissa& hi) const = 0;
    /// Integral of f(x,u) du over [lo, hi], accurate relative to its size.
    virtual double integral(double x, const Abscissa& lo, const Abscissa& hi) const = 0;
    /// True when f(x,y) = y identically.
    virtual bool is_identity() const { return false; }
    /// x positions where the generator is not smooth in x (ramp edges).
    virtual void x_breakpoints(std::vector<double>&) const {}
    virtual NodeDescription describe() const = 0;

    const HolderClass& declared() const { return declared_; }

private:
    HolderClass declared_;
};

class Foliation {
public:
    Foliation() = default;
    explicit Foliation(NodePtr node) : node_(std::move(node)) {}

    double eval(double x, double y) const;
    double eval_dx(double x, double y) const;
    double increment(double x, const Abscissa& lo, const Abscissa& hi) const;
    double integral(double x, const Abscissa& lo, const Abscissa& hi) const;

    Kind kind() const { return node_->kind(); }
    bool is_identity() const { return node_->is_identity(); }
    const HolderClass& declared() const { return node_->declared(); }
    std::vector<double> x_breakpoints() const;

    const FoliationNode& node() const { return *node_; }
    const NodePtr& ptr() const { return node_; }
    explicit operator bool() const { return static_cast<bool>(node_); }

    template <class T>
    const T* as() const { return dynamic_cast<const T*>(node_.get()); }

private:
    NodePtr node_;
};

/// y with |f(x,y) - z| <= settings.root_tol, by bisection on [0,1].
double invert_y(const Foliation& f, double x, double z, const EvalSettings& settings = {});

/// Same, starting from the bracket [guess - width, guess + width] when it
/// brackets z; falls back to [0,1] otherwise.
double invert_y(const Foliation& f, double x, double z, double guess, double width,
                const EvalSettings& settings);

/// Built-in generators: "identity"; "shear" (kappa); "warp" (lambda).
using BuiltinParams = std::map<std::string, double>;
Foliation builtin(std::string_view name, const BuiltinParams& params = {});

/// Shear y + kappa*x*sin(2*pi*y); requires 2*pi*|kappa| < 1.
Foliation shear(double kappa);
/// Warp y + lambda*sin(pi*x/2)*y*(1-y); requires |lambda| < 1.
Foliation warp(double lambda);
Foliation identity();

/**
 * Bilinear interpolant of values on a uniform (nx+1) x (ny+1) grid, row
 * major in x. Boundary rows/columns must already satisfy the pinning
 * conditions; y-monotonicity is only required to be non-strict so that
 * deliberately defective fixtures can be built.
 */
Foliation grid_sampled(int nx, int ny, std::vector<double> values, HolderClass declared);

/// Samples f on a grid (for plotting caches only).
Foliation sample_on_grid(const Foliation& f, int nx, int ny);

} // namespace hfol
