#include "hfol/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hfol/errors.hpp"
#include "hfol/text.hpp"

namespace hfol {

void HolderClass::validate() const
{
    if (!(C > 1.0))
        throw ParameterError("HolderClass: C must exceed 1");
    if (!(beta > 0.0 && beta < 1.0))
        throw ParameterError("HolderClass: beta must lie in (0,1)");
    if (!(alpha >= 0.0 && alpha < beta))
        throw ParameterError("HolderClass: alpha must lie in [0,beta)");
}

void EvalSettings::validate() const
{
    if (!(root_tol > 0.0) || !(drift_tol > 0.0) || !(strip_rel_tol > 0.0) || !(fd_step > 0.0))
        throw ParameterError("EvalSettings: tolerances must be positive");
    if (root_max_iter < 1 || mollifier_nodes < 2 || simpson_max_depth < 1)
        throw ParameterError("EvalSettings: iteration counts must be positive");
}

std::string EvalSettings::digest() const
{
    std::ostringstream s;
    s << hexfloat(root_tol) << ';' << root_max_iter << ';' << mollifier_nodes << ';'
      << hexfloat(drift_tol) << ';' << hexfloat(strip_rel_tol) << ';' << simpson_max_depth << ';'
      << hexfloat(fd_step);
    return hfol::digest(s.str());
}

std::string to_string(Kind k)
{
    switch (k) {
    case Kind::base_analytic: return "base-analytic";
    case Kind::mollified: return "mollified";
    case Kind::identity_interpolated: return "identity-interpolated";
    case Kind::dyadic_perturbed: return "dyadic-perturbed";
    case Kind::grid_sampled: return "grid-sampled";
    }
    return "unknown";
}

namespace {

void check_domain(double x, double y)
{
    if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
        throw InputError("point outside [0,1]^2: (" + decimal(x) + ", " + decimal(y) + ")");
}

// sin(pi*u) and cos(pi*u) with exact values at multiples of 1/2.
double sin_pi(double u)
{
    double q = std::nearbyint(2.0 * u);
    double r = u - 0.5 * q;
    long k = static_cast<long>(q) & 3;
    double s = std::sin(std::numbers::pi * r), c = std::cos(std::numbers::pi * r);
    switch (k) {
    case 0: return s;
    case 1: return c;
    case 2: return -s;
    default: return -c;
    }
}

double cos_pi(double u) { return sin_pi(u + 0.5); }

HolderClass declared_from(const BuiltinParams& p, double lipschitz)
{
    HolderClass hc;
    hc.C = std::max(2.0, lipschitz);
    if (auto it = p.find("C"); it != p.end())
        hc.C = it->second;
    if (auto it = p.find("beta"); it != p.end())
        hc.beta = it->second;
    if (auto it = p.find("alpha"); it != p.end())
        hc.alpha = it->second;
    hc.validate();
    if (hc.C < lipschitz)
        throw ParameterError("declared C is below the generator's bi-Lipschitz constant");
    return hc;
}

std::map<std::string, std::string> class_params(const HolderClass& hc)
{
    return {{"C", hexfloat(hc.C)}, {"beta", hexfloat(hc.beta)}, {"alpha", hexfloat(hc.alpha)}};
}

class IdentityNode final : public FoliationNode {
public:
    using FoliationNode::FoliationNode;
    Kind kind() const override { return Kind::base_analytic; }
    double value(double, double y) const override { return y; }
    double dx(double, double) const override { return 0.0; }
    double increment(double, const Abscissa& lo, const Abscissa& hi) const override { return hi - lo; }
    double integral(double, const Abscissa& lo, const Abscissa& hi) const override
    {
        return (hi - lo) * 0.5 * (hi.value() + lo.value());
    }
    bool is_identity() const override { return true; }
    NodeDescription describe() const override
    {
        NodeDescription d{"identity", class_params(declared()), {}};
        return d;
    }
};

class ShearNode final : public FoliationNode {
public:
    ShearNode(double kappa, HolderClass hc) : FoliationNode(hc), kappa_(kappa) {}
    Kind kind() const override { return Kind::base_analytic; }
    double value(double x, double y) const override
    {
        if (y <= 0.0 || y >= 1.0)
            return y <= 0.0 ? 0.0 : 1.0;
        return y + kappa_ * x * sin_pi(2.0 * y);
    }
    double dx(double, double y) const override { return kappa_ * sin_pi(2.0 * y); }
    double increment(double x, const Abscissa& lo, const Abscissa& hi) const override
    {
        double d = hi - lo;
        // sin(2 pi b) - sin(2 pi a) = 2 cos(pi (a+b)) sin(pi (b-a))
        return d + 2.0 * kappa_ * x * cos_pi(hi.value() + lo.value()) * sin_pi(d);
    }
    double integral(double x, const Abscissa& lo, const Abscissa& hi) const override
    {
        double d = hi - lo, sum = hi.value() + lo.value();
        // cos(2 pi a) - cos(2 pi b) = 2 sin(pi (a+b)) sin(pi (b-a))
        return d * 0.5 * sum + kappa_ * x * sin_pi(sum) * sin_pi(d) / std::numbers::pi;
    }
    NodeDescription describe() const override
    {
        NodeDescription d{"shear", class_params(declared()), {}};
        d.params["kappa"] = hexfloat(kappa_);
        return d;
    }

private:
    double kappa_;
};

class WarpNode final : public FoliationNode {
public:
    WarpNode(double lambda, HolderClass hc) : FoliationNode(hc), lambda_(lambda) {}
    Kind kind() const override { return Kind::base_analytic; }
    double value(double x, double y) const override
    {
        return y + lambda_ * std::sin(0.5 * std::numbers::pi * x) * y * (1.0 - y);
    }
    double dx(double x, double y) const override
    {
        return lambda_ * 0.5 * std::numbers::pi * std::cos(0.5 * std::numbers::pi * x) * y * (1.0 - y);
    }
    double increment(double x, const Abscissa& lo, const Abscissa& hi) const override
    {
        double d = hi - lo;
        return d + lambda_ * std::sin(0.5 * std::numbers::pi * x) * d * (1.0 - (hi.value() + lo.value()));
    }
    double integral(double x, const Abscissa& lo, const Abscissa& hi) const override
    {
        double d = hi - lo, a = lo.value(), b = hi.value();
        double bump = 0.5 * (a + b) - (a * a + a * b + b * b) / 3.0;   // mean of u(1-u)
        return d * (0.5 * (a + b) + lambda_ * std::sin(0.5 * std::numbers::pi * x) * bump);
    }
    NodeDescription describe() const override
    {
        NodeDescription d{"warp", class_params(declared()), {}};
        d.params["lambda"] = hexfloat(lambda_);
        return d;
    }

private:
    double lambda_;
};

class GridNode final : public FoliationNode {
public:
    GridNode(int nx, int ny, std::vector<double> v, HolderClass hc)
        : FoliationNode(hc), nx_(nx), ny_(ny), v_(std::move(v))
    {
    }
    Kind kind() const override { return Kind::grid_sampled; }
    double value(double x, double y) const override
    {
        auto [i, tx] = cell(x, nx_);
        auto [j, ty] = cell(y, ny_);
        double a = at(i, j) + ty * (at(i, j + 1) - at(i, j));
        double b = at(i + 1, j) + ty * (at(i + 1, j + 1) - at(i + 1, j));
        return a + tx * (b - a);
    }
    double dx(double x, double y) const override
    {
        auto [i, tx] = cell(x, nx_);
        auto [j, ty] = cell(y, ny_);
        double a = at(i, j) + ty * (at(i, j + 1) - at(i, j));
        double b = at(i + 1, j) + ty * (at(i + 1, j + 1) - at(i + 1, j));
        (void)tx;
        return (b - a) * nx_;
    }
    double increment(double x, const Abscissa& lo, const Abscissa& hi) const override
    {
        return value(x, std::clamp(hi.value(), 0.0, 1.0)) - value(x, std::clamp(lo.value(), 0.0, 1.0));
    }
    double integral(double x, const Abscissa& lo, const Abscissa& hi) const override
    {
        // Piecewise linear in u between grid rows: trapezoids are exact.
        double a = std::clamp(lo.value(), 0.0, 1.0), b = std::clamp(hi.value(), 0.0, 1.0);
        if (!(a < b))
            return 0.0;
        double total = 0.0, u = a, fu = value(x, a);
        while (u < b) {
            double next = std::min(b, (std::floor(u * ny_) + 1.0) / ny_);
            if (next <= u)
                next = b;
            double fn = value(x, next);
            total += (next - u) * 0.5 * (fu + fn);
            u = next;
            fu = fn;
        }
        return total;
    }
    void x_breakpoints(std::vector<double>& out) const override
    {
        for (int i = 1; i < nx_; ++i)
            out.push_back(static_cast<double>(i) / nx_);
    }
    NodeDescription describe() const override
    {
        NodeDescription d{"grid", class_params(declared()), {}};
        d.params["nx"] = std::to_string(nx_);
        d.params["ny"] = std::to_string(ny_);
        std::string vals;
        for (std::size_t k = 0; k < v_.size(); ++k) {
            if (k)
                vals += ' ';
            vals += hexfloat(v_[k]);
        }
        d.params["values"] = vals;
        return d;
    }

private:
    static std::pair<int, double> cell(double t, int n)
    {
        double s = t * n;
        int i = std::min(static_cast<int>(s), n - 1);
        return {i, s - i};
    }
    double at(int i, int j) const { return v_[static_cast<std::size_t>(i) * (ny_ + 1) + j]; }

    int nx_, ny_;
    std::vector<double> v_;
};

} // namespace

double Foliation::eval(double x, double y) const
{
    check_domain(x, y);
    if (y == 0.0)
        return 0.0;
    if (y == 1.0)
        return 1.0;
    return node_->value(x, y);
}

double Foliation::eval_dx(double x, double y) const
{
    check_domain(x, y);
    return node_->dx(x, y);
}

double Foliation::increment(double x, const Abscissa& lo, const Abscissa& hi) const
{
    check_domain(x, lo.value());
    check_domain(x, hi.value());
    if (hi < lo)
        return -node_->increment(x, hi, lo);
    return node_->increment(x, lo, hi);
}

double Foliation::integral(double x, const Abscissa& lo, const Abscissa& hi) const
{
    check_domain(x, lo.value());
    check_domain(x, hi.value());
    if (hi < lo)
        return -node_->integral(x, hi, lo);
    return node_->integral(x, lo, hi);
}

std::vector<double> Foliation::x_breakpoints() const
{
    std::vector<double> out;
    node_->x_breakpoints(out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

// Illinois regula falsi on a monotone bracket; falls back to a midpoint
// whenever the interpolated point fails to shrink the bracket enough.
double bisect(const Foliation& f, double x, double z, double lo, double hi, double flo, double fhi,
              const EvalSettings& s)
{
    const FoliationNode& n = f.node();
    double glo = flo - z, ghi = fhi - z;
    int side = 0;
    double last_width = hi - lo;
    for (int it = 0; it < s.root_max_iter; ++it) {
        double mid = 0.5 * (lo + hi);
        if (ghi > glo && (it % 3) != 2) {
            double t = lo - glo * (hi - lo) / (ghi - glo);
            if (t > lo && t < hi) mid = t;
        }
        double fm = n.value(x, mid);
        if (fm < flo || fm > fhi)
            throw CorruptFoliationError("invert_y: non-monotone sample at x=" + decimal(x) +
                                        ", y=" + decimal(mid));
        double gm = fm - z;
        if (std::abs(gm) <= s.root_tol || mid == lo || mid == hi)
            return mid;
        if (gm < 0.0) {
            lo = mid;
            flo = fm;
            glo = gm;
            if (side == -1) ghi *= 0.5;
            side = -1;
        } else {
            hi = mid;
            fhi = fm;
            ghi = gm;
            if (side == 1) glo *= 0.5;
            side = 1;
        }
        if (hi - lo > 0.5 * last_width) side = 0, glo = flo - z, ghi = fhi - z;
        last_width = hi - lo;
    }
    throw PrecisionError("invert_y: root search did not converge within the iteration cap");
}

} // namespace

double invert_y(const Foliation& f, double x, double z, const EvalSettings& s)
{
    if (!(z >= 0.0 && z <= 1.0) || !(x >= 0.0 && x <= 1.0))
        throw InputError("invert_y: argument outside [0,1]");
    if (z == 0.0 || z == 1.0)
        return z;
    return bisect(f, x, z, 0.0, 1.0, 0.0, 1.0, s);
}

double invert_y(const Foliation& f, double x, double z, double guess, double width,
                const EvalSettings& s)
{
    if (!(z >= 0.0 && z <= 1.0) || !(x >= 0.0 && x <= 1.0))
        throw InputError("invert_y: argument outside [0,1]");
    if (z == 0.0 || z == 1.0)
        return z;
    double lo = std::max(0.0, guess - width), hi = std::min(1.0, guess + width);
    double flo = f.eval(x, lo), fhi = f.eval(x, hi);
    if (flo <= z && z <= fhi)
        return bisect(f, x, z, lo, hi, flo, fhi, s);
    return bisect(f, x, z, 0.0, 1.0, 0.0, 1.0, s);
}

Foliation identity() { return builtin("identity"); }
Foliation shear(double kappa) { return builtin("shear", {{"kappa", kappa}}); }
Foliation warp(double lambda) { return builtin("warp", {{"lambda", lambda}}); }

Foliation builtin(std::string_view name, const BuiltinParams& p)
{
    auto param = [&](const char* key, double fallback) {
        auto it = p.find(key);
        return it == p.end() ? fallback : it->second;
    };
    if (name == "identity")
        return Foliation(std::make_shared<IdentityNode>(declared_from(p, 1.0)));
    if (name == "shear") {
        double kappa = param("kappa", 1.0 / (8.0 * std::numbers::pi));
        double margin = 2.0 * std::numbers::pi * std::abs(kappa);
        if (!(margin < 1.0))
            throw ParameterError("shear: 2*pi*|kappa| must be < 1 for monotone leaves");
        double lip = std::max(1.0 + margin, 1.0 / (1.0 - margin));
        return Foliation(std::make_shared<ShearNode>(kappa, declared_from(p, lip)));
    }
    if (name == "warp") {
        double lambda = param("lambda", 0.5);
        if (!(std::abs(lambda) < 1.0))
            throw ParameterError("warp: |lambda| must be < 1 for monotone leaves");
        double lip = std::max(1.0 + std::abs(lambda), 1.0 / (1.0 - std::abs(lambda)));
        return Foliation(std::make_shared<WarpNode>(lambda, declared_from(p, lip)));
    }
    throw InputError("unknown builtin foliation '" + std::string(name) + "'");
}

Foliation grid_sampled(int nx, int ny, std::vector<double> v, HolderClass declared)
{
    if (nx < 1 || ny < 1 || v.size() != static_cast<std::size_t>(nx + 1) * (ny + 1))
        throw InputError("grid_sampled: value count does not match the grid");
    auto at = [&](int i, int j) { return v[static_cast<std::size_t>(i) * (ny + 1) + j]; };
    for (int i = 0; i <= nx; ++i) {
        if (at(i, 0) != 0.0 || at(i, ny) != 1.0)
            throw InputError("grid_sampled: leaves must pin f(x,0)=0 and f(x,1)=1");
        for (int j = 0; j < ny; ++j)
            if (at(i, j + 1) < at(i, j))
                throw InputError("grid_sampled: values must be non-decreasing in y");
    }
    for (int j = 0; j <= ny; ++j)
        if (std::abs(at(0, j) - static_cast<double>(j) / ny) > 1e-15)
            throw InputError("grid_sampled: column x=0 must be the identity");
    return Foliation(std::make_shared<GridNode>(nx, ny, std::move(v), declared));
}

Foliation sample_on_grid(const Foliation& f, int nx, int ny)
{
    std::vector<double> v(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j)
            v[static_cast<std::size_t>(i) * (ny + 1) + j] =
                i == 0 ? static_cast<double>(j) / ny : f.eval(static_cast<double>(i) / nx, static_cast<double>(j) / ny);
    return grid_sampled(nx, ny, std::move(v), f.declared());
}

} // namespace hfol
