#include "hfol/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hfol/errors.hpp"
#include "hfol/quadrature.hpp"
#include "hfol/sweep.hpp"
#include "hfol/text.hpp"

namespace hfol {

double bump_profile(double u)
{
    if (!(u > -1.0 && u < 1.0))
        return 0.0;
    return std::exp(1.0 / (u * u - 1.0));
}

Mollifier Mollifier::make(double r, int nodes)
{
    if (!(r > 0.0))
        throw ParameterError("mollifier: radius must be positive");
    const GaussRule& g = gauss_legendre(nodes);
    Mollifier m;
    m.r = r;
    double mass = 0.0;
    for (int j = 0; j < nodes; ++j)
        mass += g.weights[j] * bump_profile(g.nodes[j]);
    m.c = 1.0 / mass;
    m.t.resize(nodes);
    m.w.resize(nodes);
    m.dw.resize(nodes);
    for (int j = 0; j < nodes; ++j) {
        double u = g.nodes[j], q = u * u - 1.0;
        m.t[j] = r * u;
        m.w[j] = m.c * g.weights[j] * bump_profile(u);
        // d/dt of (c/r) exp(1/((t/r)^2-1)) integrated against dt = r du
        m.dw[j] = m.w[j] * (-2.0 * u / (q * q)) / r;
    }
    // Match the value rule: sum dw t = -sum w = -1, as integration by parts gives.
    double moment = 0.0;
    for (int j = 0; j < nodes; ++j)
        moment += m.dw[j] * m.t[j];
    for (double& d : m.dw)
        d /= -moment;
    return m;
}

double Mollifier::operator()(double t) const { return c / r * bump_profile(t / r); }

// ---- reflection ----------------------------------------------------------

double ExtendedEvaluator::value(double x, double y) const
{
    const FoliationNode& n = f_.node();
    if (y < 0.0)
        return -n.value(x, -y);
    if (y > 1.0)
        return 2.0 - n.value(x, 2.0 - y);
    return n.value(x, y);
}

double ExtendedEvaluator::dx(double x, double y) const
{
    const FoliationNode& n = f_.node();
    if (y < 0.0)
        return -n.dx(x, -y);
    if (y > 1.0)
        return -n.dx(x, 2.0 - y);
    return n.dx(x, y);
}

double ExtendedEvaluator::increment(double x, const Abscissa& lo, const Abscissa& hi) const
{
    const FoliationNode& n = f_.node();
    const Abscissa zero(0.0), one(1.0);
    double total = 0.0;
    if (lo < zero) {
        Abscissa b = hi < zero ? hi : zero;
        total += n.increment(x, -b, -lo);
    }
    Abscissa a = lo < zero ? zero : lo;
    Abscissa b = one < hi ? one : hi;
    if (a < b)
        total += n.increment(x, a, b);
    if (one < hi) {
        Abscissa a1 = lo < one ? one : lo;
        total += n.increment(x, hi.reflect_one(), a1.reflect_one());
    }
    return total;
}

double ExtendedEvaluator::integral(double x, const Abscissa& lo, const Abscissa& hi) const
{
    const FoliationNode& n = f_.node();
    const Abscissa zero(0.0), one(1.0);
    double total = 0.0;
    if (lo < zero) {
        Abscissa b = hi < zero ? hi : zero;
        total -= n.integral(x, -b, -lo);
    }
    Abscissa a = lo < zero ? zero : lo;
    Abscissa b = one < hi ? one : hi;
    if (a < b)
        total += n.integral(x, a, b);
    if (one < hi) {
        Abscissa a1 = lo < one ? one : lo;
        total += 2.0 * (hi - a1) - n.integral(x, hi.reflect_one(), a1.reflect_one());
    }
    return total;
}

ExtendedEvaluator reflect_extend(const Foliation& f) { return ExtendedEvaluator(f); }

// ---- mollified node ------------------------------------------------------

namespace {

bool has_dyadic(const FoliationNode& n)
{
    if (n.kind() == Kind::dyadic_perturbed)
        return true;
    for (const NodePtr& in : n.describe().inputs)
        if (has_dyadic(*in))
            return true;
    return false;
}

class MollifiedNode final : public FoliationNode {
public:
    MollifiedNode(Foliation inner, double r, int nodes)
        : FoliationNode(inner.declared()), ext_(inner), inner_(std::move(inner)), k_(Mollifier::make(r, nodes)),
          fine_(has_dyadic(inner_.node()))
    {
    }
    Kind kind() const override { return Kind::mollified; }
    bool is_identity() const override { return inner_.is_identity(); }
    double value(double x, double y) const override
    {
        if (inner_.is_identity() || y <= 0.0 || y >= 1.0)
            return std::clamp(y, 0.0, 1.0);
        double s = 0.0;
        for (std::size_t j = 0; j < k_.t.size(); ++j)
            s += k_.w[j] * ext_.value(x, y - k_.t[j]);
        return s;
    }
    double dx(double x, double y) const override
    {
        if (inner_.is_identity())
            return 0.0;
        double s = 0.0;
        for (std::size_t j = 0; j < k_.t.size(); ++j)
            s += k_.w[j] * ext_.dx(x, y - k_.t[j]);
        return s;
    }
    double increment(double x, const Abscissa& lo, const Abscissa& hi) const override
    {
        if (inner_.is_identity())
            return hi - lo;
        double s = 0.0;
        if (!fine_) {
            for (std::size_t j = 0; j < k_.t.size(); ++j)
                s += k_.w[j] * ext_.increment(x, lo - k_.t[j], hi - k_.t[j]);
            return s;
        }
        // Dyadic inner structure is far finer than the node spacing, so the
        // derivative goes on the kernel: f2(hi) - f2(lo) is the integral of
        // J(lo - t, hi - t) phi_r'(t) dt with J the y-integral of f1.
        for (std::size_t j = 0; j < k_.t.size(); ++j)
            s += k_.dw[j] * ext_.integral(x, lo - k_.t[j], hi - k_.t[j]);
        return s;
    }
    double integral(double x, const Abscissa& lo, const Abscissa& hi) const override
    {
        if (inner_.is_identity())
            return (hi - lo) * 0.5 * (hi.value() + lo.value());
        double s = 0.0;
        for (std::size_t j = 0; j < k_.t.size(); ++j)
            s += k_.w[j] * ext_.integral(x, lo - k_.t[j], hi - k_.t[j]);
        return s;
    }
    void x_breakpoints(std::vector<double>& out) const override { inner_.node().x_breakpoints(out); }
    NodeDescription describe() const override
    {
        NodeDescription d{"mollified", {}, {inner_.ptr()}};
        d.params["r"] = hexfloat(k_.r);
        d.params["nodes"] = std::to_string(k_.t.size());
        return d;
    }

private:
    ExtendedEvaluator ext_;
    Foliation inner_;
    Mollifier k_;
    bool fine_;
};

class InterpolatedNode final : public FoliationNode {
public:
    InterpolatedNode(Foliation inner, double eps, HolderClass hc)
        : FoliationNode(hc), inner_(std::move(inner)), eps_(eps)
    {
    }
    Kind kind() const override { return Kind::identity_interpolated; }
    bool is_identity() const override { return inner_.is_identity(); }
    double value(double x, double y) const override
    {
        if (inner_.is_identity())
            return y;
        return (1.0 - eps_) * inner_.node().value(x, y) + eps_ * y;
    }
    double dx(double x, double y) const override
    {
        if (inner_.is_identity())
            return 0.0;
        return (1.0 - eps_) * inner_.node().dx(x, y);
    }
    double increment(double x, const Abscissa& lo, const Abscissa& hi) const override
    {
        if (inner_.is_identity())
            return hi - lo;
        return (1.0 - eps_) * inner_.node().increment(x, lo, hi) + eps_ * (hi - lo);
    }
    double integral(double x, const Abscissa& lo, const Abscissa& hi) const override
    {
        double id = (hi - lo) * 0.5 * (hi.value() + lo.value());
        if (inner_.is_identity())
            return id;
        return (1.0 - eps_) * inner_.node().integral(x, lo, hi) + eps_ * id;
    }
    void x_breakpoints(std::vector<double>& out) const override { inner_.node().x_breakpoints(out); }
    NodeDescription describe() const override
    {
        NodeDescription d{"interpolated", {}, {inner_.ptr()}};
        d.params["epsilon"] = hexfloat(eps_);
        d.params["C"] = hexfloat(declared().C);
        return d;
    }

private:
    Foliation inner_;
    double eps_;
};

} // namespace

// ---- parameter selection -------------------------------------------------

double r_cap(const HolderClass& hc, double xi, std::array<double, 3>* terms)
{
    hc.validate();
    if (!(xi > 0.0))
        throw ParameterError("xi must be positive");
    const double C = hc.C, b = hc.beta, a = hc.alpha;
    std::array<double, 3> t{
        std::pow(xi / (12.0 * C), 1.0 / b),
        std::pow(xi / (24.0 * C), 1.0 / (b - a)),
        xi / 24.0 * std::pow(xi / (12.0 * std::pow(C, b)), a / (b - a)),
    };
    if (terms)
        *terms = t;
    return std::min({t[0], t[1], t[2]});
}

double c_eps(double C, double eps) { return std::max(C * (1.0 - eps) + eps, C / (1.0 - eps + C * eps)); }

double dx_modulus(const Foliation& f, double r, const SmoothingOptions& opt)
{
    if (f.is_identity())
        return 0.0;
    std::vector<double> xs;
    for (int j = 0; j <= opt.modulus_x; ++j)
        xs.push_back(static_cast<double>(j) / opt.modulus_x);
    for (double b : f.x_breakpoints())
    {
        for (double d : {-0.5 * r, -0.25 * r, -0.125 * r})
            if (b + d >= 0.0 && b + d <= 1.0)
                xs.push_back(b + d);
        // Once r is below the spacing of doubles, compare across one ulp.
        xs.push_back(std::nextafter(b, 0.0));
    }
    const std::array<double, 3> steps{r, 0.5 * r, 0.25 * r};
    const std::size_t ny = static_cast<std::size_t>(opt.modulus_y) + 1;
    const std::size_t per_x = steps.size() * ny;
    return sweep::max_of(xs.size() * per_x, [&](std::size_t i) {
        double x = xs[i / per_x];
        double h = steps[(i % per_x) / ny];
        double y = static_cast<double>(i % ny) / opt.modulus_y;
        double x2 = x + h <= 1.0 ? x + h : x - h;
        if (x2 == x)
            x2 = x < 1.0 ? std::nextafter(x, 2.0) : std::nextafter(x, 0.0);
        return std::abs(f.eval_dx(x2, y) - f.eval_dx(x, y));
    }, opt.settings.exec).value;
}

MollifyParams choose_r(const Foliation& f, const HolderClass& hc, double xi, const SmoothingOptions& opt)
{
    MollifyParams mp;
    mp.nodes = opt.settings.mollifier_nodes;
    mp.r_cap = r_cap(hc, xi, &mp.cap_terms);
    mp.r = mp.r_cap;
    for (mp.halvings = 0; mp.halvings <= 60; ++mp.halvings) {
        mp.modulus = dx_modulus(f, mp.r, opt);
        if (mp.modulus <= xi / 12.0)
            return mp;
        mp.r *= 0.5;
    }
    throw ParameterError("choose_r: modulus of df/dx stays above xi/12 after 60 halvings "
                         "(input is not uniformly C1 in x)");
}

Foliation mollify(const Foliation& f, const MollifyParams& mp, const EvalSettings& es)
{
    auto node = std::make_shared<MollifiedNode>(f, mp.r, mp.nodes);
    Foliation out(node);
    if (f.is_identity())
        return out;
    // Doubling self-check on a fixed probe set, including both boundary layers.
    Foliation twice(std::make_shared<MollifiedNode>(f, mp.r, 2 * mp.nodes));
    std::vector<std::pair<double, double>> probes;
    for (int i = 0; i <= 8; ++i)
        for (double y : {0.5 * mp.r, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0 - 0.5 * mp.r})
            probes.emplace_back(i / 8.0, y);
    double drift = sweep::max_of(probes.size(), [&](std::size_t i) {
        auto [x, y] = probes[i];
        return std::abs(out.eval(x, y) - twice.eval(x, y));
    }, es.exec).value;
    if (drift > es.drift_tol)
        throw PrecisionError("mollify: quadrature drift " + decimal(drift, 3) + " exceeds " +
                             decimal(es.drift_tol, 3) + " when doubling nodes");
    return out;
}

InterpolationParams interpolation_params(double epsilon, double C)
{
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw ParameterError("interpolation: epsilon must lie in (0,1]");
    InterpolationParams ip;
    ip.epsilon = epsilon;
    ip.C_eps = c_eps(C, epsilon);
    return ip;
}

InterpolationParams choose_epsilon(const Foliation& f2, const HolderClass& hc, double xi,
                                   const SmoothingOptions& opt)
{
    hc.validate();
    MetricOptions mo{false, opt.settings};
    double dxn = f2.is_identity() ? 0.0 : dx_distance(f2, identity(), opt.scheme, mo).value;
    const double inf = std::numeric_limits<double>::infinity();
    std::array<double, 4> t{
        xi / 12.0,
        dxn > 0.0 ? xi / (12.0 * dxn) : inf,
        xi / (12.0 * (1.0 + hc.C)),
        std::pow(xi / (24.0 * std::pow(hc.C, hc.beta)), 1.0 / (hc.beta - hc.alpha)),
    };
    double eps = std::min({t[0], t[1], t[2], t[3]});
    InterpolationParams ip = interpolation_params(std::min(eps, 1.0), hc.C);
    ip.dx_norm = dxn;
    ip.terms = t;
    return ip;
}

Foliation interpolate_identity(const Foliation& f2, const InterpolationParams& ip)
{
    HolderClass hc = f2.declared();
    hc.C = ip.C_eps;
    return Foliation(std::make_shared<InterpolatedNode>(f2, ip.epsilon, hc));
}

LipschitzEstimates estimate_lipschitz(const Foliation& f3, double safety, const EvalSettings& es,
                                      int finest_level)
{
    LipschitzEstimates le;
    le.safety = safety;
    le.finest_level = finest_level;
    std::vector<double> xs;
    for (int j = 0; j <= 32; ++j)
        xs.push_back(j / 32.0);
    for (double b : f3.x_breakpoints())
        xs.push_back(b);
    struct P {
        Abscissa lo, hi;
    };
    std::vector<P> pairs;
    for (int k = 1; k <= finest_level; ++k) {
        double sep = std::ldexp(1.0, -k);
        for (int i = 0; i < 64; ++i) {
            Abscissa lo(i / 64.0);
            Abscissa hi = lo + sep;
            if (hi <= Abscissa(1.0))
                pairs.push_back({lo, hi});
        }
    }
    const std::size_t np = pairs.size();
    auto L = sweep::max_of(xs.size() * np, [&](std::size_t i) {
        double x = xs[i / np];
        const P& p = pairs[i % np];
        double dy = p.hi - p.lo;
        double df = f3.increment(x, p.lo, p.hi);
        if (!(df > 0.0))
            throw CorruptFoliationError("estimate_lipschitz: non-increasing leaf parameter at x=" + decimal(x));
        return std::max(df / dy, dy / df);
    }, es.exec);
    auto K = sweep::max_of(xs.size() * np, [&](std::size_t i) {
        if (f3.is_identity())
            return 0.0;
        double x = xs[i / np];
        const P& p = pairs[i % np];
        return std::abs(f3.eval_dx(x, p.hi.value()) - f3.eval_dx(x, p.lo.value())) / (p.hi - p.lo);
    }, es.exec);
    le.L_raw = L.value;
    le.K_raw = K.value;
    le.L = safety * le.L_raw;
    le.K = safety * le.K_raw;
    return le;
}

} // namespace hfol
