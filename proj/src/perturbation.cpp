#include "hfol/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hfol/errors.hpp"
#include "hfol/quadrature.hpp"
#include "hfol/text.hpp"

namespace hfol {

namespace {

double psi(double t)
{
    if (!(t > 0.0 && t < 1.0))
        return 0.0;
    return std::exp(-1.0 / (4.0 * t * (1.0 - t)));
}

// Cumulative integrals of psi over [0, 1/2] on a uniform table.
class BumpTable {
public:
    static constexpr int N = 2048;

    BumpTable() : cum_(N + 1, 0.0)
    {
        for (int i = 0; i < N; ++i)
            cum_[i + 1] = cum_[i] + local(node(i), node(i + 1));
        gamma_ = 2.0 * cum_[N];
    }

    double a(double x) const
    {
        if (x <= 0.0)
            return 0.0;
        if (x >= 1.0)
            return 1.0;
        if (x > 0.5)
            return 1.0 - a(1.0 - x);
        int i = std::min(static_cast<int>(x * 2.0 * N), N - 1);
        return (cum_[i] + local(node(i), x)) / gamma_;
    }

    double gamma() const { return gamma_; }

private:
    static double node(int i) { return 0.5 * i / N; }

    static double local(double lo, double hi)
    {
        const GaussRule& g = gauss_legendre(20);
        double h = 0.5 * (hi - lo), m = 0.5 * (hi + lo), s = 0.0;
        for (std::size_t j = 0; j < g.nodes.size(); ++j)
            s += g.weights[j] * psi(m + h * g.nodes[j]);
        return s * h;
    }

    std::vector<double> cum_;
    double gamma_ = 0.0;
};

const BumpTable& table()
{
    static const BumpTable t;
    return t;
}

} // namespace

double bump_a(double x) { return table().a(x); }
double bump_a_derivative(double x) { return psi(x) / table().gamma(); }
double bump_gamma() { return table().gamma(); }

// ---- ~a ------------------------------------------------------------------

BumpTilde::BumpTilde(double delta1, double delta2, IntervalQ I)
    : d1_(delta1), d2_(delta2), b1_(I.lo()), b2_(I.hi()), I_(I)
{
    if (!(d1_ > 0.0) || !(d2_ > 0.0 && d2_ < 0.5))
        throw ParameterError("bump profile: need delta1 > 0 and 0 < delta2 < 1/2");
    if (b1_ > 0.0 ? !(d1_ < 0.5 * b1_) : !(d1_ < b2_))
        throw ParameterError("bump profile: delta1 too large for the interval " + I.str());
    if (b2_ < 1.0 && !(b2_ + d1_ <= 1.0))
        throw ParameterError("bump profile: b2 + delta1 exceeds 1 for the interval " + I.str());
    knots_ = {0.0, d1_};
    if (b1_ > 0.0) {
        knots_.push_back(b1_ - d1_);
        knots_.push_back(b1_);
    }
    knots_.push_back(b2_);
    if (b2_ < 1.0)
        knots_.push_back(b2_ + d1_);
    knots_.push_back(1.0);
    std::sort(knots_.begin(), knots_.end());
    knots_.erase(std::unique(knots_.begin(), knots_.end()), knots_.end());
}

double BumpTilde::operator()(double x) const
{
    const double lo = d2_, hi = 1.0 - d2_, span = 1.0 - 2.0 * d2_;
    if (x < d1_)
        return b1_ > 0.0 ? 0.5 - (0.5 - d2_) * bump_a(x / d1_) : 0.5 + (0.5 - d2_) * bump_a(x / d1_);
    if (b1_ > 0.0) {
        if (x <= b1_ - d1_)
            return lo;
        if (x < b1_)
            return lo + span * bump_a((x - b1_ + d1_) / d1_);
    }
    if (x <= b2_)
        return hi;
    if (x < b2_ + d1_)
        return hi - span * bump_a((x - b2_) / d1_);
    return lo;
}

double BumpTilde::derivative(double x) const
{
    const double span = 1.0 - 2.0 * d2_;
    if (x < d1_)
        return (b1_ > 0.0 ? -1.0 : 1.0) * (0.5 - d2_) * bump_a_derivative(x / d1_) / d1_;
    if (b1_ > 0.0) {
        if (x <= b1_ - d1_)
            return 0.0;
        if (x < b1_)
            return span * bump_a_derivative((x - b1_ + d1_) / d1_) / d1_;
    }
    if (x <= b2_)
        return 0.0;
    if (x < b2_ + d1_)
        return -span * bump_a_derivative((x - b2_) / d1_) / d1_;
    return 0.0;
}

// ---- lema5 and the envelope ---------------------------------------------

std::array<double, 2> lema5_terms(double L3, double d1, double d2, double mu)
{
    const double L2 = L3 * L3;
    double den = 1.0 - mu - 3.0 * d1;
    double first = den > 0.0 ? L2 * d2 * mu / den : std::numeric_limits<double>::infinity();
    double second = L2 * (3.0 * d1 + d2 * den) / mu;
    return {first, second};
}

double EnvelopeBounds::clearance(int m) const
{
    const double a = 1.0 / m, b = 1.0 - 1.0 / m;
    auto one = [&](double lo, double hi) {
        if (hi < a)
            return a - hi;
        if (lo > b)
            return lo - b;
        return -std::min(hi - a, b - lo);
    };
    return std::min(one(even_lo, even_hi), one(odd_lo, odd_hi));
}

EnvelopeBounds envelope_bounds(const BumpTilde& p, double q) { return envelope_bounds(p, q, p.interval()); }

EnvelopeBounds envelope_bounds(const BumpTilde& p, double q, const IntervalQ& I)
{
    EnvelopeBounds e;
    e.q = q;
    auto f = [&](double x) { return p(x); };
    const double tol = 1e-15;
    std::vector<double> cuts = p.knots();
    cuts.push_back(I.lo());
    cuts.push_back(I.hi());
    e.A = adaptive_simpson(f, I.lo(), I.hi(), tol, cuts).value;
    e.B = adaptive_simpson(f, 0.0, I.lo(), tol, cuts).value + adaptive_simpson(f, I.hi(), 1.0, tol, cuts).value;
    e.Ac = I.length() - e.A;
    e.Bc = (1.0 - I.length()) - e.B;
    auto range = [q](double in, double out, double& lo, double& hi) {
        lo = in / (in + q * out);
        hi = q * in / (q * in + out);
    };
    range(e.A, e.B, e.even_lo, e.even_hi);
    range(e.Ac, e.Bc, e.odd_lo, e.odd_hi);
    return e;
}

DeltaChoice choose_deltas(double L3, int m, const IntervalQ& I)
{
    const double mu = I.length();
    if (!(mu > 0.0 && mu < 1.0))
        throw ParameterError("infeasible interval " + I.str() + ": lema5 needs 0 < mu(I) < 1");
    if (m < 2)
        throw ParameterError("choose_deltas: m must be at least 2");
    double d = std::min({1.0 / (8.0 * m * L3 * L3), (1.0 - mu) / 8.0, mu / 4.0});
    if (I.lo() > 0.0)
        d = std::min(d, I.lo() / 4.0);
    if (I.hi() < 1.0)
        d = std::min(d, (1.0 - I.hi()) / 4.0);
    const double target = 1.0 / (2.0 * m);
    for (int h = 0; h <= 80; ++h, d *= 0.5) {
        auto t = lema5_terms(L3, d, d, mu);
        if (std::max(t[0], t[1]) >= target)
            continue;
        EnvelopeBounds env = envelope_bounds(BumpTilde(d, d, I), L3 * L3);
        double clear = env.clearance(2 * m);
        if (clear > 0.0)
            return {d, d, t, clear, h};
    }
    throw ParameterError("choose_deltas: no feasible delta after 80 halvings for " + I.str());
}

// ---- lema4 ---------------------------------------------------------------

std::array<double, 4> lema4_condition4_terms(int n, const Lema4Inputs& in)
{
    const double b = in.hc.beta, a = in.hc.alpha, C = in.hc.C;
    return {
        in.L3 / std::exp2(n - 1),
        (4.0 * in.L3 / in.delta1 + 3.0 * in.K3) / std::exp2(n),
        3.0 * in.L3 / std::exp2(n * (1.0 - a) - 2.0),
        std::pow(C, 2.0 * b - a) / std::exp2((n - 1) * b * (b - a) - 1.0),
    };
}

ConditionValue lema4_condition(int which, int n, const Lema4Inputs& in)
{
    const double b = in.hc.beta, C = in.hc.C;
    switch (which) {
    case 1:
        return {in.L3 * (1.0 - in.delta2) / std::exp2(n * (1.0 - b) - 3.0) + in.C_eps, C};
    case 2:
        return {in.C_eps, 2.0 * std::exp2(n * (1.0 - 1.0 / b)) * in.L3 / in.delta2};
    case 3:
        return {std::exp2(n * (1.0 - 1.0 / b) + 2.0 / b) * in.L3 / in.delta2, C};
    case 4: {
        auto t = lema4_condition4_terms(n, in);
        return {std::max({t[0], t[1], t[2], t[3]}), in.xi / 12.0};
    }
    default:
        throw InputError("lema4 has conditions 1 to 4");
    }
}

int choose_n(const Lema4Inputs& in)
{
    in.hc.validate();
    if (!(in.C_eps < in.hc.C))
        throw ParameterError("choose_n: C_eps must be below C");
    for (int n = 1; n <= 64; ++n)
        if (lema4_condition(1, n, in).holds() && lema4_condition(3, n, in).holds() &&
            lema4_condition(4, n, in).holds())
            return n;
    std::string binding;
    for (int c : {1, 3, 4})
        if (!lema4_condition(c, 64, in).holds())
            binding += (binding.empty() ? "" : ", ") + std::string("(") + std::to_string(c) + ")";
    throw ParameterError("choose_n: no n <= 64 satisfies lema4; binding condition " + binding);
}

// ---- f~ ------------------------------------------------------------------

namespace {

// Position of leaf y inside its cell: leaves advance by s(t) of the cell width.
double s_of(double t, double p) { return t <= 1.0 ? t * p : p + (t - 1.0) * (1.0 - p); }
// Primitive of s in t.
double s_int(double t, double p)
{
    if (t <= 1.0)
        return 0.5 * p * t * t;
    double u = t - 1.0;
    return 0.5 * p + p * u + 0.5 * (1.0 - p) * u * u;
}
double ds_dp(double t) { return t <= 1.0 ? t : 2.0 - t; }

class DyadicNode final : public FoliationNode, public DyadicPerturbedView {
public:
    DyadicNode(Foliation inner, PerturbationParams pp, HolderClass hc)
        : FoliationNode(hc), inner_(std::move(inner)), pp_(pp), profile_(pp.delta1, pp.delta2, pp.I)
    {
        if (pp.n < 1 || pp.n > 62)
            throw ParameterError("dyadic perturbation level must lie in [1,62]");
    }

    Kind kind() const override { return Kind::dyadic_perturbed; }

    double value(double x, double y) const override
    {
        if (y <= 0.0)
            return 0.0;
        if (y >= 1.0)
            return 1.0;
        // Value differences keep eval continuous and monotone across cell
        // edges; increment() carries the fine-scale accuracy.
        Cell c = cell_of(Abscissa(y));
        const FoliationNode& f3 = inner_.node();
        double base = f3.value(x, c.lo.hi);
        return base + s_of(c.t, profile_(x)) * (f3.value(x, c.hi.hi) - base);
    }

    double dx(double x, double y) const override
    {
        Cell c = cell_of(Abscissa(std::clamp(y, 0.0, 1.0)));
        const FoliationNode& f3 = inner_.node();
        double p = profile_(x);
        double lo = f3.dx(x, c.lo.value()), hi = f3.dx(x, c.hi.value());
        return lo + s_of(c.t, p) * (hi - lo) + ds_dp(c.t) * profile_.derivative(x) * width(x, c);
    }

    double increment(double x, const Abscissa& lo, const Abscissa& hi) const override
    {
        if (!(lo < hi))
            return 0.0;
        Cell a = cell_of(lo);
        Cell b = cell_of(hi);
        if (b.t == 0.0 && b.index > a.index) {
            b = make_cell(b.index - 1, 2.0);
        }
        double p = profile_(x);
        if (a.index == b.index)
            return (s_of(b.t, p) - s_of(a.t, p)) * width(x, a);
        double mid = b.index > a.index + 1 ? inner_.node().increment(x, a.hi, b.lo) : 0.0;
        return s_of(b.t, p) * width(x, b) + mid + (1.0 - s_of(a.t, p)) * width(x, a);
    }

    double integral(double x, const Abscissa& lo, const Abscissa& hi) const override
    {
        if (!(lo < hi))
            return 0.0;
        Cell a = cell_of(lo);
        Cell b = cell_of(hi);
        if (b.t == 0.0 && b.index > a.index)
            b = make_cell(b.index - 1, 2.0);
        double p = profile_(x);
        if (a.index == b.index)
            return piece(x, a, a.t, b.t, p);
        double total = piece(x, a, a.t, 2.0, p) + piece(x, b, 0.0, b.t, p);
        std::int64_t first = a.index + 1, last = b.index - 1;
        if (last < first)
            return total;
        if (last - first < 256) {
            for (std::int64_t k = first; k <= last; ++k)
                total += piece(x, make_cell(k, 0.0), 0.0, 2.0, p);
            return total;
        }
        // Many cells: f3's own integral plus (H/2)(p - 1/2) times its
        // increment, with the first Euler-Maclaurin term of the left Riemann
        // sum. Cell widths sample f3' at midpoints, so the endpoint slopes get
        // a half-cell correction from the neighbouring widths.
        const FoliationNode& f3 = inner_.node();
        const double H = std::ldexp(1.0, -(pp_.n - 1));
        Cell c0 = make_cell(first, 0.0), c1 = make_cell(last, 0.0);
        double w0 = width(x, c0), w1 = width(x, c1);
        double w0n = width(x, make_cell(first + 1, 0.0)), w1p = width(x, make_cell(last - 1, 0.0));
        total += f3.integral(x, c0.lo, c1.hi) + 0.5 * H * (p - 0.5) * f3.increment(x, c0.lo, c1.hi) +
                 H / 12.0 * (w1 - w0) + H / 24.0 * ((w1 - w1p) + (w0n - w0));
        return total;
    }

    void x_breakpoints(std::vector<double>& out) const override
    {
        out.insert(out.end(), profile_.knots().begin(), profile_.knots().end());
        inner_.node().x_breakpoints(out);
    }

    NodeDescription describe() const override
    {
        NodeDescription d{"dyadic", {}, {inner_.ptr()}};
        d.params["delta1"] = hexfloat(pp_.delta1);
        d.params["delta2"] = hexfloat(pp_.delta2);
        d.params["n"] = std::to_string(pp_.n);
        d.params["interval"] = pp_.I.str();
        d.params["C"] = hexfloat(declared().C);
        d.params["beta"] = hexfloat(declared().beta);
        d.params["alpha"] = hexfloat(declared().alpha);
        return d;
    }

    const PerturbationParams& params() const override { return pp_; }
    const BumpTilde& profile() const override { return profile_; }
    const Foliation& inner() const override { return inner_; }
    double cell_width(double x, std::uint64_t a) const override
    {
        return width(x, make_cell(static_cast<std::int64_t>(a), 0.0));
    }

private:
    // Cell [2a/2^n, (2a+2)/2^n] and the offset t in [0,2].
    struct Cell {
        std::int64_t index;
        double t;
        Abscissa lo, hi;
    };

    Cell make_cell(std::int64_t a, double t) const
    {
        return {a, t, Abscissa::dyadic(static_cast<std::uint64_t>(a), pp_.n - 1),
                Abscissa::dyadic(static_cast<std::uint64_t>(a + 1), pp_.n - 1)};
    }

    Cell cell_of(const Abscissa& y) const
    {
        DyadicLocation loc = locate(y, pp_.n - 1);
        const std::int64_t last = (std::int64_t{1} << (pp_.n - 1)) - 1;
        if (loc.index > last)
            return make_cell(last, 2.0);   // y = 1 sits at t = 2 of the last cell
        return make_cell(loc.index, 2.0 * loc.frac);
    }

    double width(double x, const Cell& c) const { return inner_.node().increment(x, c.lo, c.hi); }

    // Integral over the offsets [t1, t2] of one cell, where f~ is piecewise linear.
    double piece(double x, const Cell& c, double t1, double t2, double p) const
    {
        if (!(t1 < t2))
            return 0.0;
        const double half = std::ldexp(1.0, -pp_.n);
        double base = inner_.node().value(x, c.lo.hi);
        return half * ((t2 - t1) * base + width(x, c) * (s_int(t2, p) - s_int(t1, p)));
    }

    Foliation inner_;
    PerturbationParams pp_;
    BumpTilde profile_;
};

} // namespace

Foliation dyadic_perturb(const Foliation& f3, const PerturbationParams& pp, HolderClass declared)
{
    return Foliation(std::make_shared<DyadicNode>(f3, pp, declared));
}

const DyadicPerturbedView* as_dyadic(const Foliation& f) { return f.as<DyadicPerturbedView>(); }

} // namespace hfol
