#include "hfol/holder_metric.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hfol/errors.hpp"
#include "hfol/sweep.hpp"
#include "hfol/text.hpp"

namespace hfol {

namespace {

struct YPair {
    Abscissa lo, hi;
};

struct Triple {
    double x, y1, y2;
};

struct Samples {
    std::vector<double> xs;
    std::vector<YPair> ladder;
    std::vector<Triple> random;
    std::vector<double> ys;
};

double canonical(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

std::vector<int> rungs(const SampleScheme& s, bool with_extra)
{
    std::vector<int> ks;
    for (int k = 0; k <= s.ladder_k; ++k)
        ks.push_back(k);
    if (with_extra)
        for (int n : s.extra_levels)
            if (n > s.ladder_k)
                ks.push_back(n);
    return ks;
}

Samples build(const SampleScheme& s)
{
    Samples out;
    out.xs = scheme_x_grid(s);
    for (int k : rungs(s, true)) {
        double sep = std::ldexp(1.0, -k);
        bool extra = k > s.ladder_k;
        for (int j = 0; j < s.anchors; ++j) {
            Abscissa lo(static_cast<double>(j) / s.anchors);
            Abscissa hi = lo + sep;
            if (Abscissa(1.0) < hi)
                continue;
            out.ladder.push_back({lo, hi});
            // At the perturbation level also sample the second half-cell.
            Abscissa hi2 = hi + sep;
            if (extra && hi2 <= Abscissa(1.0))
                out.ladder.push_back({hi, hi2});
        }
    }
    std::mt19937_64 rng(s.seed);
    out.random.reserve(s.random_pairs);
    while (static_cast<int>(out.random.size()) < s.random_pairs) {
        double x = canonical(rng), a = canonical(rng), b = canonical(rng);
        if (a == b)
            continue;
        out.random.push_back({x, std::min(a, b), std::max(a, b)});
    }
    int ny = 4 * s.anchors;
    for (int j = 0; j <= ny; ++j)
        out.ys.push_back(static_cast<double>(j) / ny);
    return out;
}

// Point list (x, y) for the C0 terms: grid product plus the random points.
std::vector<std::pair<double, double>> c0_points(const Samples& smp)
{
    std::vector<std::pair<double, double>> pts;
    pts.reserve(smp.xs.size() * smp.ys.size() + 2 * smp.random.size());
    for (double x : smp.xs)
        for (double y : smp.ys)
            pts.emplace_back(x, y);
    for (const Triple& t : smp.random) {
        pts.emplace_back(t.x, t.y1);
        pts.emplace_back(t.x, t.y2);
    }
    return pts;
}

double c0_value(const Foliation& f, const Foliation& g, const Samples& smp, const EvalSettings& es)
{
    auto pts = c0_points(smp);
    return sweep::max_of(pts.size(), [&](std::size_t i) {
        return std::abs(f.eval(pts[i].first, pts[i].second) - g.eval(pts[i].first, pts[i].second));
    }, es.exec).value;
}

double dx_value(const Foliation& f, const Foliation& g, const Samples& smp, const EvalSettings& es)
{
    auto pts = c0_points(smp);
    return sweep::max_of(pts.size(), [&](std::size_t i) {
        return std::abs(f.eval_dx(pts[i].first, pts[i].second) - g.eval_dx(pts[i].first, pts[i].second));
    }, es.exec).value;
}

double forward_value(const Foliation& f, const Foliation& g, double alpha, const Samples& smp,
                     const EvalSettings& es)
{
    const std::size_t nl = smp.ladder.size();
    const std::size_t grid = smp.xs.size() * nl;
    auto quotient = [&](double x, const Abscissa& lo, const Abscissa& hi) {
        double d = std::abs(f.increment(x, lo, hi) - g.increment(x, lo, hi));
        return d / std::pow(hi - lo, alpha);
    };
    return sweep::max_of(grid + smp.random.size(), [&](std::size_t i) {
        if (i < grid) {
            const YPair& p = smp.ladder[i % nl];
            return quotient(smp.xs[i / nl], p.lo, p.hi);
        }
        const Triple& t = smp.random[i - grid];
        return quotient(t.x, Abscissa(t.y1), Abscissa(t.y2));
    }, es.exec).value;
}

double inverse_at(const Foliation& f, double x, double z, const EvalSettings& es)
{
    if (f.is_identity())
        return z;
    return invert_y(f, x, z, z, 0.0625, es);
}

double inverse_value(const Foliation& f, const Foliation& g, double alpha, const SampleScheme& s,
                     const Samples& smp, const EvalSettings& es)
{
    if (f.is_identity() && g.is_identity())
        return 0.0;
    // Ladder in z, capped where the root tolerance would dominate.
    std::vector<std::pair<double, double>> zpairs;
    std::vector<double> zs;
    int kmax = std::min(s.ladder_k, s.inverse_ladder_k);
    for (int k = 0; k <= kmax; ++k) {
        double sep = std::ldexp(1.0, -k);
        for (int j = 0; j < s.anchors; ++j) {
            double z0 = static_cast<double>(j) / s.anchors, z1 = z0 + sep;
            if (z1 > 1.0)
                continue;
            zpairs.emplace_back(z0, z1);
            zs.push_back(z0);
            zs.push_back(z1);
        }
    }
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
    const std::size_t nz = zs.size();
    std::vector<double> D = sweep::map(smp.xs.size() * nz, [&](std::size_t i) {
        double x = smp.xs[i / nz], z = zs[i % nz];
        return inverse_at(f, x, z, es) - inverse_at(g, x, z, es);
    }, es.exec);
    auto index = [&](double z) {
        return static_cast<std::size_t>(std::lower_bound(zs.begin(), zs.end(), z) - zs.begin());
    };
    const std::size_t np = zpairs.size();
    double grid_max = sweep::max_of(smp.xs.size() * np, [&](std::size_t i) {
        std::size_t xi = i / np;
        auto [z0, z1] = zpairs[i % np];
        double d = std::abs(D[xi * nz + index(z1)] - D[xi * nz + index(z0)]);
        return d / std::pow(z1 - z0, alpha);
    }, es.exec).value;
    double rand_max = sweep::max_of(smp.random.size(), [&](std::size_t i) {
        const Triple& t = smp.random[i];
        double d1 = inverse_at(f, t.x, t.y1, es) - inverse_at(g, t.x, t.y1, es);
        double d2 = inverse_at(f, t.x, t.y2, es) - inverse_at(g, t.x, t.y2, es);
        return std::abs(d2 - d1) / std::pow(t.y2 - t.y1, alpha);
    }, es.exec).value;
    return std::max(grid_max, rand_max);
}

void finish(NormEstimate& e, double refined)
{
    e.refined_value = refined;
    e.refinement_monotone = refined >= e.value;
}

} // namespace

std::vector<double> scheme_x_grid(const SampleScheme& s)
{
    std::vector<double> xs;
    for (int j = 0; j <= s.x_intervals; ++j)
        xs.push_back(static_cast<double>(j) / s.x_intervals);
    return xs;
}

SampleScheme SampleScheme::refined() const
{
    SampleScheme r = *this;
    r.x_intervals *= 2;
    r.ladder_k += 1;
    r.anchors *= 2;
    r.random_pairs *= 2;
    return r;
}

void SampleScheme::validate() const
{
    if (x_intervals < 1 || ladder_k < 0 || anchors < 1 || random_pairs < 0 || inverse_ladder_k < 0)
        throw ParameterError("SampleScheme: counts must be positive");
    for (int n : extra_levels)
        if (n < 1 || n > 62)
            throw ParameterError("SampleScheme: extra levels must lie in [1,62]");
}

std::string SampleScheme::describe() const
{
    std::ostringstream s;
    s << "x_intervals=" << x_intervals << " ladder_k=" << ladder_k << " anchors=" << anchors
      << " random_pairs=" << random_pairs << " inverse_ladder_k=" << inverse_ladder_k << " extra_levels=";
    for (std::size_t i = 0; i < extra_levels.size(); ++i)
        s << (i ? "," : "") << extra_levels[i];
    s << " seed=" << seed;
    return s.str();
}

std::string SampleScheme::digest() const { return hfol::digest(describe()); }

double NormEstimate::relative_change(double floor) const
{
    if (!has_refinement())
        return 0.0;
    return std::abs(refined_value - value) / std::max(std::abs(value), floor);
}

NormEstimate c0_distance(const Foliation& f, const Foliation& g, const SampleScheme& s,
                         const MetricOptions& opt)
{
    s.validate();
    NormEstimate e;
    e.scheme_digest = s.digest();
    e.value = c0_value(f, g, build(s), opt.settings);
    if (opt.refine)
        finish(e, c0_value(f, g, build(s.refined()), opt.settings));
    return e;
}

NormEstimate dx_distance(const Foliation& f, const Foliation& g, const SampleScheme& s,
                         const MetricOptions& opt)
{
    s.validate();
    NormEstimate e;
    e.scheme_digest = s.digest();
    e.value = dx_value(f, g, build(s), opt.settings);
    if (opt.refine)
        finish(e, dx_value(f, g, build(s.refined()), opt.settings));
    return e;
}

NormEstimate holder_seminorm(const std::function<double(double)>& h, double alpha,
                             const SampleScheme& s, const MetricOptions& opt)
{
    s.validate();
    auto run = [&](const SampleScheme& sc) {
        Samples smp = build(sc);
        std::size_t nl = smp.ladder.size();
        return sweep::max_of(nl + smp.random.size(), [&](std::size_t i) {
            double a, b;
            if (i < nl) {
                a = smp.ladder[i].lo.value();
                b = smp.ladder[i].hi.value();
            } else {
                a = smp.random[i - nl].y1;
                b = smp.random[i - nl].y2;
            }
            if (b <= a)
                return 0.0;
            return std::abs(h(b) - h(a)) / std::pow(b - a, alpha);
        }, opt.settings.exec).value;
    };
    NormEstimate e;
    e.scheme_digest = s.digest();
    e.value = run(s);
    if (opt.refine)
        finish(e, run(s.refined()));
    return e;
}

DistanceEstimate d_alpha(const Foliation& f, const Foliation& g, const HolderClass& hc,
                         const SampleScheme& s, const MetricOptions& opt)
{
    s.validate();
    const EvalSettings& es = opt.settings;
    auto run = [&](const SampleScheme& sc, DistanceEstimate& out) {
        Samples smp = build(sc);
        out.c0 = c0_value(f, g, smp, es);
        out.c0_dx = dx_value(f, g, smp, es);
        out.holonomy_forward = forward_value(f, g, hc.alpha, smp, es);
        out.holonomy_inverse = inverse_value(f, g, hc.alpha, sc, smp, es);
        return out.c0 + out.c0_dx + std::max(out.holonomy_forward, out.holonomy_inverse);
    };
    DistanceEstimate d;
    d.total.scheme_digest = s.digest();
    d.total.value = run(s, d);
    if (opt.refine) {
        DistanceEstimate r;
        finish(d.total, run(s.refined(), r));
    }
    return d;
}

BiHolderCertificate certify_bi_holder(const Foliation& f, const HolderClass& hc,
                                      const SampleScheme& s, double slack, const EvalSettings& es)
{
    s.validate();
    Samples smp = build(s);
    const std::size_t nl = smp.ladder.size();
    const std::size_t grid = smp.xs.size() * nl;
    const std::size_t total = grid + smp.random.size();
    auto pair_at = [&](std::size_t i) -> std::tuple<double, Abscissa, Abscissa> {
        if (i < grid)
            return {smp.xs[i / nl], smp.ladder[i % nl].lo, smp.ladder[i % nl].hi};
        const Triple& t = smp.random[i - grid];
        return {t.x, Abscissa(t.y1), Abscissa(t.y2)};
    };
    std::vector<double> df = sweep::map(total, [&](std::size_t i) {
        auto [x, lo, hi] = pair_at(i);
        return f.increment(x, lo, hi);
    }, es.exec);
    auto up = sweep::max_of(total, [&](std::size_t i) {
        auto [x, lo, hi] = pair_at(i);
        return std::abs(df[i]) / std::pow(hi - lo, hc.beta);
    }, Exec::serial);
    auto low = sweep::max_of(total, [&](std::size_t i) {
        auto [x, lo, hi] = pair_at(i);
        double dy = hi - lo;
        if (!(df[i] > 0.0))
            return std::numeric_limits<double>::infinity();
        return std::pow(dy, 1.0 / hc.beta) / df[i];
    }, Exec::serial);

    BiHolderCertificate c;
    c.upper = up.value;
    c.lower = low.value;
    c.declared_C = hc.C;
    c.beta = hc.beta;
    c.slack = slack;
    c.pairs = total;
    c.scheme_digest = s.digest();
    auto worst = [&](std::size_t i, double q) {
        auto [x, lo, hi] = pair_at(i);
        return WorstPair{x, lo.value(), hi.value(), q};
    };
    c.worst_upper = worst(up.index, up.value);
    c.worst_lower = worst(low.index, low.value);
    c.pass = c.upper <= hc.C * (1.0 + slack) && c.lower <= hc.C * (1.0 + slack);
    return c;
}

CauchyTable cauchy_probe(const std::vector<Foliation>& seq, const HolderClass& hc,
                         const SampleScheme& s, double xi0, bool successive_only,
                         const MetricOptions& opt)
{
    if (seq.size() < 2)
        throw InputError("cauchy_probe: need at least two foliations");
    const std::size_t n = seq.size();
    CauchyTable t;
    t.distance.assign(n, std::vector<double>(n, std::numeric_limits<double>::quiet_NaN()));
    MetricOptions o = opt;
    o.refine = false;
    for (std::size_t i = 0; i < n; ++i) {
        t.distance[i][i] = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (successive_only && j != i + 1)
                continue;
            double d = d_alpha(seq[i], seq[j], hc, s, o).total.value;
            t.distance[i][j] = t.distance[j][i] = d;
        }
    }
    t.pass = true;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double budget = std::ldexp(xi0, -static_cast<int>(k));
        t.successive.push_back(t.distance[k][k + 1]);
        t.budget.push_back(budget);
        bool ok = t.distance[k][k + 1] <= budget;
        t.within_budget.push_back(ok);
        t.pass = t.pass && ok;
    }
    return t;
}

} // namespace hfol
