#include "hfol/disintegration.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hfol/errors.hpp"
#include "hfol/quadrature.hpp"
#include "hfol/smoothing.hpp"
#include "hfol/sweep.hpp"
#include "hfol/text.hpp"

namespace hfol {

namespace {

void check_strip(int n, std::uint64_t i)
{
    if (n < 0 || n > 62)
        throw InputError("strip level must lie in [0,62]");
    if (i >> n)
        throw InputError("strip index " + std::to_string(i) + " out of range at level " + std::to_string(n));
}

double band_clearance(double r, int m)
{
    const double a = 1.0 / m, b = 1.0 - 1.0 / m;
    if (r < a)
        return a - r;
    if (r > b)
        return r - b;
    return -std::min(r - a, b - r);
}

} // namespace

double strip_measure_window(const Foliation& f, int n, std::uint64_t i, double a, double b,
                            const EvalSettings& es)
{
    check_strip(n, i);
    if (!(a >= 0.0 && b <= 1.0 && a <= b))
        throw InputError("strip window must lie inside [0,1]");
    const Abscissa lo = Abscissa::dyadic(i, n), hi = Abscissa::dyadic(i + 1, n);
    const FoliationNode& node = f.node();
    auto width = [&](double x) {
        double w = node.increment(x, lo, hi);
        if (w < 0.0)
            throw CorruptFoliationError("negative strip width at x=" + decimal(x) + ", level " + std::to_string(n));
        return w;
    };
    double tol = es.strip_rel_tol * std::ldexp(1.0, -n) * (b - a);
    return adaptive_simpson(width, a, b, tol, f.x_breakpoints(), es.simpson_max_depth).value;
}

double strip_measure(const Foliation& f, int n, std::uint64_t i, const EvalSettings& es)
{
    return strip_measure_window(f, n, i, 0.0, 1.0, es);
}

double strip_measure_in(const Foliation& f, int n, std::uint64_t i, const IntervalQ& I, const EvalSettings& es)
{
    return strip_measure_window(f, n, i, I.lo(), I.hi(), es);
}

MembershipReport membership_A(const Foliation& f, int n, int m, const IntervalQ& I, const MembershipOptions& opt)
{
    if (m < 2)
        throw ParameterError("membership: m must be at least 2");
    if (n < 0 || n > 62)
        throw ParameterError("membership: level must lie in [0,62]");
    MembershipReport rep;
    rep.n = n;
    rep.m = m;
    rep.I = I;
    const EvalSettings& es = opt.settings;

    if (n <= opt.enumerate_limit) {
        const std::size_t count = std::size_t{1} << n;
        auto meas = sweep::map(count, [&](std::size_t i) { return strip_measure(f, n, i, es); }, es.exec);
        auto in = sweep::map(count, [&](std::size_t i) { return strip_measure_in(f, n, i, I, es); }, es.exec);
        rep.method = "enumerated";
        rep.exhaustive = true;
        rep.clearance = std::numeric_limits<double>::infinity();
        rep.table.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            StripRow& r = rep.table[i];
            r.index = i;
            r.measure = meas[i];
            r.inside = in[i];
            r.ratio = in[i] / meas[i];
            double c = band_clearance(r.ratio, m);
            r.outside_band = c > 0.0;
            rep.clearance = std::min(rep.clearance, c);
        }
        rep.pass = rep.clearance > 0.0;
        return rep;
    }

    // Beyond enumeration: exact integration of a sample of strips, plus the
    // closed-form bound when f is a dyadic perturbation at this very level.
    std::vector<std::uint64_t> idx{0, 1, (std::uint64_t{1} << n) - 2, (std::uint64_t{1} << n) - 1};
    std::mt19937_64 rng(opt.seed);
    for (int k = 0; k < opt.samples; ++k)
        idx.push_back(rng() >> (64 - n));
    auto meas = sweep::map(idx.size(), [&](std::size_t k) { return strip_measure(f, n, idx[k], es); }, es.exec);
    auto in = sweep::map(idx.size(), [&](std::size_t k) { return strip_measure_in(f, n, idx[k], I, es); }, es.exec);
    rep.clearance = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < idx.size(); ++k) {
        StripRow r{idx[k], meas[k], in[k], in[k] / meas[k], false};
        double c = band_clearance(r.ratio, m);
        r.outside_band = c > 0.0;
        rep.clearance = std::min(rep.clearance, c);
        rep.table.push_back(r);
    }

    const DyadicPerturbedView* v = as_dyadic(f);
    if (v && v->params().n == n) {
        double q = opt.q;
        if (!(q >= 1.0)) {
            if (v->inner().is_identity()) {
                q = 1.0;
            } else {
                double L = estimate_lipschitz(v->inner(), 1.25, es).L;
                q = L * L;
            }
        }
        EnvelopeBounds env = envelope_bounds(v->profile(), q, I);
        rep.envelope = env;
        rep.clearance = std::min(rep.clearance, env.clearance(m));
        rep.method = "envelope";
        rep.exhaustive = true;
    } else {
        rep.method = "sampled";
        rep.exhaustive = false;
    }
    rep.pass = rep.clearance > 0.0;
    return rep;
}

std::optional<int> membership_B(const Foliation& f, int m, const IntervalQ& I, int n_max, const MembershipOptions& opt)
{
    if (n_max > 24)
        throw ParameterError("membership_B: n_max above 24 would need 2^n_max strip quadratures");
    for (int n = 1; n <= n_max; ++n)
        if (membership_A(f, n, m, I, opt).pass)
            return n;
    return std::nullopt;
}

RatioSequence ratio_sequence(const Foliation& f, double y_P, const IntervalQ& I, int n_min, int n_max,
                             const EvalSettings& es)
{
    if (!(y_P > 0.0 && y_P < 1.0))
        throw InputError("ratio_sequence: leaf parameter must lie in (0,1)");
    if (n_min < 0 || n_max > 62 || n_min > n_max)
        throw ParameterError("ratio_sequence: levels must satisfy 0 <= n_min <= n_max <= 62");
    RatioSequence rs;
    rs.y_P = y_P;
    rs.I = I;
    rs.rel_tol = es.strip_rel_tol;
    for (int n = n_min; n <= n_max; ++n) {
        // Lower-closed strips: a leaf on a dyadic line belongs to the strip above it.
        auto i = static_cast<std::uint64_t>(locate(Abscissa(y_P), n).index);
        RatioEntry e;
        e.n = n;
        e.index = i;
        e.measure = strip_measure(f, n, i, es);
        e.inside = strip_measure_in(f, n, i, I, es);
        e.ratio = e.inside / e.measure;
        rs.entries.push_back(e);
    }
    return rs;
}

AtomReport atom_locate(const Foliation& f, double y_P, int level, int depth, const EvalSettings& es)
{
    if (depth < 0 || depth > 12)
        throw ParameterError("atom_locate: depth must lie in [0,12]");
    if (!(y_P > 0.0 && y_P < 1.0))
        throw InputError("atom_locate: leaf parameter must lie in (0,1)");
    AtomReport rep;
    rep.y_P = y_P;
    rep.level = level;
    auto i = static_cast<std::uint64_t>(locate(Abscissa(y_P), level).index);
    double total = strip_measure(f, level, i, es);
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < depth; ++k) {
        double mid = 0.5 * (lo + hi);
        double left = strip_measure_window(f, level, i, lo, mid, es);
        double right = strip_measure_window(f, level, i, mid, hi, es);
        AtomStep st;
        st.tie = std::abs(left - right) <= 1e-9 * (left + right);
        if (st.tie || left >= right) {
            hi = mid;
            st.mass = left / total;
        } else {
            lo = mid;
            st.mass = right / total;
        }
        st.lo = lo;
        st.hi = hi;
        rep.steps.push_back(st);
    }
    rep.x_P = 0.5 * (lo + hi);
    rep.atom_y = f.eval(rep.x_P, y_P);
    rep.atomic = !rep.steps.empty() && rep.steps.back().mass > 0.9;
    return rep;
}

ACReport ac_report(const Foliation& f, const std::vector<double>& xs, double scale, int ny, const EvalSettings& es)
{
    if (!(scale > 0.0 && scale <= 0.5))
        throw ParameterError("ac_report: scale must lie in (0, 1/2]");
    ACReport rep;
    rep.scale = scale;
    std::vector<Abscissa> ys;
    for (int j = 0; j < ny; ++j) {
        Abscissa y(static_cast<double>(j) / ny);
        if (y + 2.0 * scale <= Abscissa(1.0)) {
            ys.push_back(y);
            ys.push_back(y + scale);
        }
    }
    if (ys.empty())
        throw ParameterError("ac_report: y grid is empty at this scale");
    const std::size_t nyp = ys.size();
    auto q = sweep::map(xs.size() * nyp, [&](std::size_t k) {
        const Abscissa& y = ys[k % nyp];
        return f.increment(xs[k / nyp], y, y + scale) / scale;
    }, es.exec);
    rep.global_min = std::numeric_limits<double>::infinity();
    rep.global_max = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        ACRow row;
        row.x = xs[i];
        row.min = *std::min_element(q.begin() + i * nyp, q.begin() + (i + 1) * nyp);
        row.max = *std::max_element(q.begin() + i * nyp, q.begin() + (i + 1) * nyp);
        row.ratio = row.max / row.min;
        rep.global_min = std::min(rep.global_min, row.min);
        rep.global_max = std::max(rep.global_max, row.max);
        rep.rows.push_back(row);
    }
    rep.global_ratio = rep.global_max / rep.global_min;
    if (rep.global_ratio <= 2.0)
        rep.hint = "bounded density: consistent with absolutely continuous holonomies (leafwise AC I)";
    else if (rep.global_ratio >= 50.0)
        rep.hint = "density ratio degenerates at this scale: signature of non-absolutely-continuous holonomy";
    else
        rep.hint = "inconclusive at this scale";
    return rep;
}

} // namespace hfol
