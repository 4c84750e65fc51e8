#include "hfol/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace hfol {

namespace {

GaussRule build_rule(int n)
{
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        r.nodes[n / 2] = 0.0;
    return r;
}

struct Panel {
    double a, b, fa, fm, fb, whole;
};

double simpson(double a, double b, double fa, double fm, double fb)
{
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

void refine(const std::function<double(double)>& g, const Panel& p, double tol, int depth,
            SimpsonResult& out)
{
    double m = 0.5 * (p.a + p.b);
    double lm = 0.5 * (p.a + m), rm = 0.5 * (m + p.b);
    double flm = g(lm), frm = g(rm);
    out.evaluations += 2;
    double left = simpson(p.a, m, p.fa, flm, p.fm);
    double right = simpson(m, p.b, p.fm, frm, p.fb);
    double diff = left + right - p.whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) {
        if (depth <= 0 && std::abs(diff) > 15.0 * tol)
            out.depth_limited = true;
        out.value += left + right + diff / 15.0;
        out.error_estimate += std::abs(diff) / 15.0;
        return;
    }
    refine(g, {p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1, out);
    refine(g, {m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1, out);
}

} // namespace

const GaussRule& gauss_legendre(int n)
{
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot)
        slot = std::make_unique<GaussRule>(build_rule(n));
    return *slot;
}

SimpsonResult adaptive_simpson(const std::function<double(double)>& g, double a, double b,
                               double tol, std::vector<double> breakpoints, int max_depth,
                               int initial_panels)
{
    SimpsonResult out;
    if (!(b > a))
        return out;
    std::vector<double> cuts{a, b};
    for (double c : breakpoints)
        if (c > a && c < b)
            cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // Subdivide each piece uniformly, then adapt.
    std::vector<double> edges;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double lo = cuts[k], hi = cuts[k + 1];
        int pieces = std::max(1, static_cast<int>(std::ceil(initial_panels * (hi - lo) / (b - a))));
        for (int j = 0; j < pieces; ++j)
            edges.push_back(lo + (hi - lo) * j / pieces);
    }
    edges.push_back(b);

    double fa = g(edges.front());
    out.evaluations = 1;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        double lo = edges[k], hi = edges[k + 1];
        double mid = 0.5 * (lo + hi);
        double fm = g(mid), fb = g(hi);
        out.evaluations += 2;
        Panel p{lo, hi, fa, fm, fb, simpson(lo, hi, fa, fm, fb)};
        refine(g, p, tol * (hi - lo) / (b - a), max_depth, out);
        fa = fb;
    }
    return out;
}

} // namespace hfol
