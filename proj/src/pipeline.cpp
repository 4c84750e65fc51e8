#include "hfol/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "hfol/errors.hpp"

namespace hfol {

bool Certificate::pass() const
{
    return std::all_of(rows.begin(), rows.end(), [](const CertificateRow& r) { return r.pass(); });
}

std::vector<const CertificateRow*> Certificate::failures() const
{
    std::vector<const CertificateRow*> out;
    for (const auto& r : rows)
        if (!r.pass()) out.push_back(&r);
    return out;
}

namespace {

void add(Certificate& c, std::string name, double lhs, double rhs, bool strict, bool enforced = true)
{
    c.rows.push_back({std::move(name), lhs, rhs, strict, enforced});
}

void add_bi_holder(Certificate& c, const std::string& who, const BiHolderCertificate& b)
{
    double bound = b.declared_C * (1.0 + b.slack);
    add(c, who + ".bi_holder.upper", b.upper, bound, false);
    add(c, who + ".bi_holder.lower", b.lower, bound, false);
}

// Conservative stage distance: the larger of the base and refined sup estimates.
double stage_value(const DistanceEstimate& d)
{
    return d.total.has_refinement() ? std::max(d.total.value, d.total.refined_value) : d.total.value;
}

void add_distance(Certificate& c, const std::string& name, const DistanceEstimate& d, double bound,
                  const PipelineOptions& opt, double xi)
{
    add(c, name, stage_value(d), bound, true);
    if (opt.refine_distances && d.total.has_refinement())
        add(c, name + ".stability", d.total.relative_change(1e-3 * xi), opt.stability_gate, false);
}

DistanceEstimate distance(const Foliation& f, const Foliation& g, const HolderClass& hc,
                          const PipelineOptions& opt)
{
    MetricOptions mo;
    mo.refine = opt.refine_distances;
    mo.settings = opt.settings;
    return d_alpha(f, g, hc, opt.scheme, mo);
}

// Is f already in B_{m,I} at a checkable level?
std::optional<MembershipReport> precheck(const Foliation& f, int m, const IntervalQ& I,
                                         const PipelineOptions& opt)
{
    MembershipOptions mo = opt.membership;
    mo.settings = opt.settings;
    if (const auto* v = as_dyadic(f)) {
        const auto& pp = v->params();
        if (pp.I.b1 == I.b1 && pp.I.b2 == I.b2) {
            MembershipReport r = membership_A(f, pp.n, m, I, mo);
            if (r.pass && r.exhaustive) return r;
        }
    }
    for (int n = 1; n <= opt.precheck_levels; ++n) {
        MembershipReport r = membership_A(f, n, m, I, mo);
        if (r.pass && r.exhaustive) return r;
    }
    return std::nullopt;
}

} // namespace

PipelineResult construct_in_B(const Foliation& f, const HolderClass& hc, double xi, int m,
                              const IntervalQ& I, const PipelineOptions& opt)
{
    hc.validate();
    opt.settings.validate();
    opt.scheme.validate();
    if (!(xi > 0.0) || !std::isfinite(xi)) throw ParameterError("xi must be positive");
    if (m < 2) throw ParameterError("m must be at least 2");
    if (!(I.lo() < I.hi())) throw ParameterError("empty interval " + I.str());
    // A full-width interval gives every strip ratio 1; the construction needs 0 < |I| < 1.
    if (!(I.length() < 1.0)) throw ParameterError("infeasible interval " + I.str());

    PipelineResult res;
    Certificate& c = res.cert;
    c.hc = hc;
    c.xi = xi;
    c.m = m;
    c.I = I;
    c.scheme = opt.scheme.describe();
    c.scheme_digest = opt.scheme.digest();
    c.settings_digest = opt.settings.digest();

    c.input_cert = certify_bi_holder(f, hc, opt.scheme, opt.slack, opt.settings);
    add_bi_holder(c, "input", c.input_cert);

    if (auto pre = precheck(f, m, I, opt)) {
        c.short_circuited = true;
        c.membership = *pre;
        add(c, "membership.clearance", 0.0, pre->clearance, true);
        res.f2 = res.f3 = res.ft = f;
        return res;
    }

    // Stage 1: mollify.
    SmoothingOptions so = opt.smoothing;
    so.settings = opt.settings;
    so.scheme = opt.scheme;
    c.mollify = choose_r(f, hc, xi, so);
    add(c, "smoothing.r", c.mollify.r, c.mollify.r_cap, false);
    add(c, "smoothing.modulus", c.mollify.modulus, xi / 12.0, false);
    res.f2 = mollify(f, c.mollify, opt.settings);
    c.d_f_f2 = distance(f, res.f2, hc, opt);
    add_distance(c, "distance.f.f2", c.d_f_f2, xi / 3.0, opt, xi);
    c.f2_cert = certify_bi_holder(res.f2, hc, opt.scheme, opt.slack, opt.settings);
    add_bi_holder(c, "f2", c.f2_cert);

    // Stage 2: interpolate with the identity.
    c.interpolation = choose_epsilon(res.f2, hc, xi, so);
    res.f3 = interpolate_identity(res.f2, c.interpolation);
    add(c, "interpolation.C_eps", c.interpolation.C_eps, hc.C, true);
    c.d_f2_f3 = distance(res.f2, res.f3, hc, opt);
    add_distance(c, "distance.f2.f3", c.d_f2_f3, xi / 3.0, opt, xi);
    HolderClass hc_eps = hc;
    hc_eps.C = c.interpolation.C_eps;
    c.f3_cert = certify_bi_holder(res.f3, hc_eps, opt.scheme, opt.slack, opt.settings);
    add_bi_holder(c, "f3", c.f3_cert);

    // Stage 3: dyadic perturbation.
    c.lipschitz = estimate_lipschitz(res.f3, 1.25, opt.settings);
    c.deltas = choose_deltas(c.lipschitz.L, m, I);
    add(c, "perturbation.lema5", std::max(c.deltas.lema5[0], c.deltas.lema5[1]), 1.0 / m, true);
    add(c, "perturbation.envelope", 0.0, c.deltas.envelope_clearance, true);

    Lema4Inputs li;
    li.delta1 = c.deltas.delta1;
    li.delta2 = c.deltas.delta2;
    li.L3 = c.lipschitz.L;
    li.K3 = c.lipschitz.K;
    li.C_eps = c.interpolation.C_eps;
    li.xi = xi;
    li.hc = hc;
    int n = choose_n(li);
    for (int which = 1; which <= 4; ++which) {
        ConditionValue cv = lema4_condition(which, n, li);
        add(c, "perturbation.condition" + std::to_string(which), cv.lhs, cv.rhs, false, which != 2);
    }

    c.perturbation = {c.deltas.delta1, c.deltas.delta2, n, I};
    res.ft = dyadic_perturb(res.f3, c.perturbation, hc);
    c.d_f3_ft = distance(res.f3, res.ft, hc, opt);
    add_distance(c, "distance.f3.ft", c.d_f3_ft, xi / 3.0, opt, xi);

    SampleScheme fine = opt.scheme;
    for (int k : {n - 1, n, n + 1})
        if (k > opt.scheme.ladder_k && k <= 62) fine.extra_levels.push_back(k);
    c.ft_cert = certify_bi_holder(res.ft, hc, fine, opt.slack, opt.settings);
    add_bi_holder(c, "ft", c.ft_cert);

    MembershipOptions mo = opt.membership;
    mo.settings = opt.settings;
    if (!(mo.q >= 1.0)) mo.q = res.f3.is_identity() ? 1.0 : c.lipschitz.L * c.lipschitz.L;
    c.membership = membership_A(res.ft, n, m, I, mo);
    add(c, "membership.clearance", 0.0, c.membership.clearance, true);

    double sum = stage_value(c.d_f_f2) + stage_value(c.d_f2_f3) + stage_value(c.d_f3_ft);
    add(c, "distance.budget", sum, xi, true);
    if (opt.direct_distance) {
        c.d_f_ft = distance(f, res.ft, hc, opt);
        add(c, "distance.f.ft", stage_value(c.d_f_ft), xi, true);
    }
    return res;
}

ResidualResult residual_iterate(const Foliation& f0, const std::vector<ScheduleItem>& schedule, double xi0,
                                const HolderClass& hc, const ResidualOptions& opt)
{
    if (schedule.size() > 8) throw ParameterError("residual schedule longer than 8 steps");
    ResidualResult out;
    out.iterates.push_back(f0);
    Foliation cur = f0;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        PipelineOptions po = opt.pipeline;
        if (!opt.mollifier_nodes.empty())
            po.settings.mollifier_nodes = opt.mollifier_nodes[std::min(k, opt.mollifier_nodes.size() - 1)];
        double budget = std::ldexp(xi0, -static_cast<int>(k));
        PipelineResult r = construct_in_B(cur, hc, budget, schedule[k].m, schedule[k].I, po);
        out.certificates.push_back(r.cert);
        if (opt.on_step) opt.on_step(static_cast<int>(k), r.cert);
        if (!r.cert.pass()) {
            const auto fails = r.cert.failures();
            out.failure = "step " + std::to_string(k) + ": " + (fails.empty() ? "?" : fails.front()->name);
            return out;
        }
        cur = r.ft;
        out.iterates.push_back(cur);

        // Earlier memberships should survive the later, smaller perturbations.
        MembershipOptions mo = po.membership;
        mo.settings = po.settings;
        mo.samples = opt.openness_samples;
        for (std::size_t j = 0; j < k; ++j) {
            const Certificate& cj = out.certificates[j];
            int nj = cj.short_circuited ? cj.membership.n : cj.perturbation.n;
            MembershipReport rep = membership_A(cur, nj, cj.m, cj.I, mo);
            out.openness.push_back({static_cast<int>(k + 1), static_cast<int>(j), nj, rep.pass, rep.exhaustive,
                                    rep.clearance});
        }
    }
    out.completed = true;
    return out;
}

} // namespace hfol
