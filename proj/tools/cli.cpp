#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "hfol/disintegration.hpp"
#include "hfol/errors.hpp"
#include "hfol/holder_metric.hpp"
#include "hfol/manifest.hpp"
#include "hfol/pipeline.hpp"
#include "hfol/text.hpp"
#include "svg.hpp"

#ifndef HFOL_VERSION
#define HFOL_VERSION "0.0.0"
#endif

namespace hfol::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDefaultSchedule = "8@0/1:1/2,8@1/4:3/4,8@1/2:1/1,8@1/8:3/8";

std::string g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string g6(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Output directory, manifest and streams of one command.
struct Run {
    std::ostream& out;
    std::ostream& err;
    fs::path dir;
    RunManifest manifest;

    void emit(const std::string& name, const std::string& text)
    {
        write_text(dir / name, text);
        manifest.outputs.push_back(name);
    }
};

struct ClassFlags {
    double C = 4.0, beta = 0.5, alpha = 0.25;
    HolderClass get() const
    {
        HolderClass hc{C, beta, alpha};
        hc.validate();
        return hc;
    }
};

void add_class(CLI::App* sub, ClassFlags& c)
{
    sub->add_option("--C", c.C, "bi-Hoelder constant");
    sub->add_option("--beta", c.beta, "bi-Hoelder exponent");
    sub->add_option("--alpha", c.alpha, "holonomy Hoelder exponent of the metric");
}

std::vector<double> parse_leaves(const std::string& text, std::uint64_t seed)
{
    std::vector<double> ys;
    if (text.find_first_of(",.") == std::string::npos) {
        long long count = parse_int(text);
        if (count < 1 || count > 4096) throw ParameterError("--leaves count must lie in 1..4096");
        std::mt19937_64 rng(seed);
        while (static_cast<long long>(ys.size()) < count) {
            double y = static_cast<double>(rng() >> 11) * 0x1p-53;
            if (y > 0.0) ys.push_back(y);
        }
        return ys;
    }
    std::stringstream s(text);
    for (std::string item; std::getline(s, item, ',');) {
        double y = parse_double(trim(item));
        if (!(y > 0.0 && y < 1.0)) throw ParameterError("leaf parameter " + item + " outside (0,1)");
        ys.push_back(y);
    }
    return ys;
}

std::pair<int, int> parse_levels(const std::string& text)
{
    auto colon = text.find(':');
    if (colon == std::string::npos) throw ParameterError("--levels expects a:b");
    int a = static_cast<int>(parse_int(text.substr(0, colon)));
    int b = static_cast<int>(parse_int(text.substr(colon + 1)));
    if (a < 1 || b < a || b > 62) throw ParameterError("--levels needs 1 <= a <= b <= 62");
    return {a, b};
}

void check_n_max(int n_max)
{
    if (n_max < 1) throw ParameterError("--n-max must be at least 1");
    if (n_max > 24)
        throw ParameterError("--n-max " + std::to_string(n_max) +
                             " exceeds 24: a full level-n table costs 2^n strip quadratures; "
                             "use --levels a:b (b <= 62) for single-leaf sequences");
}

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> v;
    std::stringstream s(text);
    for (std::string item; std::getline(s, item, ',');)
        v.push_back(static_cast<int>(parse_int(trim(item))));
    return v;
}

// Prepends key = value lines of --config files as flags; explicit flags come later and win.
std::vector<std::string> expand_config(const std::vector<std::string>& args)
{
    std::vector<std::string> head, rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size()) path = args[++i];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
        else {
            rest.push_back(args[i]);
            continue;
        }
        std::istringstream in(read_text(path));
        int lineno = 0;
        for (std::string line; std::getline(in, line);) {
            ++lineno;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw InputError(path + ":" + std::to_string(lineno) + ": expected key = value");
            head.push_back("--" + trim(t.substr(0, eq)) + "=" + trim(t.substr(eq + 1)));
        }
    }
    if (rest.empty()) return head;
    // Subcommand name first, then config values, then explicit flags.
    std::vector<std::string> out{rest.front()};
    out.insert(out.end(), head.begin(), head.end());
    out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
}

void require_keys(const CLI::App* sub, const std::vector<std::string>& keys)
{
    std::string missing;
    for (const auto& k : keys)
        if (sub->get_option("--" + k)->count() == 0) missing += (missing.empty() ? "" : ", ") + k;
    if (!missing.empty())
        throw InputError("missing required keys: " + missing + " (give them as flags or in --config)");
}

void record_params(const CLI::App* sub, RunManifest& m)
{
    for (const CLI::Option* o : sub->get_options()) {
        if (o->get_lnames().empty()) continue;
        const std::string& name = o->get_lnames().front();
        if (name == "help" || name == "config") continue;
        if (o->count() > 0) m.params[name] = o->results().back();
        else if (!o->get_default_str().empty()) m.params[name] = o->get_default_str();
    }
}

std::string membership_table(const MembershipReport& r)
{
    std::ostringstream s;
    s << "# level=" << r.n << " m=" << r.m << " interval=" << r.I.str() << " method=" << r.method
      << " exhaustive=" << (r.exhaustive ? 1 : 0) << " pass=" << (r.pass ? 1 : 0)
      << " clearance=" << g17(r.clearance) << '\n';
    if (r.envelope)
        s << "# envelope q=" << g17(r.envelope->q) << " even=[" << g17(r.envelope->even_lo) << ','
          << g17(r.envelope->even_hi) << "] odd=[" << g17(r.envelope->odd_lo) << ','
          << g17(r.envelope->odd_hi) << "]\n";
    s << "# index measure inside ratio outside_band\n";
    for (const auto& row : r.table)
        s << row.index << ' ' << g17(row.measure) << ' ' << g17(row.inside) << ' ' << g17(row.ratio) << ' '
          << (row.outside_band ? 1 : 0) << '\n';
    return s.str();
}

// ---------------------------------------------------------------- commands

struct PerturbFlags {
    std::string foliation = "identity";
    ClassFlags cls;
    double xi = 0.5;
    int m = 10;
    std::string interval;
    std::uint64_t seed = 1;
    int pairs = 10000;
};

int cmd_perturb(Run& run, const PerturbFlags& p)
{
    HolderClass hc = p.cls.get();
    IntervalQ I = IntervalQ::parse(p.interval);
    Foliation f = resolve_foliation(p.foliation, hc, &run.manifest.inputs);
    PipelineOptions po;
    po.scheme.seed = p.seed;
    po.scheme.random_pairs = p.pairs;
    PipelineResult r = construct_in_B(f, hc, p.xi, p.m, I, po);
    run.manifest.scheme_digest = r.cert.scheme_digest;
    run.manifest.settings_digest = r.cert.settings_digest;
    run.emit("foliation.txt", write_foliation(r.ft));
    run.emit("certificate.txt", certificate_report(r.cert));
    run.emit("strips.txt", membership_table(r.cert.membership));
    if (r.cert.pass()) {
        run.out << "certificate pass: level n=" << r.cert.membership.n << ", " << r.cert.rows.size()
                << " inequalities, membership " << r.cert.membership.method << '\n';
        return pass;
    }
    for (const CertificateRow* row : r.cert.failures())
        run.err << "certificate failed: " << row->name << ' ' << g6(row->lhs) << (row->strict ? " < " : " <= ")
                << g6(row->rhs) << '\n';
    return certificate_fail;
}

struct DisintegrateFlags {
    std::string foliation;
    std::string interval;
    int m = 10;
    std::string leaves = "16";
    std::uint64_t seed = 1;
    int n_max = 12;
    std::string levels;
    int depth = 8;
    int atom_level = 0;
};

int cmd_disintegrate(Run& run, const DisintegrateFlags& p)
{
    IntervalQ I = IntervalQ::parse(p.interval);
    int a = 1, b = p.n_max;
    if (!p.levels.empty()) std::tie(a, b) = parse_levels(p.levels);
    else check_n_max(p.n_max);
    if (p.m < 2) throw ParameterError("--m must be at least 2");
    int level = p.atom_level > 0 ? p.atom_level : b;
    Foliation f = resolve_foliation(p.foliation, HolderClass{}, &run.manifest.inputs);
    std::vector<double> ys = parse_leaves(p.leaves, p.seed);

    std::ostringstream ratios, atoms;
    ratios << "# interval=" << I.str() << " m=" << p.m << " levels=" << a << ':' << b << '\n';
    ratios << "# y n index measure inside ratio outside_band\n";
    atoms << "# level=" << level << " depth=" << p.depth << '\n';
    atoms << "# y step lo hi mass tie\n";
    const double band_lo = 1.0 / p.m, band_hi = 1.0 - 1.0 / p.m;
    int locked = 0, atomic = 0;
    for (double y : ys) {
        RatioSequence rs = ratio_sequence(f, y, I, a, b);
        bool outside = !rs.entries.empty();
        for (const auto& e : rs.entries) {
            bool o = e.ratio < band_lo || e.ratio > band_hi;
            outside = outside && o;
            ratios << g17(y) << ' ' << e.n << ' ' << e.index << ' ' << g17(e.measure) << ' ' << g17(e.inside)
                   << ' ' << g17(e.ratio) << ' ' << (o ? 1 : 0) << '\n';
        }
        AtomReport ar = atom_locate(f, y, level, p.depth);
        for (std::size_t k = 0; k < ar.steps.size(); ++k)
            atoms << g17(y) << ' ' << k << ' ' << g17(ar.steps[k].lo) << ' ' << g17(ar.steps[k].hi) << ' '
                  << g17(ar.steps[k].mass) << ' ' << (ar.steps[k].tie ? 1 : 0) << '\n';
        atoms << "# y=" << g17(y) << " x_P=" << g17(ar.x_P) << " atom_y=" << g17(ar.atom_y)
              << " atomic=" << (ar.atomic ? 1 : 0) << '\n';
        locked += outside;
        atomic += ar.atomic;
    }
    run.emit("ratios.txt", ratios.str());
    run.emit("atoms.txt", atoms.str());
    run.out << ys.size() << " leaves: " << locked << " with every ratio outside [1/m, 1-1/m] on levels " << a
            << ".." << b << ", " << atomic << " with an atom at level " << level << '\n';
    return pass;
}

struct ResidualFlags {
    std::string foliation = "identity";
    ClassFlags cls{4.0, 0.5, 0.0};
    double xi = 0.5;
    std::string schedule = kDefaultSchedule;
    std::string nodes = "64,4";
    int pairs = 2000;
    std::uint64_t seed = 1;
    int openness_samples = 8;
};

int cmd_residual(Run& run, const ResidualFlags& p)
{
    HolderClass hc = p.cls.get();
    std::vector<ScheduleItem> schedule;
    for (const auto& s : parse_schedule(p.schedule))
        schedule.push_back({s.m, IntervalQ::parse(s.interval)});
    Foliation f0 = resolve_foliation(p.foliation, hc, &run.manifest.inputs);
    ResidualOptions ro;
    ro.mollifier_nodes = parse_int_list(p.nodes);
    ro.pipeline.scheme.random_pairs = p.pairs;
    ro.pipeline.scheme.seed = p.seed;
    ro.openness_samples = p.openness_samples;
    ro.on_step = [&](int k, const Certificate& c) {
        run.out << "step " << k << ": xi=" << g6(c.xi) << " m=" << c.m << " I=" << c.I.str() << " n="
                << (c.short_circuited ? c.membership.n : c.perturbation.n) << ' '
                << (c.pass() ? "pass" : "FAIL") << std::endl;
    };
    ResidualResult r = residual_iterate(f0, schedule, p.xi, hc, ro);
    run.manifest.scheme_digest = ro.pipeline.scheme.digest();
    for (std::size_t k = 0; k < r.iterates.size(); ++k)
        run.emit("iterate_" + std::to_string(k) + ".txt", write_foliation(r.iterates[k]));
    for (std::size_t k = 0; k < r.certificates.size(); ++k)
        run.emit("certificate_" + std::to_string(k) + ".txt", certificate_report(r.certificates[k]));
    if (!r.certificates.empty()) run.manifest.settings_digest = r.certificates.back().settings_digest;

    std::ostringstream open;
    open << "# step earlier level pass exhaustive clearance\n";
    for (const auto& o : r.openness)
        open << o.step << ' ' << o.earlier << ' ' << o.n << ' ' << (o.pass ? 1 : 0) << ' ' << (o.exhaustive ? 1 : 0)
             << ' ' << g17(o.clearance) << '\n';
    run.emit("openness.txt", open.str());
    if (!r.completed) {
        run.err << "residual run stopped at " << r.failure << '\n';
        return certificate_fail;
    }
    MetricOptions mo;
    CauchyTable ct = cauchy_probe(r.iterates, hc, ro.pipeline.scheme, p.xi, true, mo);
    std::ostringstream cauchy;
    cauchy << "# k d(f_k,f_k+1) budget within\n";
    for (std::size_t k = 0; k + 1 < r.iterates.size(); ++k)
        cauchy << k << ' ' << g17(ct.distance[k][k + 1]) << ' ' << g17(ct.budget[k]) << ' '
               << (ct.within_budget[k] ? 1 : 0) << '\n';
    run.emit("cauchy.txt", cauchy.str());
    bool open_ok = std::all_of(r.openness.begin(), r.openness.end(), [](const OpennessCheck& o) { return o.pass; });
    run.out << "cauchy " << (ct.pass ? "pass" : "FAIL") << ", openness " << (open_ok ? "pass" : "FAIL") << '\n';
    return ct.pass && open_ok ? pass : certificate_fail;
}

struct DistanceFlags {
    std::string foliation, other;
    ClassFlags cls;
    int pairs = 10000;
    std::uint64_t seed = 1;
};

int cmd_distance(Run& run, const DistanceFlags& p)
{
    HolderClass hc = p.cls.get();
    Foliation f = resolve_foliation(p.foliation, hc, &run.manifest.inputs);
    Foliation g = resolve_foliation(p.other, hc, &run.manifest.inputs);
    SampleScheme sc;
    sc.random_pairs = p.pairs;
    sc.seed = p.seed;
    DistanceEstimate d = d_alpha(f, g, hc, sc);
    run.manifest.scheme_digest = sc.digest();
    std::ostringstream s;
    s << "# scheme " << sc.describe() << '\n';
    s << "c0 " << g17(d.c0) << '\n' << "c0_dx " << g17(d.c0_dx) << '\n';
    s << "holonomy_forward " << g17(d.holonomy_forward) << '\n' << "holonomy_inverse " << g17(d.holonomy_inverse) << '\n';
    s << "d_alpha " << g17(d.total.value) << '\n';
    s << "d_alpha_refined " << g17(d.total.refined_value) << '\n';
    s << "refinement_monotone " << (d.total.refinement_monotone ? 1 : 0) << '\n';
    run.emit("distance.txt", s.str());
    run.out << "d_alpha = " << g17(d.total.value) << " (refined " << g17(d.total.refined_value) << ")\n";
    return pass;
}

struct ACFlags {
    std::string foliation;
    int level = 10;
    int x_points = 17;
    int ny = 64;
};

ACReport ac_of(const Foliation& f, int level, int x_points, int ny)
{
    if (level < 1 || level > 52) throw ParameterError("--level must lie in 1..52");
    if (x_points < 2) throw ParameterError("--x-points must be at least 2");
    std::vector<double> xs;
    for (int i = 0; i < x_points; ++i)
        xs.push_back(static_cast<double>(i) / (x_points - 1));
    return ac_report(f, xs, std::ldexp(1.0, -level), ny);
}

int cmd_ac(Run& run, const ACFlags& p)
{
    Foliation f = resolve_foliation(p.foliation, HolderClass{}, &run.manifest.inputs);
    ACReport r = ac_of(f, p.level, p.x_points, p.ny);
    std::ostringstream s;
    s << "# scale=" << g17(r.scale) << " global_min=" << g17(r.global_min) << " global_max=" << g17(r.global_max)
      << " global_ratio=" << g17(r.global_ratio) << '\n';
    s << "# hint: " << r.hint << '\n';
    s << "# x min max ratio\n";
    for (const auto& row : r.rows)
        s << g17(row.x) << ' ' << g17(row.min) << ' ' << g17(row.max) << ' ' << g17(row.ratio) << '\n';
    run.emit("ac.txt", s.str());
    run.out << "global density ratio " << g6(r.global_ratio) << " at scale 2^-" << p.level << ": " << r.hint << '\n';
    return pass;
}

struct PlotFlags {
    std::string foliation;
    std::string kind = "leaves";
    std::string leaves = "17";
    std::string interval = "1/4:1/2";
    int m = 10;
    int n_max = 12;
    std::string levels;
    int level = 10;
    std::uint64_t seed = 1;
};

int cmd_plot(Run& run, const PlotFlags& p)
{
    Foliation f = resolve_foliation(p.foliation, HolderClass{}, &run.manifest.inputs);
    svg::Plot plot;
    std::ostringstream data;
    if (p.kind == "leaves") {
        int count = static_cast<int>(parse_int(p.leaves));
        if (count < 1 || count > 512) throw ParameterError("--leaves must lie in 1..512 for a leaf plot");
        const int samples = 256;
        auto fam = leaf_family(f, count, samples);
        plot.title = "Leaves x -> f(x, j/" + std::to_string(count) + ")";
        plot.xlabel = "x";
        plot.ylabel = "f(x, y)";
        data << "# j x f\n";
        for (std::size_t j = 0; j < fam.size(); ++j) {
            svg::Series s;
            s.label = "y = " + std::to_string(j) + "/" + std::to_string(count);
            for (int i = 0; i <= samples; ++i) {
                double x = static_cast<double>(i) / samples;
                s.points.emplace_back(x, fam[j][static_cast<std::size_t>(i)]);
                data << j << ' ' << g17(x) << ' ' << g17(fam[j][static_cast<std::size_t>(i)]) << '\n';
            }
            plot.series.push_back(std::move(s));
        }
    } else if (p.kind == "ratios") {
        IntervalQ I = IntervalQ::parse(p.interval);
        int a = 1, b = p.n_max;
        if (!p.levels.empty()) std::tie(a, b) = parse_levels(p.levels);
        else check_n_max(p.n_max);
        plot.title = "Strip ratios on " + I.str();
        plot.xlabel = "level n";
        plot.ylabel = "mu(P_n and I) / mu(P_n)";
        plot.x0 = a;
        plot.x1 = b > a ? b : a + 1;
        plot.hlines = {{1.0 / p.m, "1/m"}, {1.0 - 1.0 / p.m, "1-1/m"}};
        data << "# y n ratio\n";
        const char* colors[] = {"#1f4e79", "#2e7d32", "#6a1b9a", "#ef6c00", "#00838f", "#5d4037"};
        std::size_t c = 0;
        for (double y : parse_leaves(p.leaves, p.seed)) {
            svg::Series s;
            s.label = "y = " + g6(y);
            s.stroke = colors[c++ % 6];
            for (const auto& e : ratio_sequence(f, y, I, a, b).entries) {
                s.points.emplace_back(e.n, e.ratio);
                data << g17(y) << ' ' << e.n << ' ' << g17(e.ratio) << '\n';
            }
            plot.series.push_back(std::move(s));
        }
    } else if (p.kind == "density") {
        ACReport r = ac_of(f, p.level, 65, 64);
        plot.title = "Holonomy density quotients at scale 2^-" + std::to_string(p.level);
        plot.xlabel = "x";
        plot.ylabel = "log10 quotient";
        svg::Series lo, hi;
        lo.label = "min";
        hi.label = "max";
        hi.stroke = "#b22222";
        double top = 0.0, bottom = 0.0;
        data << "# x min max\n";
        for (const auto& row : r.rows) {
            double a = std::log10(std::max(row.min, 1e-300)), b = std::log10(std::max(row.max, 1e-300));
            lo.points.emplace_back(row.x, a);
            hi.points.emplace_back(row.x, b);
            top = std::max(top, b);
            bottom = std::min(bottom, a);
            data << g17(row.x) << ' ' << g17(row.min) << ' ' << g17(row.max) << '\n';
        }
        plot.y0 = std::floor(bottom) - 0.5;
        plot.y1 = std::ceil(top) + 0.5;
        plot.series = {lo, hi};
    } else {
        throw ParameterError("--kind must be leaves, ratios or density");
    }
    run.emit("plot_" + p.kind + ".svg", plot.render());
    run.emit("plot_" + p.kind + ".txt", data.str());
    run.out << "wrote " << (run.dir / ("plot_" + p.kind + ".svg")).string() << '\n';
    return pass;
}

} // namespace

// ---------------------------------------------------------------- helpers

Foliation resolve_foliation(const std::string& spec, const HolderClass& hc, std::vector<std::string>* inputs)
{
    if (spec.empty()) throw InputError("empty foliation spec");
    std::error_code ec;
    if (fs::is_regular_file(spec, ec)) {
        if (inputs) inputs->push_back(spec);
        return load_foliation(spec);
    }
    std::string name = spec;
    BuiltinParams bp{{"C", hc.C}, {"beta", hc.beta}, {"alpha", hc.alpha}};
    if (auto colon = spec.find(':'); colon != std::string::npos) {
        name = spec.substr(0, colon);
        std::stringstream s(spec.substr(colon + 1));
        for (std::string item; std::getline(s, item, ',');) {
            auto eq = item.find('=');
            if (eq == std::string::npos) throw InputError("foliation parameter '" + item + "' is not key=value");
            bp[trim(item.substr(0, eq))] = parse_double(trim(item.substr(eq + 1)));
        }
    }
    if (name != "identity" && name != "shear" && name != "warp")
        throw InputError("foliation '" + spec + "' is neither a file nor a builtin (identity, shear, warp)");
    return builtin(name, bp);
}

std::vector<std::vector<double>> leaf_family(const Foliation& f, int leaves, int samples)
{
    std::vector<std::vector<double>> fam(static_cast<std::size_t>(leaves) + 1);
    for (int j = 0; j <= leaves; ++j) {
        double y = static_cast<double>(j) / leaves;
        for (int i = 0; i <= samples; ++i)
            fam[static_cast<std::size_t>(j)].push_back(f.eval(static_cast<double>(i) / samples, y));
    }
    return fam;
}

std::vector<ScheduleText> parse_schedule(const std::string& text)
{
    std::vector<ScheduleText> out;
    std::stringstream s(text);
    for (std::string item; std::getline(s, item, ',');) {
        item = trim(item);
        if (item.empty()) continue;
        auto at = item.find('@');
        if (at == std::string::npos) throw ParameterError("schedule item '" + item + "' is not m@p/q:r/s");
        int m = static_cast<int>(parse_int(item.substr(0, at)));
        if (m < 2) throw ParameterError("schedule m must be at least 2");
        std::string interval = item.substr(at + 1);
        IntervalQ::parse(interval);
        out.push_back({m, interval});
    }
    return out;
}

int run(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Numerical constructions for Hoelder foliations with atomic disintegration", "hfol"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string out_dir = "hfol_out";
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--config", "key = value file; explicit flags override it");
    };

    PerturbFlags pf;
    CLI::App* perturb = app.add_subcommand("perturb", "construct a member of B_{m,I} near a foliation");
    perturb->add_option("--foliation", pf.foliation, "builtin[:k=v,...] or foliation file");
    add_class(perturb, pf.cls);
    perturb->add_option("--xi", pf.xi, "distance budget");
    perturb->add_option("--m", pf.m, "band parameter");
    perturb->add_option("--interval", pf.interval, "I as p/q:r/s");
    perturb->add_option("--seed", pf.seed, "sampling seed");
    perturb->add_option("--pairs", pf.pairs, "random pairs per norm estimate");
    add_common(perturb);

    DisintegrateFlags df;
    CLI::App* dis = app.add_subcommand("disintegrate", "strip-ratio sequences and atom reports on leaves");
    dis->add_option("--foliation", df.foliation, "builtin or foliation file");
    dis->add_option("--interval", df.interval, "I as p/q:r/s");
    dis->add_option("--m", df.m, "band parameter for the report");
    dis->add_option("--leaves", df.leaves, "leaf count (random) or comma list of y values");
    dis->add_option("--seed", df.seed, "leaf sampling seed");
    dis->add_option("--n-max", df.n_max, "last level (at most 24)");
    dis->add_option("--levels", df.levels, "level range a:b up to 62, overrides --n-max");
    dis->add_option("--depth", df.depth, "atom search depth (at most 12)");
    dis->add_option("--atom-level", df.atom_level, "level standing in for the leaf (default: last level)");
    add_common(dis);

    ResidualFlags rf;
    CLI::App* res = app.add_subcommand("residual", "iterate the construction over a schedule");
    res->add_option("--foliation", rf.foliation, "starting foliation");
    add_class(res, rf.cls);
    res->add_option("--xi", rf.xi, "first budget; step k gets xi/2^k");
    res->add_option("--schedule", rf.schedule, "comma list of m@p/q:r/s");
    res->add_option("--nodes", rf.nodes, "convolution order per step; the last repeats");
    res->add_option("--pairs", rf.pairs, "random pairs per norm estimate");
    res->add_option("--seed", rf.seed, "sampling seed");
    res->add_option("--openness-samples", rf.openness_samples, "strips integrated per openness recheck");
    add_common(res);

    DistanceFlags dsf;
    CLI::App* dist = app.add_subcommand("distance", "estimate d_alpha between two foliations");
    dist->add_option("--foliation", dsf.foliation, "first foliation");
    dist->add_option("--other", dsf.other, "second foliation");
    add_class(dist, dsf.cls);
    dist->add_option("--pairs", dsf.pairs, "random pairs per norm estimate");
    dist->add_option("--seed", dsf.seed, "sampling seed");
    add_common(dist);

    ACFlags af;
    CLI::App* ac = app.add_subcommand("ac-report", "holonomy density quotients at scale 2^-level");
    ac->add_option("--foliation", af.foliation, "builtin or foliation file");
    ac->add_option("--level", af.level, "scale exponent");
    ac->add_option("--x-points", af.x_points, "evenly spaced transversals");
    ac->add_option("--ny", af.ny, "y grid size");
    add_common(ac);

    PlotFlags plf;
    CLI::App* plot = app.add_subcommand("plot", "SVG of leaves, ratio sequences or density quotients");
    plot->add_option("--foliation", plf.foliation, "builtin or foliation file");
    plot->add_option("--kind", plf.kind, "leaves, ratios or density");
    plot->add_option("--leaves", plf.leaves, "leaf count or y list");
    plot->add_option("--interval", plf.interval, "I for ratio plots");
    plot->add_option("--m", plf.m, "band parameter for ratio plots");
    plot->add_option("--n-max", plf.n_max, "last level (at most 24)");
    plot->add_option("--levels", plf.levels, "level range a:b");
    plot->add_option("--level", plf.level, "scale exponent for density plots");
    plot->add_option("--seed", plf.seed, "leaf sampling seed");
    add_common(plot);

    std::string replay_path;
    CLI::App* replay = app.add_subcommand("replay", "rerun the command recorded in a run manifest");
    replay->add_option("--manifest", replay_path, "run.txt of an earlier run")->required();
    replay->add_option("--out", out_dir, "output directory for the rerun");

    try {
        std::vector<std::string> args = expand_config(raw);
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);

        if (replay->parsed()) {
            RunManifest old = RunManifest::parse(read_text(replay_path));
            std::vector<std::string> again{old.command};
            for (const auto& [k, v] : old.params)
                if (k != "out") again.push_back("--" + k + "=" + v);
            if (replay->get_option("--out")->count() == 0) throw InputError("replay needs --out for the rerun");
            again.push_back("--out=" + out_dir);
            return run(again, out, err);
        }

        CLI::App* sub = app.get_subcommands().front();
        Run r{out, err, out_dir, {}};
        r.manifest.command = sub->get_name();
        r.manifest.version = HFOL_VERSION;
        record_params(sub, r.manifest);
        auto t0 = std::chrono::steady_clock::now();
        int code = pass;
        try {
            if (sub == perturb) {
                require_keys(sub, {"foliation", "xi", "m", "interval"});
                code = cmd_perturb(r, pf);
            } else if (sub == dis) {
                require_keys(sub, {"foliation", "interval"});
                code = cmd_disintegrate(r, df);
            } else if (sub == res) {
                code = cmd_residual(r, rf);
            } else if (sub == dist) {
                require_keys(sub, {"foliation", "other"});
                code = cmd_distance(r, dsf);
            } else if (sub == ac) {
                require_keys(sub, {"foliation"});
                code = cmd_ac(r, af);
            } else {
                require_keys(sub, {"foliation"});
                code = cmd_plot(r, plf);
            }
        } catch (const PrecisionError& e) {
            err << "precision error: " << e.what() << '\n';
            code = precision_error;
        } catch (const CorruptFoliationError& e) {
            err << "corrupt foliation: " << e.what() << '\n';
            code = precision_error;
        } catch (const Error& e) {
            err << "error: " << e.what() << '\n';
            code = parameter_error;
        }
        r.manifest.exit_code = code;
        r.manifest.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_text(r.dir / "run.txt", r.manifest.str());
        return code;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return pass;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return pass;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << "run 'hfol --help' for the command list\n";
        return parameter_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return parameter_error;
    }
}

} // namespace hfol::cli
