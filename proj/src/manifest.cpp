#include "hfol/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "hfol/errors.hpp"
#include "hfol/perturbation.hpp"
#include "hfol/smoothing.hpp"
#include "hfol/text.hpp"

namespace hfol {

namespace {

constexpr std::string_view kFoliationMagic = "hfol-foliation/1";
constexpr std::string_view kRunMagic = "hfol-run/1";

std::string g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_ws(std::string_view s)
{
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    for (std::string w; in >> w;)
        out.push_back(w);
    return out;
}

struct ParsedNode {
    std::string kind;
    std::vector<int> inputs;
    std::map<std::string, std::string> params;

    const std::string& at(const std::string& key) const
    {
        auto it = params.find(key);
        if (it == params.end()) throw InputError("manifest: node '" + kind + "' lacks '" + key + "'");
        return it->second;
    }
    double num(const std::string& key) const { return parse_double(at(key)); }
    HolderClass hc() const
    {
        HolderClass h;
        h.C = num("C");
        h.beta = num("beta");
        h.alpha = num("alpha");
        return h;
    }
};

Foliation rebuild(const ParsedNode& p, const std::vector<Foliation>& built, const EvalSettings& es)
{
    auto input = [&](std::size_t k) -> const Foliation& {
        if (k >= p.inputs.size()) throw InputError("manifest: node '" + p.kind + "' lacks an input");
        return built.at(static_cast<std::size_t>(p.inputs[k]));
    };
    if (p.kind == "identity" || p.kind == "shear" || p.kind == "warp") {
        BuiltinParams bp;
        for (const auto& [k, v] : p.params)
            bp[k] = parse_double(v);
        return builtin(p.kind, bp);
    }
    if (p.kind == "grid") {
        std::vector<double> v;
        for (const auto& w : split_ws(p.at("values")))
            v.push_back(parse_double(w));
        return grid_sampled(static_cast<int>(parse_int(p.at("nx"))), static_cast<int>(parse_int(p.at("ny"))),
                            std::move(v), p.hc());
    }
    if (p.kind == "mollified") {
        MollifyParams mp;
        mp.r = p.num("r");
        mp.nodes = static_cast<int>(parse_int(p.at("nodes")));
        return mollify(input(0), mp, es);
    }
    if (p.kind == "interpolated") {
        InterpolationParams ip;
        ip.epsilon = p.num("epsilon");
        ip.C_eps = p.num("C");
        return interpolate_identity(input(0), ip);
    }
    if (p.kind == "dyadic") {
        PerturbationParams pp;
        pp.delta1 = p.num("delta1");
        pp.delta2 = p.num("delta2");
        pp.n = static_cast<int>(parse_int(p.at("n")));
        pp.I = IntervalQ::parse(p.at("interval"));
        return dyadic_perturb(input(0), pp, p.hc());
    }
    throw InputError("manifest: unknown node kind '" + p.kind + "'");
}

} // namespace

std::string write_foliation(const Foliation& f)
{
    std::unordered_map<const FoliationNode*, int> ids;
    std::ostringstream out;
    out << kFoliationMagic << '\n';
    std::function<int(const NodePtr&)> emit = [&](const NodePtr& n) -> int {
        if (auto it = ids.find(n.get()); it != ids.end()) return it->second;
        NodeDescription d = n->describe();
        std::vector<int> in;
        for (const auto& c : d.inputs)
            in.push_back(emit(c));
        int id = static_cast<int>(ids.size());
        ids.emplace(n.get(), id);
        out << "node " << id << ' ' << d.kind;
        for (int i : in)
            out << ' ' << i;
        out << '\n';
        for (const auto& [k, v] : d.params)
            out << "  " << k << " = " << v << '\n';
        return id;
    };
    int root = emit(f.ptr());
    out << "root " << root << '\n';
    return out.str();
}

Foliation read_foliation(std::string_view text, const EvalSettings& es)
{
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || trim(line) != kFoliationMagic)
        throw InputError("manifest: missing '" + std::string(kFoliationMagic) + "' header");
    std::vector<ParsedNode> nodes;
    std::vector<Foliation> built;
    auto finish = [&] {
        if (nodes.size() > built.size()) built.push_back(rebuild(nodes.back(), built, es));
    };
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto where = [&] { return " (line " + std::to_string(lineno) + ")"; };
        if (line[0] == ' ') {
            if (nodes.size() == built.size()) throw InputError("manifest: parameter outside a node" + where());
            auto eq = t.find('=');
            if (eq == std::string::npos) throw InputError("manifest: expected key = value" + where());
            nodes.back().params[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
            continue;
        }
        finish();
        auto words = split_ws(t);
        if (words[0] == "node" && words.size() >= 3) {
            if (parse_int(words[1]) != static_cast<long long>(nodes.size()))
                throw InputError("manifest: nodes out of order" + where());
            ParsedNode p;
            p.kind = words[2];
            for (std::size_t k = 3; k < words.size(); ++k) {
                long long i = parse_int(words[k]);
                if (i < 0 || i >= static_cast<long long>(nodes.size()))
                    throw InputError("manifest: input refers to a later node" + where());
                p.inputs.push_back(static_cast<int>(i));
            }
            nodes.push_back(std::move(p));
        } else if (words[0] == "root" && words.size() == 2) {
            long long r = parse_int(words[1]);
            if (r < 0 || r >= static_cast<long long>(built.size()))
                throw InputError("manifest: root refers to an unknown node" + where());
            return built[static_cast<std::size_t>(r)];
        } else {
            throw InputError("manifest: unrecognized line" + where());
        }
    }
    throw InputError("manifest: missing root line");
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error("cannot write " + path.string());
}

void save_foliation(const std::filesystem::path& path, const Foliation& f) { write_text(path, write_foliation(f)); }

Foliation load_foliation(const std::filesystem::path& path, const EvalSettings& es)
{
    return read_foliation(read_text(path), es);
}

std::string certificate_report(const Certificate& c)
{
    std::ostringstream out;
    out << "# class C=" << g17(c.hc.C) << " beta=" << g17(c.hc.beta) << " alpha=" << g17(c.hc.alpha) << '\n';
    out << "# xi=" << g17(c.xi) << " m=" << c.m << " interval=" << c.I.str() << '\n';
    out << "# scheme " << c.scheme << '\n';
    out << "# scheme_digest " << c.scheme_digest << '\n';
    out << "# settings_digest " << c.settings_digest << '\n';
    if (c.short_circuited) out << "# input already in B at level " << c.membership.n << '\n';
    else
        out << "# n=" << c.perturbation.n << " delta1=" << g17(c.perturbation.delta1)
            << " delta2=" << g17(c.perturbation.delta2) << " membership=" << c.membership.method << '\n';
    for (const auto& r : c.rows) {
        const char* status = !r.enforced ? (r.holds() ? "logged-pass" : "logged-fail") : (r.holds() ? "pass" : "FAIL");
        out << r.name << ' ' << g17(r.lhs) << (r.strict ? " < " : " <= ") << g17(r.rhs) << " margin="
            << g17(r.margin()) << ' ' << status << '\n';
    }
    out << "certificate " << (c.pass() ? "pass" : "FAIL") << '\n';
    return out.str();
}

std::string RunManifest::str() const
{
    std::ostringstream out;
    out << kRunMagic << '\n';
    out << "command = " << command << '\n';
    for (const auto& [k, v] : params)
        out << "param." << k << " = " << v << '\n';
    for (const auto& p : inputs)
        out << "input = " << p << '\n';
    for (const auto& p : outputs)
        out << "output = " << p << '\n';
    out << "settings_digest = " << settings_digest << '\n';
    out << "scheme_digest = " << scheme_digest << '\n';
    out << "version = " << version << '\n';
    out << "wall_clock = " << g17(wall_clock) << '\n';
    out << "exit_code = " << exit_code << '\n';
    return out.str();
}

RunManifest RunManifest::parse(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || trim(line) != kRunMagic) throw InputError("run manifest: missing header");
    RunManifest m;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) throw InputError("run manifest: expected key = value: " + t);
        std::string k = trim(t.substr(0, eq)), v = trim(t.substr(eq + 1));
        if (k == "command") m.command = v;
        else if (k.rfind("param.", 0) == 0) m.params[k.substr(6)] = v;
        else if (k == "input") m.inputs.push_back(v);
        else if (k == "output") m.outputs.push_back(v);
        else if (k == "settings_digest") m.settings_digest = v;
        else if (k == "scheme_digest") m.scheme_digest = v;
        else if (k == "version") m.version = v;
        else if (k == "wall_clock") m.wall_clock = parse_double(v);
        else if (k == "exit_code") m.exit_code = static_cast<int>(parse_int(v));
        else throw InputError("run manifest: unknown key '" + k + "'");
    }
    if (m.command.empty()) throw InputError("run manifest: no command");
    return m;
}

} // namespace hfol
