#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "hfol/errors.hpp"
#include "hfol/manifest.hpp"
#include "hfol/perturbation.hpp"
#include "hfol/smoothing.hpp"

using namespace hfol;

namespace {

Foliation layered()
{
    MollifyParams mp;
    mp.r = 0.001;
    mp.nodes = 16;
    Foliation f3 = interpolate_identity(mollify(warp(0.25), mp), interpolation_params(0.01, 4.0));
    return dyadic_perturb(f3, PerturbationParams{0.01, 0.01, 6, IntervalQ::make(1, 4, 1, 2)},
                          HolderClass{4.0, 0.5, 0.25});
}

void check_same(const Foliation& a, const Foliation& b)
{
    for (int i = 0; i <= 16; ++i)
        for (int j = 0; j <= 16; ++j) {
            double x = i / 16.0, y = j / 16.0 + (j < 16 ? 1e-3 : 0.0);
            CHECK(a.eval(x, y) == b.eval(x, y));
        }
}

} // namespace

TEST_CASE("foliation text round trip")
{
    std::vector<Foliation> cases{identity(), shear(0.03), warp(-0.4), layered(),
                                 grid_sampled(2, 2, {0, 0.5, 1, 0, 0.4, 1, 0, 0.6, 1}, HolderClass{})};
    for (const auto& f : cases) {
        std::string text = write_foliation(f);
        Foliation g = read_foliation(text);
        CHECK(write_foliation(g) == text);
        CHECK(g.kind() == f.kind());
        CHECK(g.declared().C == f.declared().C);
        check_same(f, g);
    }
}

TEST_CASE("foliation text shares repeated nodes")
{
    Foliation f = layered();
    std::string text = write_foliation(f);
    CHECK(text.rfind("hfol-foliation/1\n", 0) == 0);
    CHECK(text.find("node 0 warp") != std::string::npos);
    CHECK(text.find("node 3 dyadic 2") != std::string::npos);
    CHECK(text.find("root 3") != std::string::npos);
}

TEST_CASE("malformed foliation text")
{
    CHECK_THROWS_AS(read_foliation("hello\n"), InputError);
    CHECK_THROWS_AS(read_foliation("hfol-foliation/1\nnode 0 spiral\nroot 0\n"), InputError);
    CHECK_THROWS_AS(read_foliation("hfol-foliation/1\nnode 0 identity\n"), InputError);
    CHECK_THROWS_AS(read_foliation("hfol-foliation/1\nnode 0 mollified 3\n  r = 0.1\nroot 0\n"), InputError);
    CHECK_THROWS_AS(read_foliation("hfol-foliation/1\nnode 0 shear\n  kappa = 0.5\nroot 0\n"), ParameterError);
    CHECK_THROWS_AS(load_foliation("/nonexistent/f.txt"), InputError);
}

TEST_CASE("foliation file round trip")
{
    auto dir = std::filesystem::temp_directory_path() / "hfol_manifest_test";
    std::filesystem::remove_all(dir);
    save_foliation(dir / "f.txt", layered());
    check_same(load_foliation(dir / "f.txt"), layered());
    std::filesystem::remove_all(dir);
}

TEST_CASE("run manifest round trip")
{
    RunManifest m;
    m.command = "perturb";
    m.params = {{"xi", "0.5"}, {"interval", "1/4:1/2"}};
    m.inputs = {"in.txt"};
    m.outputs = {"out/foliation.txt", "out/certificate.txt"};
    m.settings_digest = "0123456789abcdef";
    m.scheme_digest = "fedcba9876543210";
    m.version = "1.0.0";
    m.wall_clock = 1.25;
    m.exit_code = 1;
    RunManifest back = RunManifest::parse(m.str());
    CHECK(back.str() == m.str());
    CHECK(back.params.at("interval") == "1/4:1/2");
    CHECK_THROWS_AS(RunManifest::parse("hfol-run/1\nbogus = 1\n"), InputError);
    CHECK_THROWS_AS(RunManifest::parse("hfol-run/1\n"), InputError);
}

TEST_CASE("certificate report lines")
{
    Certificate c;
    c.rows.push_back({"distance.f.f2", 0.1, 0.2, true, true});
    c.rows.push_back({"perturbation.condition2", 2.0, 1.0, false, false});
    std::string rep = certificate_report(c);
    CHECK(rep.find("distance.f.f2 0.10000000000000001 < 0.20000000000000001 margin=0.10000000000000001 pass\n") !=
          std::string::npos);
    CHECK(rep.find("perturbation.condition2 2 <= 1 margin=-1 logged-fail\n") != std::string::npos);
    CHECK(rep.find("certificate pass\n") != std::string::npos);
    c.rows.push_back({"x", 1.0, 0.0, false, true});
    CHECK(certificate_report(c).find("x 1 <= 0 margin=-1 FAIL\n") != std::string::npos);
}
