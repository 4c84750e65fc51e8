#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hfol/foliation.hpp"
#include "hfol/pipeline.hpp"

namespace hfol {

/**
 * Text form of a foliation: the generator DAG in dependency order, every
 * floating parameter as a hex float so that reading it back rebuilds the
 * same function bit for bit.
 *
 *   hfol-foliation/1
 *   node 0 shear
 *     kappa = 0x1.45f306dc9c883p-5
 *   node 1 mollified 0
 *     r = ...
 *   root 1
 */
std::string write_foliation(const Foliation& f);
Foliation read_foliation(std::string_view text, const EvalSettings& settings = {});

void save_foliation(const std::filesystem::path& path, const Foliation& f);
Foliation load_foliation(const std::filesystem::path& path, const EvalSettings& settings = {});

/// One inequality per line: name lhs rhs margin status, plus scheme digests.
std::string certificate_report(const Certificate& c);

/// Record of one command run; parameters are kept as the flag strings given.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> params;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::string settings_digest;
    std::string scheme_digest;
    std::string version;
    double wall_clock = 0.0;
    int exit_code = 0;

    std::string str() const;
    static RunManifest parse(std::string_view text);
};

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

} // namespace hfol
