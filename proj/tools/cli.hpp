#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hfol/foliation.hpp"

namespace hfol::cli {

enum ExitCode : int { pass = 0, certificate_fail = 1, parameter_error = 2, precision_error = 3 };

/// Runs one command line (without the program name); never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Builtin spec "name[:key=value,...]" or a foliation file.
Foliation resolve_foliation(const std::string& spec, const HolderClass& hc, std::vector<std::string>* inputs = nullptr);

/// Sampled leaves x -> f(x, j/leaves), j = 0..leaves, used by the leaf plot.
std::vector<std::vector<double>> leaf_family(const Foliation& f, int leaves, int samples);

/// "8@0/1:1/2,8@1/4:3/4" -> schedule items.
struct ScheduleText {
    int m;
    std::string interval;
};
std::vector<ScheduleText> parse_schedule(const std::string& text);

} // namespace hfol::cli
