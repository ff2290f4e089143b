#pragma once

#include <pobounds/serialize.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pobounds::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInfeasible = 2, kMiteIncompatible = 3 };

// Everything that determines a command's result. Reports echo it as
// "config" and --config replays it.
struct Options {
    std::string command;
    std::string dims;
    std::string exp_path;
    std::string obs_path;
    Json assume;  // null: no assumptions
    Json query;
    bool exogeneity = false;
    std::size_t bootstrap = 0;
    std::uint64_t seed = 0;
    std::optional<double> slack;
    bool witnesses = false;

    std::string truth_path;
    std::size_t n = 1000;
    std::size_t reps = 100;
    std::string mode = "bound";
    std::string sources = "both";
    bool replicates = false;
};

Json to_config(const Options& options);
Options from_config(const Json& config);

struct Outcome {
    int exit_code = kOk;
    Json report;
    std::vector<std::string> warnings;
};

Outcome cmd_bound(const Options& options, unsigned threads);
Outcome cmd_identify(const Options& options, unsigned threads);
Outcome cmd_simulate(const Options& options, unsigned threads);

// Full command line without the program name. Reports go to --out or out;
// warnings and errors go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pobounds::cli
