#pragma once

#include "dynamo/lyapunov.hpp"
#include "dynamo/model.hpp"
#include "dynamo/regions.hpp"
#include "dynamo/sde.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dynamo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNonConvergence = 3;

enum class OutputFormat { csv, json };

enum class SimulateMode { lyapunov, second_moment, angular };

/// Everything a subcommand can be configured with. Defaults here are the
/// documented defaults of the command-line flags.
struct RunConfig {
    ModelParams params{0.99, 0.01, 0.1, 0.0, 1.0, 1.0};
    std::string out = "-";
    OutputFormat format = OutputFormat::csv;
    unsigned workers = 1;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    // lyapunov / scan
    std::string method = "hypergeometric";

    // simulate
    SimulateMode mode = SimulateMode::lyapunov;
    SimConfig sim;
    std::size_t bins = 64;

    // scan
    ScanSpec scan;
    std::string boundaries_out;
    std::vector<std::string> boundary_kinds{"criticality", "meansquare", "lyapunov"};
};

/// Reads a flat `key=value` file (`#` starts a comment, blank lines are
/// skipped) and returns the equivalent `--key=value` arguments.
/// Throws ValidationError on malformed lines, std::runtime_error on I/O.
std::vector<std::string> read_config_file(const std::string& path);

/// 17 significant digits, the CSV rendering of every floating value.
std::string format_double(double v);

/// Entry point shared by the executable and the tests. `args` excludes
/// the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dynamo::cli
