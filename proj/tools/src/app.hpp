#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace fbmm::cli {

enum class ExitCode : int { ok = 0, failure = 1, invalid_config = 2 };

struct RunConfig {
    std::string command;
    /// Unset means the command's default (0.75 where one H is needed).
    std::optional<double> hurst;
    /// Unset means the command's default (200; 500 for profile; 20 for kernel).
    std::optional<long> n;
    double gap_tol = 1e-6;
    std::uint64_t seed = 42;
    long paths = 100000;
    std::string output_dir = ".";
    /// csv, json or svg; unset means the command's default.
    std::optional<std::string> format;
    /// Worker cap; 0 = hardware concurrency.
    unsigned threads = 0;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws ConfigError on an unknown command, H outside (0.5, 1), N < 1,
/// non-positive gap_tol or paths, or a format the command cannot write.
void validate(const RunConfig& config);

/// Reads FBM_THREADS (unset or empty = 0). Throws ConfigError if malformed.
unsigned threads_from_env();

/// Executes one command. Progress and file names go to out, diagnostics to err.
ExitCode run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and runs it. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fbmm::cli
