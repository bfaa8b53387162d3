#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nirikshak/runner.hpp"

namespace nirikshak {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Fully resolved configuration for `run` and `graph`.
struct CliConfig {
    RunConfig run;
    std::vector<ResourceSetup> resources;
};

/// Load and validate the config file. Relative resource/endpoint paths
/// resolve against the config file's directory. Precedence for runtime
/// knobs: CLI flag > NIRIKSHAK_SEED (seed only) > config file > default.
CliConfig load_cli_config(const std::string& config_path);

struct RunOptions {
    std::string config_path;
    std::string out_path;
    std::optional<uint64_t> seed;
    std::optional<int> steps;
    std::optional<int> iterations;
    std::optional<int> setup_instances;
};

struct AnalyzeOptions {
    std::string log_path;
    std::string out_path;
    std::optional<std::string> html_path;
    std::optional<double> eps;
    std::optional<int> min_pts;
};

struct GraphOptions {
    std::string config_path;
    std::string out_path;
};

int cmd_run(const RunOptions& options);
int cmd_analyze(const AnalyzeOptions& options);
int cmd_graph(const GraphOptions& options);

/// Self-contained single-file report: ratio block, hierarchy tree,
/// cluster table when present.
std::string render_html_report(const AnalysisReport& report);

} // namespace nirikshak
