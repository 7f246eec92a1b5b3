#pragma once

#include "gabm/experiment_id.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gabm {

enum class Command { Run, Batch, Analyze, Plot };
enum class BackendChoice { Live, Scripted, Replay };
enum class AnalysisMode { A1, A2 };

namespace exit_code {
inline constexpr int kSuccess = 0;
inline constexpr int kUsage = 1;
inline constexpr int kRunFailure = 2;
inline constexpr int kAnalysisError = 3;
inline constexpr int kTransport = 4;
} // namespace exit_code

struct CliConfig {
    Command command = Command::Run;
    ExperimentId experiment = ExperimentId::E1;
    std::optional<double> temperature;
    int iterations = 100;
    int parallelism = 1;
    std::uint64_t seed = 0;
    BackendChoice backend = BackendChoice::Scripted;
    std::optional<BackendChoice> fallback;
    std::optional<std::string> model_id;
    std::optional<std::filesystem::path> cache;
    std::filesystem::path out_dir = "results";
    AnalysisMode mode = AnalysisMode::A1;
    std::vector<std::filesystem::path> batches;
    std::optional<std::filesystem::path> base;
    int n_agents = 20;
    bool help = false;
    std::string help_text;
};

/// argv excludes the program name. Throws UsageError carrying the help text on any invalid input.
CliConfig parse_args(const std::vector<std::string>& argv);

/// Executes the command and returns the process exit status.
int run_cli(const CliConfig& cfg, std::ostream& out, std::ostream& err);

/// parse_args + run_cli with usage errors mapped to exit status 1.
int cli_main(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

} // namespace gabm
