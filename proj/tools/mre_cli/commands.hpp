#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mre_cli/config.hpp"

namespace mre::cli {

enum class Command { Estimate, Risk, Sweep, Verify };

/// Throws ConfigError for unknown names.
Command parse_command(std::string_view name);
std::string_view to_string(Command command);

/// Exit statuses.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

struct RunResult {
  int status = kExitPass;
  nlohmann::json summary;
  std::vector<std::filesystem::path> files;
};

/// Runs one command and writes its report files under config.out:
///   estimate -> estimate.json
///   risk     -> risk.csv, risk.json
///   sweep    -> sweep.csv, sweep_by_population.csv, sweep.json
///   verify   -> verify.json
/// Human-readable progress goes to `log`. Throws ConfigError for configs the
/// command cannot use and IoError for unwritable outputs.
RunResult run(const RunConfig& config, Command command, std::ostream& log);

}  // namespace mre::cli
