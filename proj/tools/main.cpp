#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mre_cli/commands.hpp"
#include "mre_cli/config.hpp"
#include "mre_cli/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Minimum risk equivariant estimation and verification for replicated fixed-X designs"};
  app.set_help_all_flag("--help-all");

  std::string command;
  std::string config_path;
  mre::cli::Overrides overrides;
  std::uint64_t seed = 0;
  std::uint64_t replicates = 0;
  std::string out;
  unsigned threads = 0;

  app.add_option("command", command, "estimate | risk | sweep | verify")
      ->required()
      ->check(CLI::IsMember({"estimate", "risk", "sweep", "verify"}));
  app.add_option("--config", config_path, "JSON run configuration (built-in default when omitted)")
      ->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides config)");
  auto* reps_opt = app.add_option("--replicates", replicates, "Monte Carlo replicates (overrides config)");
  auto* out_opt = app.add_option("--out", out, "output directory (overrides config)");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads, 0 = all cores (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mre::cli::kExitConfig;
  }
  if (*seed_opt) overrides.seed = seed;
  if (*reps_opt) overrides.replicates = replicates;
  if (*out_opt) overrides.out = out;
  if (*threads_opt) overrides.threads = threads;

  try {
    const auto cfg = config_path.empty() ? mre::cli::parse_config(mre::cli::default_config_json(), overrides)
                                         : mre::cli::load_config(config_path, overrides);
    return mre::cli::run(cfg, mre::cli::parse_command(command), std::cout).status;
  } catch (const mre::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return mre::cli::kExitConfig;
  } catch (const mre::cli::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return mre::cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mre::cli::kExitFail;
  }
}
