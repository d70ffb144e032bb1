#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mre/design.hpp"
#include "mre/losses.hpp"

namespace mre::cli {

/// Smallest replicate count a config may request.
inline constexpr std::uint64_t kMinReplicates = 100;

/// Thrown for anything wrong with a config; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double start = 0.1;
  double step = 0.05;
  std::size_t count = 29;
};

struct RunConfig {
  RunConfig(Design d, ParameterPoint t) : design(std::move(d)), theta(std::move(t)) {}

  Design design;
  ParameterPoint theta;
  /// Extra designs that `verify` runs its suites on, after `design`.
  std::vector<Design> verify_designs;
  std::string estimator = "ols";
  std::optional<LossKind> loss;
  std::uint64_t replicates = 100000;
  std::uint64_t seed = 0;
  GridSpec grid;
  /// Observed responses for `estimate`.
  std::optional<Vector> y;
  /// Random parameter points added to the reference point in orbit checks.
  std::size_t orbit_points = 10;
  /// Random trials per exact-identity suite in `verify`.
  std::size_t trials = 1000;
  unsigned threads = 0;
  std::filesystem::path out = ".";
};

/// Command-line values that take precedence over the config document.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicates;
  std::optional<std::filesystem::path> out;
  std::optional<unsigned> threads;
};

/// Built-in document used when no --config is given.
nlohmann::json default_config_json();

RunConfig parse_config(const nlohmann::json& doc, const Overrides& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

}  // namespace mre::cli
