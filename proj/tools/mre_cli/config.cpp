#include "mre_cli/config.hpp"

#include <fstream>

#include "mre/error.hpp"
#include "mre/json_io.hpp"

namespace mre::cli {

namespace {

template <typename T>
T get_or(const nlohmann::json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  return doc.at(key).get<T>();
}

}  // namespace

nlohmann::json default_config_json() {
  return nlohmann::json::parse(R"({
    "xp": [[1, 0], [1, 1]],
    "reps": [1, 3],
    "beta": [0, 0],
    "sigma2": [1, 1],
    "verify_designs": [{"xp": [[1, 0], [1, 1]], "reps": [3, 3]}],
    "estimator": "ols",
    "loss": "beta",
    "replicates": 100000,
    "seed": 20240601,
    "grid": {"start": 0.1, "step": 0.05, "count": 29},
    "orbit_points": 10,
    "trials": 1000
  })");
}

RunConfig parse_config(const nlohmann::json& doc, const Overrides& overrides) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  try {
    Design design = design_from_json(doc);
    ParameterPoint theta = doc.contains("beta") || doc.contains("sigma2")
                               ? parameter_from_json(doc)
                               : ParameterPoint::reference(design.populations());
    if (theta.dimension() != design.populations()) throw ConfigError("beta/sigma2 length must equal p");
    RunConfig cfg(std::move(design), std::move(theta));

    if (doc.contains("verify_designs")) {
      for (const auto& d : doc.at("verify_designs")) cfg.verify_designs.push_back(design_from_json(d));
    }
    cfg.estimator = get_or<std::string>(doc, "estimator", cfg.estimator);
    if (doc.contains("loss")) cfg.loss = parse_loss(doc.at("loss").get<std::string>());
    if (doc.contains("replicates")) {
      const auto r = doc.at("replicates").get<long long>();
      if (r < 0) throw ConfigError("replicates must be non-negative");
      cfg.replicates = static_cast<std::uint64_t>(r);
    }
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    else if (!overrides.seed) throw ConfigError("a seed is required (config key 'seed' or --seed)");
    if (doc.contains("grid")) {
      const auto& g = doc.at("grid");
      cfg.grid.start = get_or<double>(g, "start", cfg.grid.start);
      cfg.grid.step = get_or<double>(g, "step", cfg.grid.step);
      cfg.grid.count = get_or<std::size_t>(g, "count", cfg.grid.count);
      if (!(cfg.grid.start > 0.0) || !(cfg.grid.step > 0.0) || cfg.grid.count == 0) {
        throw ConfigError("grid needs start > 0, step > 0 and count >= 1");
      }
    }
    if (doc.contains("y")) cfg.y = vector_from_json(doc.at("y"), "y");
    cfg.orbit_points = get_or<std::size_t>(doc, "orbit_points", cfg.orbit_points);
    cfg.trials = get_or<std::size_t>(doc, "trials", cfg.trials);
    cfg.threads = get_or<unsigned>(doc, "threads", cfg.threads);
    if (doc.contains("out")) cfg.out = doc.at("out").get<std::string>();

    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.replicates) cfg.replicates = *overrides.replicates;
    if (overrides.out) cfg.out = *overrides.out;
    if (overrides.threads) cfg.threads = *overrides.threads;

    if (cfg.replicates < kMinReplicates) {
      throw ConfigError("replicates = " + std::to_string(cfg.replicates) + " is below the minimum of " +
                        std::to_string(kMinReplicates));
    }
    if (cfg.trials == 0) throw ConfigError("trials must be positive");
    return cfg;
  } catch (const mre::Error& e) {
    throw ConfigError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc, overrides);
}

}  // namespace mre::cli
