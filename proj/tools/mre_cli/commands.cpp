#include "mre_cli/commands.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "mre/error.hpp"
#include "mre/estimators.hpp"
#include "mre/json_io.hpp"
#include "mre/risk.hpp"
#include "mre/rng.hpp"
#include "mre/verify.hpp"
#include "mre_cli/report.hpp"

namespace mre::cli {

namespace {

using nlohmann::json;

json check_to_json(const CheckResult& c) {
  return {{"name", c.name},
          {"verdict", std::string(to_string(c.verdict))},
          {"statistic", c.statistic},
          {"tolerance", c.tolerance},
          {"trials", c.trials},
          {"detail", c.detail}};
}

std::string band_verdict(double mean, double se, double target) {
  return std::abs(mean - target) <= kRiskBandSe * se ? "PASS" : "FAIL";
}

Estimator parse_estimator_or_throw(const std::string& spec) {
  try {
    return parse_estimator(spec);
  } catch (const mre::Error& e) {
    throw ConfigError(e.what());
  }
}

RunResult run_estimate(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.y) throw ConfigError("estimate needs observed responses under config key 'y'");
  RunResult result;
  try {
    const Design& design = cfg.design;
    const ResponseVector y(design, *cfg.y);
    json out = {{"command", "estimate"}};
    out["beta_ols"] = vector_to_json(ols_beta(design, y));
    if (design.fully_replicated()) {
      out["sigma2_quad_mre"] = vector_to_json(cov_estimate(design, y, CovWeights::shrinkage()));
      out["sigma2_lik_mre"] = vector_to_json(cov_estimate(design, y, CovWeights::unit()));
    }
    const Estimator est = parse_estimator_or_throw(cfg.estimator);
    out["estimator"] = describe(est);
    out["estimate"] = vector_to_json(estimate(design, est, y));
    out["metadata"] = run_metadata();
    log << out.dump(2) << '\n';
    const auto path = cfg.out / "estimate.json";
    write_file(path, out.dump(2) + "\n");
    result.summary = std::move(out);
    result.files.push_back(path);
  } catch (const mre::Error& e) {
    throw ConfigError(e.what());
  }
  return result;
}

RunResult run_risk(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.loss) throw ConfigError("risk needs a 'loss'");
  const Estimator est = parse_estimator_or_throw(cfg.estimator);
  RiskBreakdown risk;
  std::optional<double> analytic;
  try {
    check_compatible(est, *cfg.loss);
    risk = mc_risk_breakdown(cfg.design, est, *cfg.loss, cfg.theta, cfg.replicates, cfg.seed, {cfg.threads});
    analytic = analytic_risk(cfg.design, est, *cfg.loss);
  } catch (const mre::Error& e) {
    throw ConfigError(e.what());
  }

  std::optional<Vector> weights;
  if (const auto* cov = std::get_if<CovEstimator>(&est)) weights = cov->weights.constant_for(cfg.design);
  std::vector<CsvRow> rows;
  for (std::size_t i = 0; i < risk.populations.size(); ++i) {
    rows.push_back({std::to_string(i), weights ? std::optional((*weights)[static_cast<Index>(i)]) : std::nullopt,
                    risk.populations[i]});
  }
  std::optional<double> common_h;
  if (weights && (weights->array() == (*weights)[0]).all()) common_h = (*weights)[0];
  rows.push_back({"all", common_h, risk.total});

  json out = {{"command", "risk"},
              {"estimator", describe(est)},
              {"loss", std::string(to_string(*cfg.loss))},
              {"theta", to_json(cfg.theta)},
              {"mean_loss", risk.total.mean_loss},
              {"std_error", risk.total.std_error},
              {"replicates", risk.total.replicates},
              {"seed", risk.total.seed},
              {"failed", risk.total.failed}};
  RunResult result;
  if (analytic) {
    out["analytic"] = *analytic;
    out["z"] = risk.total.std_error > 0 ? (risk.total.mean_loss - *analytic) / risk.total.std_error : 0.0;
    out["verdict"] = band_verdict(risk.total.mean_loss, risk.total.std_error, *analytic);
  } else {
    out["analytic"] = nullptr;
    out["verdict"] = "SKIP";
  }
  out["metadata"] = run_metadata();
  if (out["verdict"] == "FAIL") result.status = kExitFail;

  log << "risk " << describe(est) << " / " << to_string(*cfg.loss) << ": " << format_real(risk.total.mean_loss)
      << " +- " << format_real(risk.total.std_error);
  if (analytic) log << " (analytic " << format_real(*analytic) << ", " << out["verdict"].get<std::string>() << ")";
  log << '\n';

  const auto csv = cfg.out / "risk.csv";
  const auto js = cfg.out / "risk.json";
  write_file(csv, to_csv(rows));
  write_file(js, out.dump(2) + "\n");
  result.summary = std::move(out);
  result.files = {csv, js};
  return result;
}

RunResult run_sweep(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.loss || !is_covariance_loss(*cfg.loss)) throw ConfigError("sweep needs loss 'quad' or 'lik'");
  const LossKind loss = *cfg.loss;
  const auto grid = make_grid(cfg.grid.start, cfg.grid.step, cfg.grid.count);
  SweepResult sweep;
  try {
    sweep = dominance_sweep(cfg.design, loss, grid, cfg.theta, cfg.replicates, cfg.seed, {cfg.threads});
  } catch (const mre::Error& e) {
    throw ConfigError(e.what());
  }

  std::vector<CsvRow> total_rows;
  std::vector<CsvRow> pop_rows;
  for (const auto& point : sweep.points) {
    total_rows.push_back({"all", point.h, point.total});
    for (std::size_t i = 0; i < point.populations.size(); ++i) {
      pop_rows.push_back({std::to_string(i), point.h, point.populations[i]});
    }
  }

  RunResult result;
  json pops = json::array();
  bool all_pass = true;
  const Vector w = shrinkage_weights(cfg.design);
  for (std::size_t i = 0; i < sweep.argmin_by_population.size(); ++i) {
    const double h_star = loss == LossKind::Quad ? w[static_cast<Index>(i)] : 1.0;
    const double h_min = grid[sweep.argmin_by_population[i]];
    // within one grid step, with slack for the decimal grid
    const bool pass = std::abs(h_min - h_star) <= cfg.grid.step * (1.0 + 1e-9);
    all_pass = all_pass && pass;
    pops.push_back({{"population", i},
                    {"argmin_h", h_min},
                    {"optimal_h", h_star},
                    {"min_risk", sweep.points[sweep.argmin_by_population[i]].populations[i].mean_loss},
                    {"verdict", pass ? "PASS" : "FAIL"}});
    log << "population " << i << ": argmin h = " << format_real(h_min) << " (optimal " << format_real(h_star)
        << ") " << (pass ? "PASS" : "FAIL") << '\n';
  }
  json out = {{"command", "sweep"},
              {"loss", std::string(to_string(loss))},
              {"grid", {{"start", cfg.grid.start}, {"step", cfg.grid.step}, {"count", cfg.grid.count}}},
              {"replicates", cfg.replicates},
              {"seed", cfg.seed},
              {"argmin_total_h", grid[sweep.argmin_total]},
              {"populations", pops},
              {"verdict", all_pass ? "PASS" : "FAIL"},
              {"metadata", run_metadata()}};
  if (!all_pass) result.status = kExitFail;

  const auto csv = cfg.out / "sweep.csv";
  const auto pop_csv = cfg.out / "sweep_by_population.csv";
  const auto js = cfg.out / "sweep.json";
  write_file(csv, to_csv(total_rows));
  write_file(pop_csv, to_csv(pop_rows));
  write_file(js, out.dump(2) + "\n");
  result.summary = std::move(out);
  result.files = {csv, pop_csv, js};
  return result;
}

std::vector<ParameterPoint> orbit_points(Index p, std::size_t count, std::uint64_t seed) {
  std::vector<ParameterPoint> thetas{ParameterPoint::reference(p)};
  const std::uint64_t base = tagged_seed(seed, StreamTag::Orbit);
  for (std::size_t k = 0; k < count; ++k) {
    Engine engine = substream(base, k);
    thetas.push_back(random_parameter(engine, p));
  }
  return thetas;
}

void verify_design(const RunConfig& cfg, const Design& design, const std::string& label, std::vector<CheckResult>& out,
                   std::ostream& log) {
  auto record = [&](CheckResult c) {
    c.name = label + "." + c.name;
    log << "  " << to_string(c.verdict) << "  " << c.name << "  (" << format_real(c.statistic) << " vs "
        << format_real(c.tolerance) << ")\n";
    out.push_back(std::move(c));
  };
  const Index p = design.populations();
  const std::size_t trials = cfg.trials;

  record(check_group_laws(design, trials, cfg.seed));
  record(check_loss_invariance(design, trials, cfg.seed));
  record(check_transitivity(design, trials, cfg.seed));
  record(check_maximal_invariance(design, trials, cfg.seed));

  std::vector<std::pair<std::string, Estimator>> equivariant;
  equivariant.emplace_back("ols", OlsEstimator{});
  if (design.single_tail()) {
    equivariant.emplace_back("equivariant_beta", EquivariantBetaEstimator{OmegaSpec::constant(Vector::Ones(p))});
  }
  if (design.fully_replicated()) equivariant.emplace_back("cov_W", CovEstimator{CovWeights::shrinkage()});
  const std::size_t transforms = std::max<std::size_t>(1, trials / 10);
  for (const auto& [name, est] : equivariant) {
    const EquivarianceReport rep = equivariance_check(design, est, transforms, 10, cfg.seed);
    record({"equivariance[" + name + "]", rep.pass ? Verdict::Pass : Verdict::Fail, rep.max_deviation,
            kEquivarianceTolerance, rep.pairs, "resampled=" + std::to_string(rep.resampled)});
  }

  std::vector<std::tuple<std::string, Estimator, LossKind>> orbit_cases;
  orbit_cases.emplace_back("ols/beta", OlsEstimator{}, LossKind::Beta);
  if (design.fully_replicated()) orbit_cases.emplace_back("cov_W/quad", CovEstimator{CovWeights::shrinkage()}, LossKind::Quad);
  const auto thetas = orbit_points(p, cfg.orbit_points, cfg.seed);
  for (const auto& [name, est, loss] : orbit_cases) {
    const OrbitReport rep =
        orbit_constancy_check(design, est, loss, thetas, cfg.replicates, cfg.seed, true, {cfg.threads});
    record({"orbit_constancy[" + name + "]", rep.pass ? Verdict::Pass : Verdict::Fail, rep.max_z, kRiskBandSe,
            rep.risks.size(), "reference risk " + format_real(rep.risks.front().mean_loss)});
    if (const auto analytic = analytic_risk(design, est, loss)) {
      double worst = 0.0;
      for (const auto& r : rep.risks) worst = std::max(worst, std::abs(r.mean_loss - *analytic) / r.std_error);
      record({"risk_oracle[" + name + "]", worst <= kRiskBandSe ? Verdict::Pass : Verdict::Fail, worst, kRiskBandSe,
              rep.risks.size(), "analytic " + format_real(*analytic)});
    }
  }
}

RunResult run_verify(const RunConfig& cfg, std::ostream& log) {
  std::vector<CheckResult> checks;
  std::vector<const Design*> designs{&cfg.design};
  for (const auto& d : cfg.verify_designs) designs.push_back(&d);
  try {
    for (std::size_t k = 0; k < designs.size(); ++k) {
      log << "design[" << k << "]\n";
      verify_design(cfg, *designs[k], "design[" + std::to_string(k) + "]", checks, log);
    }
  } catch (const mre::Error& e) {
    throw ConfigError(e.what());
  }
  RunResult result;
  json arr = json::array();
  bool failed = false;
  for (const auto& c : checks) {
    failed = failed || c.verdict == Verdict::Fail;
    arr.push_back(check_to_json(c));
  }
  json out = {{"command", "verify"},
              {"seed", cfg.seed},
              {"replicates", cfg.replicates},
              {"checks", arr},
              {"verdict", failed ? "FAIL" : "PASS"},
              {"metadata", run_metadata()}};
  result.status = failed ? kExitFail : kExitPass;
  log << (failed ? "FAIL" : "PASS") << '\n';
  const auto js = cfg.out / "verify.json";
  write_file(js, out.dump(2) + "\n");
  result.summary = std::move(out);
  result.files = {js};
  return result;
}

}  // namespace

Command parse_command(std::string_view name) {
  if (name == "estimate") return Command::Estimate;
  if (name == "risk") return Command::Risk;
  if (name == "sweep") return Command::Sweep;
  if (name == "verify") return Command::Verify;
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Estimate: return "estimate";
    case Command::Risk: return "risk";
    case Command::Sweep: return "sweep";
    case Command::Verify: return "verify";
  }
  return "?";
}

RunResult run(const RunConfig& config, Command command, std::ostream& log) {
  switch (command) {
    case Command::Estimate: return run_estimate(config, log);
    case Command::Risk: return run_risk(config, log);
    case Command::Sweep: return run_sweep(config, log);
    case Command::Verify: return run_verify(config, log);
  }
  throw ConfigError("unknown command");
}

}  // namespace mre::cli
