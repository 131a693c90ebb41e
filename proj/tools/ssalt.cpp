// ssalt: step-stress competing-risks analysis from the command line.
//
//   ssalt fit data.txt --beta 0 --beta 0.5
//   ssalt characterize data.txt --t0 4 --alpha0 0.5 --B 1000 --seed 7
//   ssalt bootstrap data.txt --beta 0 --target mttf --B 1000
//   ssalt sensitivity scenario.txt --kind self
//   ssalt simulate scenario.txt --epsilon 0 --epsilon 0.3 --reps 200

#include "ssalt/bootstrap.hpp"
#include "ssalt/characteristics.hpp"
#include "ssalt/errors.hpp"
#include "ssalt/io.hpp"
#include "ssalt/report.hpp"
#include "ssalt/robustness.hpp"
#include "ssalt/simulation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace ssalt;
using nlohmann::json;

enum ExitCode { ok = 0, other_error = 1, usage_error = 2, parse_error = 3, ill_posed = 4,
                non_convergence = 5, singular = 6 };

const std::vector<double> default_betas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

struct CommonOptions {
  std::string input;
  std::vector<double> betas;
  double level = 0.95;
  std::string out;
};

struct DataOptions {
  double time_scale = 1.0;
  std::optional<bool> normalize_stress;
};

struct CharacteristicOptions {
  double t0 = 4.0;
  double alpha0 = 0.5;
  int B = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
};

const std::vector<double>& betas_or_default(const CommonOptions& c) {
  return c.betas.empty() ? default_betas : c.betas;
}

Dataset load(const CommonOptions& c, const DataOptions& d) {
  LoadOptions options;
  options.time_scale = d.time_scale;
  options.normalize_stress = d.normalize_stress;
  return load_dataset(c.input, options);
}

void write_out(const CommonOptions& c, const json& doc) {
  if (!c.out.empty()) save_report(doc, c.out);
}

std::string interval_text(const Interval& i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "[%.4f, %.4f]", i.lower, i.upper);
  return buf;
}

void print_design(const Dataset& ds) {
  const auto& d = ds.design;
  std::printf("design: x1 = %g, x2 = %g, x0 = %g, tau1 = %g, tau2 = %g, N = %d, risks = %d\n", d.x1, d.x2,
              d.x0, d.tau1, d.tau2, ds.data.N, d.num_risks);
}

int run_fit(const CommonOptions& c, const DataOptions& dopt) {
  const Dataset ds = load(c, dopt);
  print_design(ds);
  json fits = json::array();
  for (double beta : betas_or_default(c)) {
    const FitResult f = fit(ds.data, ds.design, beta);
    const auto cis = param_confidence_interval(f, c.level);
    const Eigen::VectorXd se = f.standard_errors();
    std::printf("\nbeta = %g  (loss %.6g, iterations %d, |g| %.2e)\n", beta, f.loss, f.iterations,
                f.gradient_norm);
    std::printf("  %-6s %12s %12s  %s\n", "coef", "estimate", "std.err", "CI");
    for (int i = 0; i < f.params_hat.size(); ++i) {
      const std::string name = std::string(i % 2 == 0 ? "a0" : "a1") + std::to_string(i / 2 + 1);
      std::printf("  %-6s %12.6f %12.6f  %s\n", name.c_str(), f.params_hat[i], se[i],
                  interval_text(cis[static_cast<std::size_t>(i)]).c_str());
    }
    std::printf("  Sigma:\n");
    for (Eigen::Index r = 0; r < f.covariance.rows(); ++r) {
      std::printf("   ");
      for (Eigen::Index k = 0; k < f.covariance.cols(); ++k) std::printf(" %12.5g", f.covariance(r, k));
      std::printf("\n");
    }
    json entry = f;
    json ci = json::array();
    for (const auto& i : cis) ci.push_back(i);
    entry["confidence_intervals"] = ci;
    entry["level"] = c.level;
    fits.push_back(entry);
  }
  write_out(c, {{"command", "fit"}, {"dataset", ds}, {"fits", fits}});
  return ok;
}

int run_characterize(const CommonOptions& c, const DataOptions& dopt, const CharacteristicOptions& o) {
  const Dataset ds = load(c, dopt);
  print_design(ds);
  const std::vector<CharacteristicSpec> specs{CharacteristicSpec::mttf(), CharacteristicSpec::reliability(o.t0),
                                              CharacteristicSpec::quantile(o.alpha0)};
  const auto& betas = betas_or_default(c);
  std::vector<FitResult> fits;
  for (double beta : betas) fits.push_back(fit(ds.data, ds.design, beta));

  json blocks = json::array();
  for (const auto& spec : specs) {
    std::printf("\n%s", spec.name().c_str());
    if (spec.kind == CharacteristicKind::reliability) std::printf(" at t0 = %g", spec.t0);
    if (spec.kind == CharacteristicKind::quantile) std::printf(" at alpha0 = %g", spec.alpha0);
    std::printf("\n  %-6s %10s  %-22s %-22s %s\n", "beta", "estimate", "direct CI", "transformed CI",
                o.B > 0 ? "bootstrap CI" : "");
    json rows = json::array();
    for (std::size_t b = 0; b < betas.size(); ++b) {
      CharacteristicEstimate e = estimate_characteristic(fits[b], ds.design, spec, c.level);
      if (o.B > 0) {
        BootstrapConfig config;
        config.B = o.B;
        config.seed = o.seed;
        config.level = c.level;
        config.target = spec;
        config.threads = o.threads;
        e.ci_bootstrap = bca_interval(ds.data, ds.design, betas[b], config, fits[b]).interval;
      }
      std::printf("  %-6g %10.4f  %-22s %-22s %s\n", betas[b], e.value, interval_text(e.ci_direct).c_str(),
                  interval_text(e.ci_transformed).c_str(),
                  e.ci_bootstrap ? interval_text(*e.ci_bootstrap).c_str() : "");
      json row = e;
      row["beta"] = betas[b];
      rows.push_back(row);
    }
    blocks.push_back(rows);
  }
  json doc = {{"command", "characterize"}, {"dataset", ds}, {"level", c.level}, {"characteristics", blocks}};
  if (o.B > 0) doc["bootstrap"] = {{"B", o.B}, {"seed", o.seed}};
  write_out(c, doc);
  return ok;
}

Statistic parse_target(const std::string& target, const CharacteristicOptions& o) {
  if (target == "mttf") return CharacteristicSpec::mttf();
  if (target == "reliability") return CharacteristicSpec::reliability(o.t0);
  if (target == "quantile" || target == "median") return CharacteristicSpec::quantile(o.alpha0);
  if (target.rfind("param:", 0) == 0) return ParamIndex{std::stoi(target.substr(6)) - 1};
  throw DomainError("unknown bootstrap target '" + target + "'");
}

int run_bootstrap(const CommonOptions& c, const DataOptions& dopt, const CharacteristicOptions& o,
                  const std::string& target) {
  const Dataset ds = load(c, dopt);
  print_design(ds);
  std::printf("\n  %-6s %10s  %-22s %8s %8s\n", "beta", "estimate", "BCa CI", "z0", "a");
  json rows = json::array();
  for (double beta : betas_or_default(c)) {
    BootstrapConfig config;
    config.B = o.B;
    config.seed = o.seed;
    config.level = c.level;
    config.target = parse_target(target, o);
    config.threads = o.threads;
    const BcaResult r = bca_interval(ds.data, ds.design, beta, config);
    std::printf("  %-6g %10.4f  %-22s %8.4f %8.4f%s\n", beta, r.estimate, interval_text(r.interval).c_str(), r.z0,
                r.acceleration, r.bias_correction_degenerate ? "  (percentile)" : "");
    json row = r;
    row["beta"] = beta;
    rows.push_back(row);
  }
  write_out(c, {{"command", "bootstrap"},
                {"dataset", ds},
                {"target", target},
                {"B", o.B},
                {"seed", o.seed},
                {"level", c.level},
                {"results", rows}});
  return ok;
}

int run_sensitivity(const CommonOptions& c, const std::string& kind_name) {
  const SimulationScenario s = load_scenario(c.input);
  const SensitivityKind kind =
      kind_name == "gross" ? SensitivityKind::gross_error : SensitivityKind::self_standardized;
  std::vector<double> betas = c.betas;
  if (betas.empty())
    for (int k = 0; k <= 20; ++k) betas.push_back(0.05 * k);
  const SensitivityCurve curve = sensitivity_curve(s.true_params, s.design, betas, kind);
  std::printf("%-8s %14s %6s\n", "beta", kind == SensitivityKind::gross_error ? "gamma" : "gamma*", "cell");
  for (std::size_t k = 0; k < betas.size(); ++k)
    std::printf("%-8g %14.6f %6d\n", betas[k], curve.values[k], curve.cells[k] + 1);
  write_out(c, {{"command", "sensitivity"}, {"scenario", s}, {"curve", curve}});
  return ok;
}

struct SimulateOptions {
  std::vector<double> epsilons;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  std::optional<int> B;
  std::vector<std::string> methods{"direct", "transformed"};
  std::vector<double> bca_betas;
  int threads = 0;
};

int run_simulate(const CommonOptions& c, const SimulateOptions& o) {
  SimulationScenario base = load_scenario(c.input);
  if (!c.betas.empty()) base.betas = c.betas;
  if (o.reps) base.replications = *o.reps;
  if (o.seed) base.seed = *o.seed;
  if (o.B) base.bootstrap_B = *o.B;
  base.level = c.level;
  base.threads = o.threads;

  StudyOptions study;
  study.characteristics = {CharacteristicSpec::mttf(), CharacteristicSpec::reliability(base.t0),
                           CharacteristicSpec::quantile(base.alpha0)};
  for (const auto& m : o.methods) {
    if (m == "direct") study.methods.push_back(IntervalMethod::direct);
    else if (m == "transformed") study.methods.push_back(IntervalMethod::transformed);
    else if (m == "bca") study.methods.push_back(IntervalMethod::bca);
    else throw DomainError("unknown interval method '" + m + "'");
  }
  study.bca_betas = o.bca_betas;

  const std::vector<double> epsilons =
      o.epsilons.empty() ? std::vector<double>{base.contamination_fraction} : o.epsilons;
  json reports = json::array();
  for (double eps : epsilons) {
    SimulationScenario s = base;
    s.contamination_fraction = eps;
    const SimulationReport r = run_study(s, study);
    std::printf("\nepsilon = %g, N = %d, %d replications, %d discarded data sets\n", eps, s.N, s.replications,
                r.discarded_datasets);
    std::printf("  %-6s %11s %11s %11s %11s %11s %11s %11s\n", "beta", "mse(a01)", "mse(a11)", "mse(a02)",
                "mse(a12)", "mse(E)", "mse(R)", "mse(Q)");
    for (std::size_t b = 0; b < r.betas.size(); ++b) {
      std::printf("  %-6g", r.betas[b]);
      for (Eigen::Index i = 0; i < r.param_mse[b].size(); ++i) std::printf(" %11.4g", r.param_mse[b][i]);
      for (double v : r.characteristic_mse[b]) std::printf(" %11.4g", v);
      std::printf("\n");
    }
    std::printf("  %-6s %-12s %-12s %9s %11s\n", "beta", "quantity", "method", "coverage", "width");
    for (const auto& cell : r.coverage)
      std::printf("  %-6g %-12s %-12s %9.3f %11.4f\n", cell.beta, cell.characteristic.name().c_str(),
                  to_string(cell.method).c_str(), cell.coverage, cell.mean_width);
    reports.push_back({{"scenario", s}, {"report", r}});
  }
  write_out(c, {{"command", "simulate"}, {"studies", reports}});
  return ok;
}

void add_common(CLI::App* cmd, CommonOptions& c, const char* input_help) {
  cmd->add_option("input", c.input, input_help)->required();
  cmd->add_option("--beta", c.betas, "DPD tuning parameter; repeatable (default 0, 0.2, ..., 1)");
  cmd->add_option("--level", c.level, "Confidence level")->capture_default_str();
  cmd->add_option("--out", c.out, "Write a JSON document with every printed number");
}

void add_data(CLI::App* cmd, DataOptions& d) {
  cmd->add_option("--time-scale", d.time_scale, "Multiply every time in the data file")->capture_default_str();
  cmd->add_option("--normalize-stress", d.normalize_stress,
                  "Map the Arrhenius level farthest from x0 to 1 (default: file setting, else on)");
}

void add_characteristic(CLI::App* cmd, CharacteristicOptions& o) {
  cmd->add_option("--t0", o.t0, "Mission time for reliability")->capture_default_str();
  cmd->add_option("--alpha0", o.alpha0, "Quantile level")->capture_default_str();
  cmd->add_option("--B", o.B, "Bootstrap replicates")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Bootstrap seed")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust estimation for interval-monitored step-stress tests with competing risks"};
  app.require_subcommand(1);

  CommonOptions common;
  DataOptions data;
  CharacteristicOptions chars;
  std::string target = "mttf";
  std::string kind = "self";
  SimulateOptions sim;

  auto* fit_cmd = app.add_subcommand("fit", "Minimum DPD estimates, covariance and coefficient intervals");
  add_common(fit_cmd, common, "Dataset file");
  add_data(fit_cmd, data);

  auto* char_cmd = app.add_subcommand("characterize", "MTTF, reliability and quantile with intervals");
  add_common(char_cmd, common, "Dataset file");
  add_data(char_cmd, data);
  add_characteristic(char_cmd, chars);

  auto* boot_cmd = app.add_subcommand("bootstrap", "Parametric BCa bootstrap interval");
  add_common(boot_cmd, common, "Dataset file");
  add_data(boot_cmd, data);
  add_characteristic(boot_cmd, chars);
  boot_cmd->add_option("--target", target, "mttf, reliability, median, quantile or param:K")
      ->capture_default_str();

  auto* sens_cmd = app.add_subcommand("sensitivity", "Sensitivity curve over beta at a scenario's parameters");
  add_common(sens_cmd, common, "Scenario file");
  sens_cmd->add_option("--kind", kind, "self or gross")
      ->check(CLI::IsMember({"self", "gross"}))
      ->capture_default_str();

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo MSE and coverage study");
  add_common(sim_cmd, common, "Scenario file");
  sim_cmd->add_option("--epsilon", sim.epsilons, "Contamination fraction; repeatable (default: scenario)");
  sim_cmd->add_option("--reps", sim.reps, "Replications (default: scenario)");
  sim_cmd->add_option("--seed", sim.seed, "Seed (default: scenario)");
  sim_cmd->add_option("--B", sim.B, "Bootstrap replicates for BCa (default: scenario)");
  sim_cmd->add_option("--methods", sim.methods, "Interval methods: direct transformed bca")
      ->capture_default_str();
  sim_cmd->add_option("--bca-beta", sim.bca_betas, "Restrict BCa to these betas; repeatable");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0: all cores)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage_error;
  }

  try {
    if (*fit_cmd) return run_fit(common, data);
    if (*char_cmd) return run_characterize(common, data, chars);
    if (*boot_cmd) return run_bootstrap(common, data, chars, target);
    if (*sens_cmd) return run_sensitivity(common, kind);
    if (*sim_cmd) return run_simulate(common, sim);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return parse_error;
  } catch (const IllPosedError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ill_posed;
  } catch (const NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return non_convergence;
  } catch (const SingularInformationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return singular;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return other_error;
  }
  return usage_error;
}
