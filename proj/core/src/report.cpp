#include "ssalt/report.hpp"

#include "ssalt/errors.hpp"

#include <fstream>

namespace ssalt {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

nlohmann::json to_rows(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(to_vector(m.row(r).transpose()));
  return rows;
}

}  // namespace

void to_json(nlohmann::json& j, const Interval& v) { j = {v.lower, v.upper}; }

void to_json(nlohmann::json& j, const StepStressDesign& v) {
  j = {{"x1", v.x1},         {"x2", v.x2},   {"x0", v.x0},
       {"tau1", v.tau1},     {"tau2", v.tau2}, {"inspection_times", v.inspection_times},
       {"risks", v.num_risks}};
}

void to_json(nlohmann::json& j, const CountData& v) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index l = 0; l < v.n.rows(); ++l) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index r = 0; r < v.n.cols(); ++r) row.push_back(v.n(l, r));
    rows.push_back(row);
  }
  j = {{"N", v.N}, {"survivors", v.n0}, {"counts", rows}};
}

void to_json(nlohmann::json& j, const Dataset& v) {
  j = {{"design", v.design}, {"data", v.data}, {"time_scale", v.time_scale}};
  if (v.arrhenius) {
    j["arrhenius"] = {{"T0", v.arrhenius->T0},
                      {"T_levels", v.arrhenius->T_levels},
                      {"boltzmann", v.arrhenius->boltzmann},
                      {"normalized", v.normalized},
                      {"stress_scale", v.stress_scale}};
  }
}

void to_json(nlohmann::json& j, const FitResult& v) {
  j = {{"beta", v.beta},
       {"params", to_vector(v.params_hat.vector())},
       {"loss", v.loss},
       {"converged", v.converged},
       {"gradient_norm", v.gradient_norm},
       {"iterations", v.iterations},
       {"N", v.N}};
  if (v.covariance.size() > 0) {
    j["covariance"] = to_rows(v.covariance);
    j["standard_errors"] = to_vector(v.standard_errors());
  }
}

void to_json(nlohmann::json& j, const CharacteristicSpec& v) {
  j = {{"name", v.name()}};
  if (v.risk) j["risk"] = *v.risk + 1;
  if (v.kind == CharacteristicKind::reliability) j["t0"] = v.t0;
  if (v.kind == CharacteristicKind::quantile) j["alpha0"] = v.alpha0;
}

void to_json(nlohmann::json& j, const CharacteristicEstimate& v) {
  j = {{"characteristic", v.spec},
       {"value", v.value},
       {"sigma", v.sigma},
       {"std_error", v.std_error},
       {"level", v.level},
       {"direct", v.ci_direct},
       {"transformed", v.ci_transformed},
       {"transformed_degenerate", v.transformed_degenerate}};
  if (v.ci_bootstrap) j["bootstrap"] = *v.ci_bootstrap;
}

void to_json(nlohmann::json& j, const BcaResult& v) {
  j = {{"interval", v.interval},
       {"estimate", v.estimate},
       {"z0", v.z0},
       {"acceleration", v.acceleration},
       {"gamma", {v.gamma_lower, v.gamma_upper}},
       {"bias_correction_degenerate", v.bias_correction_degenerate},
       {"regenerations", v.regenerations},
       {"B", v.replicates.size()}};
}

void to_json(nlohmann::json& j, const SensitivityCurve& v) {
  std::vector<int> cells;
  for (int c : v.cells) cells.push_back(c + 1);
  j = {{"kind", v.kind == SensitivityKind::gross_error ? "gross_error" : "self_standardized"},
       {"betas", v.betas},
       {"values", v.values},
       {"cells", cells}};
}

void to_json(nlohmann::json& j, const SimulationScenario& v) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : v.contamination_cells) cells.push_back({c.interval + 1, c.risk + 1});
  j = {{"design", v.design},
       {"params", to_vector(v.true_params.vector())},
       {"N", v.N},
       {"epsilon", v.contamination_fraction},
       {"contamination_cells", cells},
       {"replications", v.replications},
       {"betas", v.betas},
       {"seed", v.seed},
       {"t0", v.t0},
       {"alpha0", v.alpha0},
       {"level", v.level},
       {"B", v.bootstrap_B}};
}

void to_json(nlohmann::json& j, const SimulationReport& v) {
  nlohmann::json per_beta = nlohmann::json::array();
  for (std::size_t b = 0; b < v.betas.size(); ++b) {
    nlohmann::json entry = {{"beta", v.betas[b]},
                            {"param_mse", to_vector(v.param_mse[b])},
                            {"failed_fits", v.failed_fits[b]}};
    nlohmann::json chars = nlohmann::json::object();
    for (std::size_t c = 0; c < v.characteristics.size(); ++c)
      chars[v.characteristics[c].name()] = v.characteristic_mse[b][c];
    entry["characteristic_mse"] = chars;
    per_beta.push_back(entry);
  }
  nlohmann::json coverage = nlohmann::json::array();
  for (const auto& c : v.coverage)
    coverage.push_back({{"beta", c.beta},
                        {"characteristic", c.characteristic},
                        {"method", to_string(c.method)},
                        {"coverage", c.coverage},
                        {"mean_width", c.mean_width},
                        {"count", c.count}});
  j = {{"epsilon", v.contamination_fraction},
       {"N", v.N},
       {"replications", v.replications},
       {"discarded_datasets", v.discarded_datasets},
       {"mse", per_beta},
       {"coverage", coverage}};
}

void save_report(const nlohmann::json& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << report.dump(2) << '\n';
}

nlohmann::json load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
}

}  // namespace ssalt
