#include "ssalt/simulation.hpp"

#include "ssalt/bootstrap.hpp"
#include "ssalt/errors.hpp"
#include "ssalt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace ssalt {

std::string to_string(IntervalMethod method) {
  switch (method) {
    case IntervalMethod::direct: return "direct";
    case IntervalMethod::transformed: return "transformed";
    case IntervalMethod::bca: return "bca";
  }
  return "unknown";
}

void SimulationScenario::validate() const {
  design.validate();
  if (true_params.num_risks() != design.num_risks)
    throw DomainError("true parameters do not match the number of risks");
  if (N <= 0) throw DomainError("N must be positive");
  if (!(contamination_fraction >= 0.0 && contamination_fraction <= 1.0))
    throw DomainError("contamination fraction must lie in [0, 1]");
  if (contamination_fraction > 0.0 && contamination_cells.empty())
    throw DomainError("contamination needs at least one target cell");
  for (const auto& c : contamination_cells)
    if (c.interval < 0 || c.interval >= design.num_intervals() || c.risk < 0 ||
        c.risk >= design.num_risks)
      throw DomainError("contamination cell outside the design");
  if (replications <= 0) throw DomainError("replications must be positive");
  if (betas.empty()) throw DomainError("beta grid is empty");
  for (double b : betas)
    if (!(b >= 0.0)) throw DomainError("beta must be nonnegative");
}

std::vector<CellTarget> SimulationScenario::default_contamination_cells(
    const StepStressDesign& design) {
  std::vector<CellTarget> out;
  for (int l = 1; l < std::min(3, design.num_intervals()); ++l)
    for (int j = 0; j < design.num_risks; ++j) out.push_back({l, j});
  return out;
}

CountData generate_contaminated(const SimulationScenario& scenario, Rng& rng, int* discarded) {
  scenario.validate();
  const int outliers = static_cast<int>(std::floor(scenario.contamination_fraction * scenario.N));
  if (outliers == 0)
    return simulate_dataset(scenario.true_params, scenario.design, scenario.N, rng,
                            scenario.max_regenerations, discarded);

  const auto cells = static_cast<std::uint64_t>(scenario.contamination_cells.size());
  for (int attempt = 0; attempt <= scenario.max_regenerations; ++attempt) {
    CountData data;
    if (outliers < scenario.N) {
      data = simulate_counts(scenario.true_params, scenario.design, scenario.N - outliers, rng);
    } else {
      data.n = Eigen::MatrixXi::Zero(scenario.design.num_intervals(), scenario.design.num_risks);
    }
    for (int u = 0; u < outliers; ++u) {
      const auto pick = static_cast<std::size_t>(
          std::min<std::uint64_t>(static_cast<std::uint64_t>(uniform01(rng) * cells), cells - 1));
      const CellTarget& c = scenario.contamination_cells[pick];
      ++data.n(c.interval, c.risk);
    }
    data.N = scenario.N;
    if (data.well_posed(scenario.design)) return data;
    if (discarded) ++*discarded;
  }
  throw DegenerateDataError("no well-posed contaminated data set after " +
                            std::to_string(scenario.max_regenerations) + " regenerations");
}

const CoverageCell* SimulationReport::find(double beta, const std::string& characteristic,
                                           IntervalMethod method) const {
  for (const auto& c : coverage)
    if (c.beta == beta && c.method == method && c.characteristic.name() == characteristic)
      return &c;
  return nullptr;
}

namespace {

struct ReplicateOutcome {
  bool ok = false;
  Eigen::VectorXd params;
  std::vector<double> values;  // per characteristic
  // [characteristic][method]: interval, empty when unavailable
  std::vector<std::vector<std::optional<Interval>>> intervals;
};

bool wants(const std::vector<IntervalMethod>& methods, IntervalMethod m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

}  // namespace

SimulationReport run_study(const SimulationScenario& scenario, const StudyOptions& options) {
  scenario.validate();
  if (scenario.contamination_fraction >= 1.0)
    throw DomainError("a study needs some uncontaminated units");

  const std::size_t nb = scenario.betas.size();
  const std::size_t nc = options.characteristics.size();
  const std::size_t nm = options.methods.size();
  const bool need_covariance =
      wants(options.methods, IntervalMethod::direct) || wants(options.methods, IntervalMethod::transformed);
  const auto bca_for = [&](double beta) {
    if (!wants(options.methods, IntervalMethod::bca)) return false;
    if (options.bca_betas.empty()) return true;
    return std::find(options.bca_betas.begin(), options.bca_betas.end(), beta) !=
           options.bca_betas.end();
  };

  std::vector<double> truth(nc);
  for (std::size_t c = 0; c < nc; ++c)
    truth[c] = characteristic_value(scenario.true_params, scenario.design, options.characteristics[c]);

  const auto reps = static_cast<std::size_t>(scenario.replications);
  std::vector<std::vector<ReplicateOutcome>> outcomes(reps, std::vector<ReplicateOutcome>(nb));
  std::vector<int> discarded(reps, 0);

  parallel_for(reps, scenario.threads, [&](std::size_t r) {
    Rng rng = make_stream(scenario.seed, r);
    const CountData data = generate_contaminated(scenario, rng, &discarded[r]);

    for (std::size_t b = 0; b < nb; ++b) {
      const double beta = scenario.betas[b];
      ReplicateOutcome& out = outcomes[r][b];
      FitOptions fit_options;
      fit_options.compute_covariance = need_covariance;
      FitResult f;
      try {
        f = fit(data, scenario.design, beta, fit_options);
      } catch (const Error&) {
        continue;
      }
      out.ok = true;
      out.params = f.params_hat.vector();
      out.values.resize(nc);
      out.intervals.assign(nc, std::vector<std::optional<Interval>>(nm));
      for (std::size_t c = 0; c < nc; ++c) {
        const CharacteristicSpec& spec = options.characteristics[c];
        out.values[c] = characteristic_value(f.params_hat, scenario.design, spec);
        std::optional<CharacteristicEstimate> est;
        if (need_covariance) est = estimate_characteristic(f, scenario.design, spec, scenario.level);
        for (std::size_t m = 0; m < nm; ++m) {
          switch (options.methods[m]) {
            case IntervalMethod::direct: out.intervals[c][m] = est->ci_direct; break;
            case IntervalMethod::transformed: out.intervals[c][m] = est->ci_transformed; break;
            case IntervalMethod::bca: {
              if (!bca_for(beta)) break;
              BootstrapConfig config;
              config.B = scenario.bootstrap_B;
              config.seed = scenario.seed ^ (0x9E3779B97F4A7C15ull * (r + 1) + 0x632BE59BD9B4E019ull * (b + 1) + c);
              config.level = scenario.level;
              config.target = spec;
              config.max_regenerations = scenario.max_regenerations;
              config.threads = 1;
              try {
                out.intervals[c][m] = bca_interval(data, scenario.design, beta, config, f).interval;
              } catch (const Error&) {
              }
              break;
            }
          }
        }
      }
    }
  });

  SimulationReport report;
  report.contamination_fraction = scenario.contamination_fraction;
  report.N = scenario.N;
  report.replications = scenario.replications;
  report.betas = scenario.betas;
  report.characteristics = options.characteristics;
  for (int d : discarded) report.discarded_datasets += d;

  const Eigen::VectorXd& a0 = scenario.true_params.vector();
  for (std::size_t b = 0; b < nb; ++b) {
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(a0.size());
    std::vector<double> char_sq(nc, 0.0);
    int ok = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& o = outcomes[r][b];
      if (!o.ok) continue;
      ++ok;
      sq += (o.params - a0).array().square().matrix();
      for (std::size_t c = 0; c < nc; ++c) char_sq[c] += (o.values[c] - truth[c]) * (o.values[c] - truth[c]);
    }
    const int failed = scenario.replications - ok;
    if (failed > 0.2 * scenario.replications)
      throw SimulationError("more than 20% of the fits failed at beta = " +
                            std::to_string(scenario.betas[b]));
    report.failed_fits.push_back(failed);
    report.param_mse.push_back(sq / ok);
    for (double& v : char_sq) v /= ok;
    report.characteristic_mse.push_back(char_sq);

    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t m = 0; m < nm; ++m) {
        CoverageCell cell;
        cell.beta = scenario.betas[b];
        cell.characteristic = options.characteristics[c];
        cell.method = options.methods[m];
        int hits = 0;
        double width = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
          const auto& o = outcomes[r][b];
          if (!o.ok || !o.intervals[c][m]) continue;
          ++cell.count;
          hits += o.intervals[c][m]->contains(truth[c]) ? 1 : 0;
          width += o.intervals[c][m]->width();
        }
        if (cell.count == 0) continue;
        cell.coverage = static_cast<double>(hits) / cell.count;
        cell.mean_width = width / cell.count;
        report.coverage.push_back(cell);
      }
    }
  }
  return report;
}

SimulationReport run_mse_study(const SimulationScenario& scenario) {
  StudyOptions options;
  options.characteristics = {CharacteristicSpec::mttf(), CharacteristicSpec::reliability(scenario.t0),
                             CharacteristicSpec::quantile(scenario.alpha0)};
  return run_study(scenario, options);
}

SimulationReport run_coverage_study(const SimulationScenario& scenario,
                                    const CharacteristicSpec& characteristic,
                                    const std::vector<IntervalMethod>& methods) {
  StudyOptions options;
  options.characteristics = {characteristic};
  options.methods = methods;
  return run_study(scenario, options);
}

}  // namespace ssalt
