#include "ssalt/bootstrap.hpp"

#include "ssalt/errors.hpp"
#include "ssalt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <tuple>

namespace ssalt {

double evaluate_statistic(const Statistic& statistic, const ModelParams& params,
                          const StepStressDesign& design) {
  if (const auto* p = std::get_if<ParamIndex>(&statistic)) {
    if (p->index < 0 || p->index >= params.size()) throw DomainError("parameter index out of range");
    return params[p->index];
  }
  return characteristic_value(params, design, std::get<CharacteristicSpec>(statistic));
}

double inverse_marginal_cdf(const ModelParams& params, const StepStressDesign& design, int risk,
                            double u) {
  if (!(u >= 0.0 && u < 1.0)) throw DomainError("uniform draw must lie in [0, 1)");
  const double theta1 = params.scale(risk, design.x1);
  const double at_change = -std::expm1(-design.tau1 / theta1);
  if (u < at_change) return -theta1 * std::log1p(-u);
  const double theta2 = params.scale(risk, design.x2);
  return -theta2 * std::log1p(-u) - shifting_time(params, design, risk, StressLevel::second);
}

CountData simulate_counts(const ModelParams& params, const StepStressDesign& design, int N,
                          Rng& rng) {
  design.validate();
  if (N <= 0) throw DomainError("N must be positive");
  if (params.num_risks() != design.num_risks)
    throw DomainError("parameter vector does not match the number of risks in the design");

  const int R = design.num_risks;
  std::vector<double> theta1(R), theta2(R), shift(R), at_change(R);
  for (int j = 0; j < R; ++j) {
    theta1[j] = params.scale(j, design.x1);
    theta2[j] = params.scale(j, design.x2);
    shift[j] = shifting_time(params, design, j, StressLevel::second);
    at_change[j] = -std::expm1(-design.tau1 / theta1[j]);
  }

  CountData out;
  out.n = Eigen::MatrixXi::Zero(design.num_intervals(), R);
  out.N = N;
  const auto& it = design.inspection_times;
  for (int unit = 0; unit < N; ++unit) {
    double lifetime = std::numeric_limits<double>::infinity();
    int cause = 0;
    for (int j = 0; j < R; ++j) {
      const double u = uniform01(rng);
      const double t = u < at_change[j] ? -theta1[j] * std::log1p(-u)
                                        : -theta2[j] * std::log1p(-u) - shift[j];
      if (t < lifetime) {
        lifetime = t;
        cause = j;
      }
    }
    if (lifetime > design.tau2) {
      ++out.n0;
      continue;
    }
    // Interval l covers (IT_{l-1}, IT_l].
    const auto l = std::lower_bound(it.begin(), it.end(), lifetime) - it.begin();
    ++out.n(static_cast<Eigen::Index>(l), cause);
  }
  return out;
}

CountData simulate_dataset(const ModelParams& params, const StepStressDesign& design, int N,
                           Rng& rng, int max_regenerations, int* discarded) {
  for (int attempt = 0; attempt <= max_regenerations; ++attempt) {
    CountData data = simulate_counts(params, design, N, rng);
    if (data.well_posed(design)) return data;
    if (discarded) ++*discarded;
  }
  throw DegenerateDataError("no well-posed data set after " + std::to_string(max_regenerations) +
                            " regenerations");
}

std::pair<double, double> bca_levels(double z0, double acceleration, double level) {
  const double z = two_sided_z(level);
  const auto adjusted = [&](double zz, double fallback) {
    const double denom = 1.0 - acceleration * zz;
    if (!(denom > 0.0)) return fallback;
    return normal_cdf(z0 + zz / denom);
  };
  return {adjusted(z0 - z, 0.0), adjusted(z0 + z, 1.0)};
}

int percentile_index(double gamma, int B) {
  if (B < 1) throw DomainError("bootstrap sample is empty");
  if (!(gamma > 0.0)) return 1;
  const double raw = std::ceil(gamma * B);
  if (!(raw < B)) return B;
  return std::max(1, static_cast<int>(raw));
}

BcaResult bca_from_replicates(std::vector<double> replicates, double estimate,
                              double acceleration, double level) {
  if (replicates.empty()) throw DomainError("bootstrap sample is empty");
  std::sort(replicates.begin(), replicates.end());
  const int B = static_cast<int>(replicates.size());

  BcaResult out;
  out.estimate = estimate;
  out.acceleration = acceleration;
  const auto below = std::upper_bound(replicates.begin(), replicates.end(), estimate) - replicates.begin();
  out.z0 = normal_quantile(static_cast<double>(below) / B);

  if (std::isfinite(out.z0)) {
    std::tie(out.gamma_lower, out.gamma_upper) = bca_levels(out.z0, acceleration, level);
  } else {
    out.bias_correction_degenerate = true;
    std::tie(out.gamma_lower, out.gamma_upper) = bca_levels(0.0, 0.0, level);
  }
  out.interval = {replicates[percentile_index(out.gamma_lower, B) - 1],
                  replicates[percentile_index(out.gamma_upper, B) - 1]};
  out.replicates = std::move(replicates);
  return out;
}

namespace {

FitOptions replicate_options(const FitResult& original) {
  FitOptions options;
  options.initial = original.params_hat;
  options.compute_covariance = false;
  return options;
}

}  // namespace

double jackknife_acceleration(const CountData& data, const StepStressDesign& design, double beta,
                              const Statistic& statistic, const FitResult& original,
                              int threads) {
  const Eigen::VectorXi cells = data.cells();
  const int failure_cells = design.survival_cell();
  std::vector<int> occupied;
  for (int c = 0; c < failure_cells; ++c)
    if (cells[c] > 0) occupied.push_back(c);

  std::vector<std::optional<double>> values(occupied.size());
  const FitOptions options = replicate_options(original);
  parallel_for(occupied.size(), threads, [&](std::size_t i) {
    Eigen::VectorXi reduced = cells;
    --reduced[occupied[i]];
    const int n = data.N - 1;
    try {
      const FitResult f =
          fit_empirical(reduced.cast<double>() / static_cast<double>(n), n, design, beta, options);
      values[i] = evaluate_statistic(statistic, f.params_hat, design);
    } catch (const Error&) {
    }
  });

  double weight = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < occupied.size(); ++i) {
    if (!values[i]) continue;
    weight += cells[occupied[i]];
    mean += cells[occupied[i]] * *values[i];
  }
  if (weight == 0.0) return 0.0;
  mean /= weight;

  double m2 = 0.0, m3 = 0.0;
  for (std::size_t i = 0; i < occupied.size(); ++i) {
    if (!values[i]) continue;
    const double d = mean - *values[i];
    m2 += cells[occupied[i]] * d * d;
    m3 += cells[occupied[i]] * d * d * d;
  }
  if (!(m2 > 0.0)) return 0.0;
  return m3 / (6.0 * std::pow(m2, 1.5));
}

BcaResult bca_interval(const CountData& data, const StepStressDesign& design, double beta,
                       const BootstrapConfig& config) {
  return bca_interval(data, design, beta, config, fit(data, design, beta));
}

BcaResult bca_interval(const CountData& data, const StepStressDesign& design, double beta,
                       const BootstrapConfig& config, const FitResult& original) {
  if (config.B < 100) throw DomainError("bootstrap needs B >= 100");
  if (config.max_regenerations < 0) throw DomainError("max_regenerations must be nonnegative");
  if (!original.converged) throw DomainError("bootstrap requires a converged fit of the original data");
  data.validate(design);

  const double estimate = evaluate_statistic(config.target, original.params_hat, design);
  const FitOptions options = replicate_options(original);

  std::vector<double> replicates(static_cast<std::size_t>(config.B));
  std::vector<int> discards(static_cast<std::size_t>(config.B), 0);
  parallel_for(replicates.size(), config.threads, [&](std::size_t b) {
    Rng rng = make_stream(config.seed, b);
    for (int attempt = 0;; ++attempt) {
      if (attempt > config.max_regenerations)
        throw DegenerateDataError("bootstrap replicate " + std::to_string(b) +
                                  " exceeded the regeneration cap");
      const CountData sample = simulate_counts(original.params_hat, design, data.N, rng);
      if (!sample.well_posed(design)) {
        ++discards[b];
        continue;
      }
      try {
        const FitResult f = fit(sample, design, beta, options);
        replicates[b] = evaluate_statistic(config.target, f.params_hat, design);
        return;
      } catch (const Error&) {
        ++discards[b];
      }
    }
  });

  const double acceleration =
      jackknife_acceleration(data, design, beta, config.target, original, config.threads);
  BcaResult out = bca_from_replicates(std::move(replicates), estimate, acceleration, config.level);
  for (int d : discards) out.regenerations += d;
  return out;
}

}  // namespace ssalt
