#pragma once

#include "ssalt/characteristics.hpp"
#include "ssalt/estimation.hpp"
#include "ssalt/model.hpp"
#include "ssalt/random.hpp"
#include "ssalt/stats.hpp"

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

namespace ssalt {

/// Index into the coefficient vector a.
struct ParamIndex {
  int index = 0;
};

/// Quantity whose sampling distribution is bootstrapped.
using Statistic = std::variant<CharacteristicSpec, ParamIndex>;

double evaluate_statistic(const Statistic& statistic, const ModelParams& params,
                          const StepStressDesign& design);

struct BootstrapConfig {
  int B = 1000;
  std::uint64_t seed = 1;
  /// Cap on consecutive discarded data sets within one replicate.
  int max_regenerations = 1000;
  double level = 0.95;
  Statistic target = CharacteristicSpec::mttf();
  /// 0 means one worker per hardware thread.
  int threads = 0;
};

struct BcaResult {
  Interval interval;
  double estimate = 0.0;
  double z0 = 0.0;
  double acceleration = 0.0;
  double gamma_lower = 0.0;
  double gamma_upper = 1.0;
  /// All replicates fell on one side of the estimate; interval is the plain percentile one.
  bool bias_correction_degenerate = false;
  int regenerations = 0;
  /// Sorted replicate statistics.
  std::vector<double> replicates;
};

/// Inverse of the marginal CEM CDF of risk j's latent lifetime.
double inverse_marginal_cdf(const ModelParams& params, const StepStressDesign& design, int risk,
                            double u);

/// N units through the inverse-CDF generator, binned by inspection interval.
CountData simulate_counts(const ModelParams& params, const StepStressDesign& design, int N,
                          Rng& rng);

/// As simulate_counts, redrawing until the data are well posed. Throws DegenerateDataError.
/// The number of discarded draws is added to `discarded` when given.
CountData simulate_dataset(const ModelParams& params, const StepStressDesign& design, int N,
                           Rng& rng, int max_regenerations = 1000, int* discarded = nullptr);

/// Adjusted percentile levels (gamma_1, gamma_2).
std::pair<double, double> bca_levels(double z0, double acceleration, double level);

/// 1-based order-statistic index ceil(gamma B) clamped to [1, B].
int percentile_index(double gamma, int B);

/// BCa interval from a replicate sample; z0 is estimated from the sample and the estimate.
BcaResult bca_from_replicates(std::vector<double> replicates, double estimate,
                              double acceleration, double level);

/// Failure-level jackknife acceleration: one deletion per observed failure, weighted by cell.
double jackknife_acceleration(const CountData& data, const StepStressDesign& design, double beta,
                              const Statistic& statistic, const FitResult& original,
                              int threads = 0);

BcaResult bca_interval(const CountData& data, const StepStressDesign& design, double beta,
                       const BootstrapConfig& config);

/// Reuses an existing fit of the original data.
BcaResult bca_interval(const CountData& data, const StepStressDesign& design, double beta,
                       const BootstrapConfig& config, const FitResult& original);

}  // namespace ssalt
