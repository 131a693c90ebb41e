#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace ssalt {

/// Stress level in force during a time interval of a simple step-stress test.
enum class StressLevel { first = 1, second = 2 };

/**
 * Simple step-stress life test with interval monitoring.
 *
 * Units run at stress x1 until tau1, then at x2 until tau2. Failures are only
 * counted at the inspection times IT_1 < ... < IT_L = tau2, and tau1 must be
 * one of them so that every inspection interval sits at a single stress
 * level. x0 is the normal operating stress used for extrapolation.
 *
 * Intervals and risks are 0-based throughout the API: interval l covers
 * (IT_{l-1}, IT_l] with IT_{-1} = 0.
 */
struct StepStressDesign {
  double x1 = 0.0;
  double x2 = 1.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  std::vector<double> inspection_times;
  int num_risks = 1;
  double x0 = 0.0;

  /// Throws DesignError when an invariant does not hold.
  void validate() const;

  int num_intervals() const { return static_cast<int>(inspection_times.size()); }
  /// L * R failure cells plus the survival cell.
  int num_cells() const { return num_intervals() * num_risks + 1; }
  int num_params() const { return 2 * num_risks; }
  int cell_index(int interval, int risk) const { return interval * num_risks + risk; }
  int survival_cell() const { return num_intervals() * num_risks; }

  double interval_start(int interval) const {
    return interval == 0 ? 0.0 : inspection_times[interval - 1];
  }
  double interval_end(int interval) const { return inspection_times[interval]; }

  /// Level 1 iff IT_l <= tau1.
  StressLevel interval_level(int interval) const {
    return inspection_times[interval] <= tau1 ? StressLevel::first : StressLevel::second;
  }
  double stress(StressLevel level) const { return level == StressLevel::first ? x1 : x2; }
};

/**
 * Log-linear coefficients a = (a_01, a_11, ..., a_0R, a_1R).
 *
 * The exponential scale of risk j at stress x is theta_j(x) = exp(a_0j + a_1j x).
 */
class ModelParams {
 public:
  ModelParams() = default;
  explicit ModelParams(Eigen::VectorXd a);
  ModelParams(std::initializer_list<double> a);

  int num_risks() const { return static_cast<int>(a_.size() / 2); }
  int size() const { return static_cast<int>(a_.size()); }

  double intercept(int risk) const { return a_[2 * risk]; }
  double slope(int risk) const { return a_[2 * risk + 1]; }
  double operator[](int i) const { return a_[i]; }

  double log_scale(int risk, double x) const { return intercept(risk) + slope(risk) * x; }
  double scale(int risk, double x) const;
  /// Hazard rate 1 / theta_j(x).
  double rate(int risk, double x) const;

  const Eigen::VectorXd& vector() const { return a_; }

  friend bool operator==(const ModelParams& lhs, const ModelParams& rhs) {
    return lhs.a_.size() == rhs.a_.size() && lhs.a_ == rhs.a_;
  }

 private:
  Eigen::VectorXd a_;
};

/// Multinomial cell probabilities ordered (p_11..p_1R, ..., p_L1..p_LR, p_0).
using CellProbabilities = Eigen::VectorXd;

/// d p / d a, one row per cell and one column per coefficient.
using DerivativeMatrix = Eigen::MatrixXd;

/// Probabilities together with their Jacobian, evaluated in one sweep.
struct CellModel {
  CellProbabilities probabilities;
  DerivativeMatrix jacobian;
};

/// CEM shift h_j^(i) placing risk j's level-i lifetime on the cumulative-exposure clock.
double shifting_time(const ModelParams& params, const StepStressDesign& design, int risk,
                     StressLevel level);

/// pi_ij: share of the level-i hazard carried by risk j.
double relative_risk(const ModelParams& params, const StepStressDesign& design,
                     StressLevel level, int risk);

/// Overall cumulative hazard at time t under the step-stress profile.
double cumulative_hazard(const ModelParams& params, const StepStressDesign& design, double t);

CellProbabilities cell_probabilities(const ModelParams& params, const StepStressDesign& design);

DerivativeMatrix derivative_matrix(const ModelParams& params, const StepStressDesign& design);

CellModel evaluate_cells(const ModelParams& params, const StepStressDesign& design);

/**
 * CDF of the failure time under the step-stress profile.
 *
 * With `risk` set this is the marginal F_j of that risk's latent lifetime,
 * otherwise the CDF of the observed minimum, 1 - prod_j (1 - F_j).
 */
double lifetime_cdf(const ModelParams& params, const StepStressDesign& design, double t,
                    std::optional<int> risk = std::nullopt);

}  // namespace ssalt
