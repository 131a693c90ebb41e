#pragma once

#include "ssalt/estimation.hpp"
#include "ssalt/model.hpp"
#include "ssalt/stats.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>

namespace ssalt {

enum class CharacteristicKind { mttf, reliability, quantile };

/// Lifetime characteristic at the design's normal-operating stress x0.
struct CharacteristicSpec {
  CharacteristicKind kind = CharacteristicKind::mttf;
  /// Cause-specific when set, otherwise the overall lifetime.
  std::optional<int> risk;
  /// Mission time for reliability.
  double t0 = 0.0;
  /// Lower quantile level for quantiles.
  double alpha0 = 0.5;

  static CharacteristicSpec mttf(std::optional<int> risk = std::nullopt) {
    return {CharacteristicKind::mttf, risk, 0.0, 0.5};
  }
  static CharacteristicSpec reliability(double t0, std::optional<int> risk = std::nullopt) {
    return {CharacteristicKind::reliability, risk, t0, 0.5};
  }
  static CharacteristicSpec quantile(double alpha0, std::optional<int> risk = std::nullopt) {
    return {CharacteristicKind::quantile, risk, 0.0, alpha0};
  }

  std::string name() const;
};

struct CharacteristicEstimate {
  CharacteristicSpec spec;
  double value = 0.0;
  /// sigma: sqrt(grad^T Sigma grad), the asymptotic sd of sqrt(N)(S_hat - S).
  double sigma = 0.0;
  /// sigma / sqrt(N).
  double std_error = 0.0;
  double level = 0.95;
  int N = 0;
  Interval ci_direct;
  Interval ci_transformed;
  /// Set when the transform was undefined and ci_transformed holds the direct interval.
  bool transformed_degenerate = false;
  std::optional<Interval> ci_bootstrap;
};

/// Value of the characteristic at parameters a.
double characteristic_value(const ModelParams& params, const StepStressDesign& design,
                            const CharacteristicSpec& spec);

/// Full 2R gradient of the characteristic with respect to a.
Eigen::VectorXd characteristic_gradient(const ModelParams& params, const StepStressDesign& design,
                                        const CharacteristicSpec& spec);

/// Delta-method sigma; cause-specific characteristics use only the 2x2 block of Sigma.
double characteristic_sigma(const ModelParams& params, const StepStressDesign& design,
                            const CharacteristicSpec& spec, const Eigen::MatrixXd& covariance);

/// Value +- z sigma / sqrt(N), truncated to the natural domain.
Interval direct_ci(const CharacteristicSpec& spec, double value, double sigma, int N, double level);

/// Log transform for MTTF and quantiles, logit for reliability. Throws DegenerateError.
Interval transformed_ci(const CharacteristicSpec& spec, double value, double sigma, int N,
                        double level);
Interval transformed_ci(const CharacteristicEstimate& est, double level);

/// Point estimate with direct and transformed intervals from a fit with covariance.
CharacteristicEstimate estimate_characteristic(const FitResult& fit, const StepStressDesign& design,
                                               const CharacteristicSpec& spec, double level = 0.95);

CharacteristicEstimate mttf(const FitResult& fit, const StepStressDesign& design,
                            double level = 0.95);
CharacteristicEstimate reliability(const FitResult& fit, const StepStressDesign& design, double t0,
                                   double level = 0.95);
CharacteristicEstimate quantile(const FitResult& fit, const StepStressDesign& design,
                                double alpha0, double level = 0.95);
CharacteristicEstimate cause_specific_mttf(const FitResult& fit, const StepStressDesign& design,
                                           int risk, double level = 0.95);
CharacteristicEstimate cause_specific_reliability(const FitResult& fit,
                                                  const StepStressDesign& design, int risk,
                                                  double t0, double level = 0.95);
CharacteristicEstimate cause_specific_quantile(const FitResult& fit,
                                               const StepStressDesign& design, int risk,
                                               double alpha0, double level = 0.95);

}  // namespace ssalt
