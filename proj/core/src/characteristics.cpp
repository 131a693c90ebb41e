#include "ssalt/characteristics.hpp"

#include "ssalt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssalt {

namespace {

void check_spec(const ModelParams& params, const StepStressDesign& design,
                const CharacteristicSpec& spec) {
  if (params.num_risks() != design.num_risks)
    throw DomainError("parameter vector does not match the number of risks in the design");
  if (spec.risk && (*spec.risk < 0 || *spec.risk >= design.num_risks))
    throw DomainError("risk index out of range");
  if (spec.kind == CharacteristicKind::reliability && !(spec.t0 >= 0.0))
    throw DomainError("mission time must be nonnegative");
  if (spec.kind == CharacteristicKind::quantile && !(spec.alpha0 > 0.0 && spec.alpha0 < 1.0))
    throw DomainError("quantile level must lie in (0, 1)");
}

// Hazard rate at x0 of the selected risk, or of the overall lifetime.
double rate_at_x0(const ModelParams& params, const StepStressDesign& design,
                  const CharacteristicSpec& spec) {
  if (spec.risk) return params.rate(*spec.risk, design.x0);
  double total = 0.0;
  for (int k = 0; k < params.num_risks(); ++k) total += params.rate(k, design.x0);
  return total;
}

double quantile_factor(double alpha0) { return -std::log1p(-alpha0); }

}  // namespace

std::string CharacteristicSpec::name() const {
  std::string base;
  switch (kind) {
    case CharacteristicKind::mttf: base = "mttf"; break;
    case CharacteristicKind::reliability: base = "reliability"; break;
    case CharacteristicKind::quantile: base = "quantile"; break;
  }
  if (risk) base += "_risk" + std::to_string(*risk + 1);
  return base;
}

double characteristic_value(const ModelParams& params, const StepStressDesign& design,
                            const CharacteristicSpec& spec) {
  check_spec(params, design, spec);
  const double rate = rate_at_x0(params, design, spec);
  switch (spec.kind) {
    case CharacteristicKind::mttf: return 1.0 / rate;
    case CharacteristicKind::reliability: return std::exp(-spec.t0 * rate);
    case CharacteristicKind::quantile: return quantile_factor(spec.alpha0) / rate;
  }
  return 0.0;
}

Eigen::VectorXd characteristic_gradient(const ModelParams& params, const StepStressDesign& design,
                                        const CharacteristicSpec& spec) {
  check_spec(params, design, spec);
  const int R = params.num_risks();
  const double x0 = design.x0;
  const double total = rate_at_x0(params, design, spec);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(2 * R);

  // d(total rate)/d a_0k = -rate_k, d/d a_1k = -x0 rate_k.
  for (int k = 0; k < R; ++k) {
    if (spec.risk && *spec.risk != k) continue;
    const double rate_k = params.rate(k, x0);
    double scale = 0.0;
    switch (spec.kind) {
      case CharacteristicKind::mttf: scale = rate_k / (total * total); break;
      case CharacteristicKind::reliability:
        scale = std::exp(-spec.t0 * total) * spec.t0 * rate_k;
        break;
      case CharacteristicKind::quantile:
        scale = quantile_factor(spec.alpha0) * rate_k / (total * total);
        break;
    }
    grad[2 * k] = scale;
    grad[2 * k + 1] = scale * x0;
  }
  return grad;
}

double characteristic_sigma(const ModelParams& params, const StepStressDesign& design,
                            const CharacteristicSpec& spec, const Eigen::MatrixXd& covariance) {
  check_spec(params, design, spec);
  const int R = params.num_risks();
  if (covariance.rows() != 2 * R || covariance.cols() != 2 * R)
    throw DomainError("covariance must be 2R x 2R");

  if (!spec.risk) {
    const Eigen::VectorXd g = characteristic_gradient(params, design, spec);
    return std::sqrt(std::max(0.0, g.dot(covariance * g)));
  }

  const int j = *spec.risk;
  const Eigen::Vector2d v(1.0, design.x0);
  const double form = std::max(0.0, v.dot(covariance.block<2, 2>(2 * j, 2 * j) * v));
  const double scale_j = params.scale(j, design.x0);
  switch (spec.kind) {
    case CharacteristicKind::mttf: return scale_j * std::sqrt(form);
    case CharacteristicKind::reliability: {
      const double rate_j = 1.0 / scale_j;
      return std::exp(-spec.t0 * rate_j) * spec.t0 * rate_j * std::sqrt(form);
    }
    case CharacteristicKind::quantile:
      return quantile_factor(spec.alpha0) * scale_j * std::sqrt(form);
  }
  return 0.0;
}

Interval direct_ci(const CharacteristicSpec& spec, double value, double sigma, int N,
                   double level) {
  if (N <= 0) throw DomainError("N must be positive");
  const double half = two_sided_z(level) * sigma / std::sqrt(static_cast<double>(N));
  Interval out{value - half, value + half};
  out.lower = std::max(out.lower, 0.0);
  if (spec.kind == CharacteristicKind::reliability) out.upper = std::min(out.upper, 1.0);
  return out;
}

Interval transformed_ci(const CharacteristicSpec& spec, double value, double sigma, int N,
                        double level) {
  if (N <= 0) throw DomainError("N must be positive");
  const double zs = two_sided_z(level) * sigma / std::sqrt(static_cast<double>(N));
  if (spec.kind == CharacteristicKind::reliability) {
    if (!(value > 0.0 && value < 1.0))
      throw DegenerateError("logit transform undefined at reliability " + std::to_string(value));
    const double s = std::exp(zs / (value * (1.0 - value)));
    return {value / (value + (1.0 - value) * s), value / (value + (1.0 - value) / s)};
  }
  if (!(value > 0.0)) throw DegenerateError("log transform undefined at a nonpositive value");
  const double factor = std::exp(zs / value);
  return {value / factor, value * factor};
}

Interval transformed_ci(const CharacteristicEstimate& est, double level) {
  return transformed_ci(est.spec, est.value, est.sigma, est.N, level);
}

CharacteristicEstimate estimate_characteristic(const FitResult& fit, const StepStressDesign& design,
                                               const CharacteristicSpec& spec, double level) {
  if (fit.covariance.size() == 0) throw DomainError("fit has no covariance");
  CharacteristicEstimate out;
  out.spec = spec;
  out.level = level;
  out.N = fit.N;
  out.value = characteristic_value(fit.params_hat, design, spec);
  out.sigma = characteristic_sigma(fit.params_hat, design, spec, fit.covariance);
  out.std_error = out.sigma / std::sqrt(static_cast<double>(fit.N));
  out.ci_direct = direct_ci(spec, out.value, out.sigma, fit.N, level);
  try {
    out.ci_transformed = transformed_ci(spec, out.value, out.sigma, fit.N, level);
  } catch (const DegenerateError&) {
    out.ci_transformed = out.ci_direct;
    out.transformed_degenerate = true;
  }
  return out;
}

CharacteristicEstimate mttf(const FitResult& fit, const StepStressDesign& design, double level) {
  return estimate_characteristic(fit, design, CharacteristicSpec::mttf(), level);
}

CharacteristicEstimate reliability(const FitResult& fit, const StepStressDesign& design, double t0,
                                   double level) {
  return estimate_characteristic(fit, design, CharacteristicSpec::reliability(t0), level);
}

CharacteristicEstimate quantile(const FitResult& fit, const StepStressDesign& design,
                                double alpha0, double level) {
  return estimate_characteristic(fit, design, CharacteristicSpec::quantile(alpha0), level);
}

CharacteristicEstimate cause_specific_mttf(const FitResult& fit, const StepStressDesign& design,
                                           int risk, double level) {
  return estimate_characteristic(fit, design, CharacteristicSpec::mttf(risk), level);
}

CharacteristicEstimate cause_specific_reliability(const FitResult& fit,
                                                  const StepStressDesign& design, int risk,
                                                  double t0, double level) {
  return estimate_characteristic(fit, design, CharacteristicSpec::reliability(t0, risk), level);
}

CharacteristicEstimate cause_specific_quantile(const FitResult& fit,
                                               const StepStressDesign& design, int risk,
                                               double alpha0, double level) {
  return estimate_characteristic(fit, design, CharacteristicSpec::quantile(alpha0, risk), level);
}

}  // namespace ssalt
