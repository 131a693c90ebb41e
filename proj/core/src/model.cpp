#include "ssalt/model.hpp"

#include "ssalt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ssalt {

void StepStressDesign::validate() const {
  if (num_risks < 1) throw DesignError("number of risks must be at least 1");
  if (!std::isfinite(x1) || !std::isfinite(x2) || !std::isfinite(x0))
    throw DesignError("stress levels must be finite");
  if (x1 == x2) throw DesignError("the two stress levels must differ");
  if (!(tau1 > 0.0) || !(tau1 < tau2) || !std::isfinite(tau2))
    throw DesignError("stress change and termination times must satisfy 0 < tau1 < tau2");
  if (inspection_times.empty()) throw DesignError("at least one inspection time is required");

  double previous = 0.0;
  bool has_tau1 = false;
  for (double it : inspection_times) {
    if (!std::isfinite(it) || !(it > previous))
      throw DesignError("inspection times must be positive and strictly increasing");
    has_tau1 = has_tau1 || it == tau1;
    previous = it;
  }
  if (inspection_times.back() != tau2)
    throw DesignError("the last inspection time must equal tau2");
  if (!has_tau1)
    throw DesignError("tau1 must be one of the inspection times; an interval would straddle "
                      "the stress change");
}

ModelParams::ModelParams(Eigen::VectorXd a) : a_(std::move(a)) {
  if (a_.size() == 0 || a_.size() % 2 != 0)
    throw DomainError("parameter vector must have even, nonzero length 2R");
  if (!a_.allFinite()) throw DomainError("parameter vector has non-finite entries");
}

ModelParams::ModelParams(std::initializer_list<double> a)
    : ModelParams(Eigen::Map<const Eigen::VectorXd>(a.begin(), static_cast<Eigen::Index>(a.size()))) {}

double ModelParams::scale(int risk, double x) const { return std::exp(log_scale(risk, x)); }

double ModelParams::rate(int risk, double x) const { return std::exp(-log_scale(risk, x)); }

namespace {

void check_risk(const ModelParams& params, const StepStressDesign& design, int risk) {
  if (params.num_risks() != design.num_risks)
    throw DomainError("parameter vector does not match the number of risks in the design");
  if (risk < 0 || risk >= design.num_risks)
    throw DomainError("risk index " + std::to_string(risk) + " out of range");
}

// Per-level quantities shared by the probability and derivative sweeps.
struct LevelTerms {
  double x = 0.0;
  Eigen::VectorXd rate;   // 1 / theta_ik
  Eigen::VectorXd share;  // pi_ik
  Eigen::VectorXd shift;  // h_k^(i)
  Eigen::VectorXd shift_derivative;  // h*_k^(i)
  double total_rate = 0.0;
};

LevelTerms level_terms(const ModelParams& params, const StepStressDesign& design,
                       StressLevel level) {
  const int R = design.num_risks;
  LevelTerms terms;
  terms.x = design.stress(level);
  terms.rate.resize(R);
  terms.share.resize(R);
  terms.shift = Eigen::VectorXd::Zero(R);
  terms.shift_derivative = Eigen::VectorXd::Zero(R);

  // Softmax on log-rates keeps pi finite when individual rates overflow.
  Eigen::VectorXd log_rate(R);
  for (int k = 0; k < R; ++k) log_rate[k] = -params.log_scale(k, terms.x);
  const double max_log_rate = log_rate.maxCoeff();
  double normalizer = 0.0;
  for (int k = 0; k < R; ++k) {
    terms.rate[k] = std::exp(log_rate[k]);
    terms.share[k] = std::exp(log_rate[k] - max_log_rate);
    normalizer += terms.share[k];
  }
  terms.share /= normalizer;
  terms.total_rate = terms.rate.sum();

  if (level == StressLevel::second) {
    const double dx = design.x2 - design.x1;
    for (int k = 0; k < R; ++k) {
      const double log_ratio = params.slope(k) * dx;  // log(theta_2k / theta_1k)
      terms.shift[k] = design.tau1 * std::expm1(log_ratio);
      terms.shift_derivative[k] = design.tau1 * std::exp(log_ratio) * dx;
    }
  }
  return terms;
}

// Lambda(t) = sum_j [min(t, tau1) / theta_1j + max(t - tau1, 0) / theta_2j].
double cumulative_hazard(const StepStressDesign& design, const LevelTerms& first,
                         const LevelTerms& second, double t) {
  double hazard = 0.0;
  if (t > 0.0) hazard += std::min(t, design.tau1) * first.total_rate;
  if (t > design.tau1) hazard += (t - design.tau1) * second.total_rate;
  return hazard;
}

}  // namespace

double shifting_time(const ModelParams& params, const StepStressDesign& design, int risk,
                     StressLevel level) {
  check_risk(params, design, risk);
  if (level == StressLevel::first) return 0.0;
  return design.tau1 * std::expm1(params.slope(risk) * (design.x2 - design.x1));
}

double relative_risk(const ModelParams& params, const StepStressDesign& design,
                     StressLevel level, int risk) {
  check_risk(params, design, risk);
  return level_terms(params, design, level).share[risk];
}

double cumulative_hazard(const ModelParams& params, const StepStressDesign& design, double t) {
  check_risk(params, design, 0);
  const auto first = level_terms(params, design, StressLevel::first);
  const auto second = level_terms(params, design, StressLevel::second);
  return cumulative_hazard(design, first, second, t);
}

CellModel evaluate_cells(const ModelParams& params, const StepStressDesign& design) {
  design.validate();
  check_risk(params, design, 0);

  const int R = design.num_risks;
  const int L = design.num_intervals();
  const LevelTerms levels[2] = {level_terms(params, design, StressLevel::first),
                                level_terms(params, design, StressLevel::second)};

  CellModel out;
  out.probabilities.resize(design.num_cells());
  out.jacobian.resize(design.num_cells(), design.num_params());

  for (int l = 0; l < L; ++l) {
    const LevelTerms& lv = levels[design.interval_level(l) == StressLevel::first ? 0 : 1];
    const double t_start = design.interval_start(l);
    const double t_end = design.interval_end(l);
    const double hazard_start = cumulative_hazard(design, levels[0], levels[1], t_start);
    const double hazard_step = (t_end - t_start) * lv.total_rate;
    const double s_start = std::exp(-hazard_start);
    const double s_end = std::exp(-(hazard_start + hazard_step));
    // S(IT_{l-1}) - S(IT_l) without cancellation.
    const double interval_mass = s_start * -std::expm1(-hazard_step);

    for (int j = 0; j < R; ++j) {
      const int row = design.cell_index(l, j);
      out.probabilities[row] = lv.share[j] * interval_mass;

      // d p_lj = d R_{l-1,j} - d R_lj with R_lj = pi_ij S(IT_l).
      for (int k = 0; k < R; ++k) {
        const double kronecker = j == k ? 1.0 : 0.0;
        const double share_term = lv.share[k] - kronecker;
        const auto exposure = [&](double t) { return (t + lv.shift[k]) * lv.rate[k]; };
        const auto slope_exposure = [&](double t) {
          return (-lv.shift_derivative[k] + (t + lv.shift[k]) * lv.x) * lv.rate[k];
        };
        const double d_a0 = lv.share[j] * (s_start * (share_term + exposure(t_start)) -
                                           s_end * (share_term + exposure(t_end)));
        const double d_a1 =
            lv.share[j] * (s_start * (lv.x * share_term + slope_exposure(t_start)) -
                           s_end * (lv.x * share_term + slope_exposure(t_end)));
        out.jacobian(row, 2 * k) = d_a0;
        out.jacobian(row, 2 * k + 1) = d_a1;
      }
    }
  }

  const LevelTerms& last = levels[1];
  const double survival = std::exp(-cumulative_hazard(design, levels[0], levels[1], design.tau2));
  const int row = design.survival_cell();
  out.probabilities[row] = survival;
  for (int k = 0; k < R; ++k) {
    const double drift = design.tau2 + last.shift[k];
    out.jacobian(row, 2 * k) = survival * drift * last.rate[k];
    out.jacobian(row, 2 * k + 1) =
        survival * (-last.shift_derivative[k] + drift * last.x) * last.rate[k];
  }
  return out;
}

CellProbabilities cell_probabilities(const ModelParams& params, const StepStressDesign& design) {
  return evaluate_cells(params, design).probabilities;
}

DerivativeMatrix derivative_matrix(const ModelParams& params, const StepStressDesign& design) {
  return evaluate_cells(params, design).jacobian;
}

double lifetime_cdf(const ModelParams& params, const StepStressDesign& design, double t,
                    std::optional<int> risk) {
  if (!(t >= 0.0)) throw DomainError("lifetime CDF requires t >= 0");
  check_risk(params, design, risk.value_or(0));

  const StressLevel level = t < design.tau1 ? StressLevel::first : StressLevel::second;
  const double x = design.stress(level);

  // Piecewise form (t + h_j^(i)) / theta_ij on each side of tau1.
  const auto exposure = [&](int j) {
    return (t + shifting_time(params, design, j, level)) * params.rate(j, x);
  };
  double hazard = 0.0;
  if (risk) {
    hazard = exposure(*risk);
  } else {
    for (int j = 0; j < design.num_risks; ++j) hazard += exposure(j);
  }
  return -std::expm1(-hazard);
}

}  // namespace ssalt
