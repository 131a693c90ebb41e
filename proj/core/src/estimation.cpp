#include "ssalt/estimation.hpp"

#include "ssalt/errors.hpp"
#include "ssalt/optimize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ssalt {

CountData CountData::from_cells(const Eigen::VectorXi& cells, int num_risks) {
  if (num_risks < 1 || cells.size() < 1 || (cells.size() - 1) % num_risks != 0)
    throw DomainError("cell vector length must be L * R + 1");
  const int L = static_cast<int>((cells.size() - 1) / num_risks);
  CountData out;
  out.n.resize(L, num_risks);
  for (int l = 0; l < L; ++l)
    for (int j = 0; j < num_risks; ++j) out.n(l, j) = cells[l * num_risks + j];
  out.n0 = cells[cells.size() - 1];
  out.N = cells.sum();
  return out;
}

Eigen::VectorXi CountData::cells() const {
  const int L = static_cast<int>(n.rows());
  const int R = static_cast<int>(n.cols());
  Eigen::VectorXi out(L * R + 1);
  for (int l = 0; l < L; ++l)
    for (int j = 0; j < R; ++j) out[l * R + j] = n(l, j);
  out[L * R] = n0;
  return out;
}

Eigen::VectorXd CountData::empirical() const {
  if (N <= 0) throw DomainError("count data has no units");
  return cells().cast<double>() / static_cast<double>(N);
}

void CountData::validate(const StepStressDesign& design) const {
  if (n.rows() != design.num_intervals() || n.cols() != design.num_risks)
    throw DomainError("count matrix must be " + std::to_string(design.num_intervals()) + " x " +
                      std::to_string(design.num_risks));
  if (n0 < 0 || (n.size() > 0 && n.minCoeff() < 0)) throw DomainError("counts must be nonnegative");
  if (n.sum() + n0 != N) throw DomainError("failures plus survivors must equal N");
  if (N <= 0) throw DomainError("N must be positive");
}

bool CountData::well_posed(const StepStressDesign& design) const {
  const int R = design.num_risks;
  Eigen::VectorXi first = Eigen::VectorXi::Zero(R);
  Eigen::VectorXi second = Eigen::VectorXi::Zero(R);
  for (int l = 0; l < design.num_intervals(); ++l) {
    auto& target = design.interval_level(l) == StressLevel::first ? first : second;
    target += n.row(l).transpose();
  }
  return first.minCoeff() > 0 && second.minCoeff() > 0;
}

Eigen::VectorXd FitResult::standard_errors() const {
  if (covariance.size() == 0) throw DomainError("fit has no covariance");
  return (covariance.diagonal() / static_cast<double>(N)).cwiseMax(0.0).cwiseSqrt();
}

double dpd_divergence(const Eigen::VectorXd& p_hat, const Eigen::VectorXd& p, double beta) {
  if (!(beta >= 0.0)) throw DomainError("beta must be nonnegative");
  if (p_hat.size() != p.size()) throw DomainError("probability vectors differ in length");

  double total = 0.0;
  if (beta == 0.0) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (p_hat[i] <= 0.0) continue;
      if (p[i] <= 0.0) throw DomainError("KL divergence is infinite: model assigns zero mass to an observed cell");
      total += p_hat[i] * std::log(p_hat[i] / p[i]);
    }
    return total;
  }
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double p_beta = std::pow(p[i], beta);
    total += p_beta * p[i] - (1.0 + 1.0 / beta) * p_hat[i] * p_beta +
             std::pow(p_hat[i], 1.0 + beta) / beta;
  }
  return total;
}

double dpd_loss(const ModelParams& params, const CountData& data, const StepStressDesign& design,
                double beta) {
  data.validate(design);
  return dpd_divergence(data.empirical(), cell_probabilities(params, design), beta);
}

namespace {

// D^{beta-1} (p_hat - p), with 0 for cells where both vanish.
Eigen::VectorXd weighted_residual(const Eigen::VectorXd& p_hat, const Eigen::VectorXd& p,
                                  double beta) {
  Eigen::VectorXd out(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double diff = p_hat[i] - p[i];
    if (p[i] > 0.0) {
      out[i] = std::pow(p[i], beta - 1.0) * diff;
    } else {
      out[i] = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

void check_empirical(const Eigen::VectorXd& p_hat, const StepStressDesign& design) {
  if (p_hat.size() != design.num_cells())
    throw DomainError("empirical vector length does not match the design");
  if (!p_hat.allFinite() || p_hat.minCoeff() < 0.0 || std::abs(p_hat.sum() - 1.0) > 1e-9)
    throw DomainError("empirical vector must be a probability vector");
}

double condition_number(const Eigen::MatrixXd& J) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || !std::isfinite(hi)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

// Coordinates (log theta_1j, log theta_2j) per risk, used by the simplex fallback.
Eigen::VectorXd to_level_coordinates(const Eigen::VectorXd& a, const StepStressDesign& design) {
  Eigen::VectorXd u(a.size());
  for (Eigen::Index k = 0; k < a.size() / 2; ++k) {
    u[2 * k] = a[2 * k] + a[2 * k + 1] * design.x1;
    u[2 * k + 1] = a[2 * k] + a[2 * k + 1] * design.x2;
  }
  return u;
}

Eigen::VectorXd from_level_coordinates(const Eigen::VectorXd& u, const StepStressDesign& design) {
  Eigen::VectorXd a(u.size());
  for (Eigen::Index k = 0; k < u.size() / 2; ++k) {
    const double slope = (u[2 * k + 1] - u[2 * k]) / (design.x2 - design.x1);
    a[2 * k + 1] = slope;
    a[2 * k] = u[2 * k] - slope * design.x1;
  }
  return a;
}

struct LossEvaluator {
  const Eigen::VectorXd& p_hat;
  const StepStressDesign& design;
  double beta;

  double operator()(const Eigen::VectorXd& a, Eigen::VectorXd& grad) const {
    if (!a.allFinite()) return std::numeric_limits<double>::infinity();
    const CellModel cells = evaluate_cells(ModelParams(a), design);
    if (!cells.probabilities.allFinite()) return std::numeric_limits<double>::infinity();
    double value = 0.0;
    try {
      value = dpd_divergence(p_hat, cells.probabilities, beta);
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
    grad = -(1.0 + beta) * cells.jacobian.transpose() *
           weighted_residual(p_hat, cells.probabilities, beta);
    return value;
  }

  double value(const Eigen::VectorXd& a) const {
    Eigen::VectorXd g(a.size());
    return (*this)(a, g);
  }
};

std::optional<Eigen::MatrixXd> scoring_inverse(const Eigen::VectorXd& a,
                                               const StepStressDesign& design, double beta) {
  const CellModel cells = evaluate_cells(ModelParams(a), design);
  if (!cells.probabilities.allFinite() || !cells.jacobian.allFinite()) return std::nullopt;
  const Eigen::MatrixXd J = information_matrices(cells, beta).J * (1.0 + beta);
  if (!J.allFinite() || condition_number(J) > 1e15) return std::nullopt;
  return Eigen::MatrixXd(J.ldlt().solve(Eigen::MatrixXd::Identity(J.rows(), J.cols())));
}

optim::MinimizeResult minimize_from(const Eigen::VectorXd& start, const LossEvaluator& loss,
                                    const FitOptions& options) {
  optim::MinimizeOptions opt;
  opt.max_iterations = options.max_iterations;
  opt.gradient_tolerance = options.gradient_tolerance;

  auto result = optim::minimize_bfgs(loss, start, scoring_inverse(start, loss.design, loss.beta), opt);
  if (result.converged || !std::isfinite(result.value)) {
    if (!std::isfinite(result.value)) result.x = start;
    if (result.converged) return result;
  }

  // Simplex search in per-level log-scale coordinates, then a quasi-Newton polish.
  const Eigen::VectorXd u0 = to_level_coordinates(result.x, loss.design);
  const auto simplex_objective = [&](const Eigen::VectorXd& u) {
    return loss.value(from_level_coordinates(u, loss.design));
  };
  optim::MinimizeOptions nm_opt = opt;
  nm_opt.max_evaluations = 4000;
  const auto simplex = optim::minimize_nelder_mead(
      simplex_objective, u0, Eigen::VectorXd::Constant(u0.size(), 0.1), nm_opt);
  const Eigen::VectorXd polished_start = from_level_coordinates(simplex.x, loss.design);
  auto polished = optim::minimize_bfgs(loss, polished_start,
                                       scoring_inverse(polished_start, loss.design, loss.beta), opt);
  polished.iterations += result.iterations + simplex.iterations;
  if (!std::isfinite(polished.value) && std::isfinite(result.value)) return result;
  return polished;
}

}  // namespace

Eigen::VectorXd estimating_equation_residual(const ModelParams& params,
                                             const Eigen::VectorXd& p_hat,
                                             const StepStressDesign& design, double beta) {
  check_empirical(p_hat, design);
  const CellModel cells = evaluate_cells(params, design);
  return cells.jacobian.transpose() * weighted_residual(p_hat, cells.probabilities, beta);
}

Eigen::VectorXd estimating_equation_residual(const ModelParams& params, const CountData& data,
                                             const StepStressDesign& design, double beta) {
  data.validate(design);
  return estimating_equation_residual(params, data.empirical(), design, beta);
}

InformationMatrices information_matrices(const CellModel& cells, double beta) {
  const Eigen::VectorXd& p = cells.probabilities;
  const Eigen::MatrixXd& W = cells.jacobian;
  Eigen::VectorXd w1(p.size()), w2(p.size()), pb(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const bool positive = p[i] > 0.0;
    w1[i] = positive ? std::pow(p[i], beta - 1.0) : 0.0;
    w2[i] = positive ? std::pow(p[i], 2.0 * beta - 1.0) : 0.0;
    pb[i] = std::pow(p[i], beta);
  }
  InformationMatrices out;
  out.J = W.transpose() * w1.asDiagonal() * W;
  const Eigen::VectorXd u = W.transpose() * pb;
  out.K = W.transpose() * w2.asDiagonal() * W - u * u.transpose();
  out.J = 0.5 * (out.J + out.J.transpose());
  out.K = 0.5 * (out.K + out.K.transpose());
  return out;
}

Eigen::MatrixXd sandwich_covariance(const InformationMatrices& info, double max_condition) {
  const double cond = condition_number(info.J);
  if (!(cond <= max_condition))
    throw SingularInformationError("J_beta is numerically singular", cond);
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(info.J);
  const Eigen::MatrixXd j_inv = ldlt.solve(Eigen::MatrixXd::Identity(info.J.rows(), info.J.cols()));
  const Eigen::MatrixXd sigma = j_inv * info.K * j_inv;
  return 0.5 * (sigma + sigma.transpose());
}

Eigen::MatrixXd asymptotic_covariance(const ModelParams& params, const StepStressDesign& design,
                                      double beta, double max_condition) {
  if (!(beta >= 0.0)) throw DomainError("beta must be nonnegative");
  return sandwich_covariance(information_matrices(evaluate_cells(params, design), beta),
                             max_condition);
}

ModelParams moment_initializer(const Eigen::VectorXd& p_hat, int N,
                               const StepStressDesign& design) {
  design.validate();
  check_empirical(p_hat, design);
  const int R = design.num_risks;
  const double pseudo = 0.5 / std::max(N, 1);

  Eigen::MatrixXd by_level = Eigen::MatrixXd::Zero(2, R);
  for (int l = 0; l < design.num_intervals(); ++l) {
    const int i = design.interval_level(l) == StressLevel::first ? 0 : 1;
    for (int j = 0; j < R; ++j) by_level(i, j) += p_hat[design.cell_index(l, j)];
  }

  const double durations[2] = {design.tau1, design.tau2 - design.tau1};
  double at_risk = 1.0;
  Eigen::MatrixXd log_scale(2, R);
  for (int i = 0; i < 2; ++i) {
    const double failed = by_level.row(i).sum();
    const double fraction = std::clamp((failed + pseudo) / (at_risk + 2.0 * pseudo), 1e-6, 1.0 - 1e-6);
    const double hazard = -std::log1p(-fraction) / durations[i];
    for (int j = 0; j < R; ++j) {
      const double share = (by_level(i, j) + pseudo) / (failed + R * pseudo);
      log_scale(i, j) = -std::log(hazard * share);
    }
    at_risk = std::max(at_risk - failed, pseudo);
  }

  Eigen::VectorXd a(2 * R);
  for (int j = 0; j < R; ++j) {
    const double slope = (log_scale(1, j) - log_scale(0, j)) / (design.x2 - design.x1);
    a[2 * j + 1] = slope;
    a[2 * j] = log_scale(0, j) - slope * design.x1;
  }
  return ModelParams(a);
}

FitResult fit_empirical(const Eigen::VectorXd& p_hat, int N, const StepStressDesign& design,
                        double beta, const FitOptions& options) {
  if (!(beta >= 0.0)) throw DomainError("beta must be nonnegative");
  if (N <= 0) throw DomainError("N must be positive");
  design.validate();
  check_empirical(p_hat, design);

  const LossEvaluator loss{p_hat, design, beta};
  std::vector<Eigen::VectorXd> starts;
  if (options.initial) {
    if (options.initial->num_risks() != design.num_risks)
      throw DomainError("initial parameters do not match the number of risks");
    starts.push_back(options.initial->vector());
  } else {
    starts.push_back(moment_initializer(p_hat, N, design).vector());
    if (beta > 0.0 && options.multi_start) {
      FitOptions mle_options = options;
      mle_options.compute_covariance = false;
      mle_options.require_convergence = false;
      const FitResult mle = fit_empirical(p_hat, N, design, 0.0, mle_options);
      if (mle.converged) starts.push_back(mle.params_hat.vector());
    }
  }

  std::optional<optim::MinimizeResult> best;
  int iterations = 0;
  for (const auto& start : starts) {
    auto result = minimize_from(start, loss, options);
    iterations += result.iterations;
    const bool better =
        !best || (result.converged && !best->converged) ||
        (result.converged == best->converged && result.value < best->value);
    if (better) best = std::move(result);
  }

  FitResult out;
  out.beta = beta;
  out.N = N;
  out.iterations = iterations;
  out.converged = best->converged;
  out.message = best->message;
  out.loss = best->value;
  if (!std::isfinite(out.loss)) {
    out.converged = false;
    out.message = "objective is not finite at any start";
    if (options.require_convergence)
      throw NonConvergenceError("MDPDE fit failed: " + out.message, iterations,
                                std::numeric_limits<double>::infinity());
    out.params_hat = ModelParams(starts.front());
    out.gradient_norm = std::numeric_limits<double>::infinity();
    return out;
  }
  out.params_hat = ModelParams(best->x);
  out.gradient_norm = best->gradient.size() ? best->gradient.norm() : 0.0;
  if (best->gradient.size() == 0) {
    Eigen::VectorXd g(best->x.size());
    loss(best->x, g);
    out.gradient_norm = g.norm();
  }

  if (!out.converged && options.require_convergence)
    throw NonConvergenceError("MDPDE fit did not converge (" + out.message + ")", iterations,
                              out.gradient_norm);
  if (options.compute_covariance)
    out.covariance = asymptotic_covariance(out.params_hat, design, beta, options.max_condition);
  return out;
}

FitResult fit(const CountData& data, const StepStressDesign& design, double beta,
              const FitOptions& options) {
  design.validate();
  data.validate(design);
  if (!data.well_posed(design))
    throw IllPosedError(
        "the MDPDE needs at least one failure from every risk under each stress level");
  return fit_empirical(data.empirical(), data.N, design, beta, options);
}

std::vector<Interval> param_confidence_interval(const FitResult& fit, double level) {
  const Eigen::VectorXd se = fit.standard_errors();
  const double z = two_sided_z(level);
  std::vector<Interval> out;
  out.reserve(static_cast<std::size_t>(se.size()));
  for (Eigen::Index k = 0; k < se.size(); ++k) {
    const double a = fit.params_hat[static_cast<int>(k)];
    out.push_back({a - z * se[k], a + z * se[k]});
  }
  return out;
}

}  // namespace ssalt
