#pragma once

#include "ssalt/model.hpp"
#include "ssalt/stats.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace ssalt {

/// Failure counts per (interval, risk) plus survivors past tau2.
struct CountData {
  Eigen::MatrixXi n;  // L x R
  int n0 = 0;
  int N = 0;

  /// Builds counts from a cell vector ordered like CellProbabilities.
  static CountData from_cells(const Eigen::VectorXi& cells, int num_risks);

  Eigen::VectorXi cells() const;
  /// p-hat = counts / N in cell order.
  Eigen::VectorXd empirical() const;
  int failures() const { return N - n0; }

  /// Throws DomainError on a shape mismatch with the design or inconsistent totals.
  void validate(const StepStressDesign& design) const;

  /// At least one failure from every risk under each stress level.
  bool well_posed(const StepStressDesign& design) const;

  friend bool operator==(const CountData& a, const CountData& b) {
    return a.n0 == b.n0 && a.N == b.N && a.n.rows() == b.n.rows() && a.n.cols() == b.n.cols() &&
           a.n == b.n;
  }
};

struct FitOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-8;
  /// Warm start; skips the default multi-start when set.
  std::optional<ModelParams> initial;
  /// For beta > 0 also start from the beta = 0 solution.
  bool multi_start = true;
  bool compute_covariance = true;
  /// Throw NonConvergenceError instead of returning an unconverged result.
  bool require_convergence = true;
  /// J_beta with a larger 2-norm condition number is treated as singular.
  double max_condition = 1e13;
};

struct FitResult {
  ModelParams params_hat;
  double beta = 0.0;
  double loss = 0.0;
  /// Asymptotic covariance Sigma of sqrt(N)(a_hat - a); empty when not computed.
  Eigen::MatrixXd covariance;
  bool converged = false;
  /// Norm of the DPD loss gradient at params_hat.
  double gradient_norm = 0.0;
  int iterations = 0;
  int N = 0;
  std::string message;

  /// sqrt(diag(Sigma) / N).
  Eigen::VectorXd standard_errors() const;
};

struct InformationMatrices {
  Eigen::MatrixXd J;
  Eigen::MatrixXd K;
};

/// DPD between two probability vectors; beta = 0 gives the KL divergence sum p_hat log(p_hat / p).
double dpd_divergence(const Eigen::VectorXd& p_hat, const Eigen::VectorXd& p, double beta);

double dpd_loss(const ModelParams& params, const CountData& data, const StepStressDesign& design,
                double beta);

/// W^T D^{beta-1} (p_hat - p(a)); the loss gradient is -(1 + beta) times this.
Eigen::VectorXd estimating_equation_residual(const ModelParams& params, const CountData& data,
                                             const StepStressDesign& design, double beta);

/// Same, for an arbitrary empirical probability vector.
Eigen::VectorXd estimating_equation_residual(const ModelParams& params,
                                             const Eigen::VectorXd& p_hat,
                                             const StepStressDesign& design, double beta);

/// J = W^T D^{beta-1} W and K = W^T (D^{2 beta - 1} - p^beta p^beta^T) W.
InformationMatrices information_matrices(const CellModel& cells, double beta);

/// Sigma = J^-1 K J^-1; throws SingularInformationError.
Eigen::MatrixXd asymptotic_covariance(const ModelParams& params, const StepStressDesign& design,
                                      double beta, double max_condition = 1e13);

Eigen::MatrixXd sandwich_covariance(const InformationMatrices& info, double max_condition = 1e13);

/// Per-level hazard split by cause shares, with half a unit added to empty cells.
ModelParams moment_initializer(const Eigen::VectorXd& p_hat, int N, const StepStressDesign& design);

FitResult fit(const CountData& data, const StepStressDesign& design, double beta,
              const FitOptions& options = {});

/// Fit against an arbitrary probability vector (e.g. a contaminated model distribution).
FitResult fit_empirical(const Eigen::VectorXd& p_hat, int N, const StepStressDesign& design,
                        double beta, const FitOptions& options = {});

/// a_hat +- z * sqrt(Sigma_kk / N) per coefficient.
std::vector<Interval> param_confidence_interval(const FitResult& fit, double level);

}  // namespace ssalt
