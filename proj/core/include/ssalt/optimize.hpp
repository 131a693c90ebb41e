#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>

namespace ssalt::optim {

/// Returns f(x) and writes the gradient into the second argument.
using GradientObjective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;
using Objective = std::function<double(const Eigen::VectorXd&)>;

struct MinimizeOptions {
  int max_iterations = 500;
  /// Stop once ||g|| <= gradient_tolerance * (1 + |f|).
  double gradient_tolerance = 1e-8;
  /// Simplex search only: spread of vertex values relative to 1 + |f|.
  double value_tolerance = 1e-14;
  int max_evaluations = 20000;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string message;
};

/**
 * BFGS on the inverse Hessian with Armijo backtracking.
 *
 * `initial_inverse_hessian` seeds the quasi-Newton matrix; when absent the
 * identity is used. Non-finite trial values are treated as +inf and
 * backtracked over.
 */
MinimizeResult minimize_bfgs(const GradientObjective& f, const Eigen::VectorXd& x0,
                             const std::optional<Eigen::MatrixXd>& initial_inverse_hessian,
                             const MinimizeOptions& options = {});

/// Nelder-Mead simplex search started from x0 with per-coordinate steps.
MinimizeResult minimize_nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                                    const Eigen::VectorXd& step,
                                    const MinimizeOptions& options = {});

}  // namespace ssalt::optim
