#include "ssalt/optimize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace ssalt::optim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const GradientObjective& f, const Eigen::VectorXd& x, Eigen::VectorXd& g) {
  const double value = f(x, g);
  if (!std::isfinite(value) || !g.allFinite()) return kInf;
  return value;
}

bool gradient_small(double value, const Eigen::VectorXd& g, double tolerance) {
  return g.norm() <= tolerance * (1.0 + std::abs(value));
}

}  // namespace

MinimizeResult minimize_bfgs(const GradientObjective& f, const Eigen::VectorXd& x0,
                             const std::optional<Eigen::MatrixXd>& initial_inverse_hessian,
                             const MinimizeOptions& options) {
  const Eigen::Index n = x0.size();
  const Eigen::MatrixXd h0 =
      initial_inverse_hessian ? *initial_inverse_hessian : Eigen::MatrixXd::Identity(n, n);

  MinimizeResult out;
  out.x = x0;
  out.gradient.resize(n);
  out.value = safe_eval(f, out.x, out.gradient);
  out.evaluations = 1;
  if (!std::isfinite(out.value)) {
    out.message = "objective not finite at the starting point";
    return out;
  }

  Eigen::MatrixXd h = h0;
  bool just_reset = true;
  Eigen::VectorXd x_new(n), g_new(n);

  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    if (gradient_small(out.value, out.gradient, options.gradient_tolerance)) {
      out.converged = true;
      out.message = "gradient tolerance reached";
      return out;
    }

    Eigen::VectorXd direction = -h * out.gradient;
    double slope = out.gradient.dot(direction);
    if (!(slope < 0.0)) {
      h = h0;
      direction = -h * out.gradient;
      slope = out.gradient.dot(direction);
      just_reset = true;
      if (!(slope < 0.0)) {
        direction = -out.gradient;
        slope = -out.gradient.squaredNorm();
      }
    }

    double step = 1.0;
    double value_new = kInf;
    bool accepted = false;
    const double g_norm = out.gradient.norm();
    for (int k = 0; k < 60; ++k) {
      x_new = out.x + step * direction;
      value_new = safe_eval(f, x_new, g_new);
      ++out.evaluations;
      if (value_new <= out.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      // Near the optimum the decrease drowns in rounding; a smaller gradient
      // with an unchanged value is still progress.
      const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(out.value));
      if (value_new <= out.value + noise && g_new.norm() < g_norm) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }

    if (!accepted) {
      if (!just_reset) {
        h = h0;
        just_reset = true;
        continue;
      }
      out.message = "line search failed";
      return out;
    }

    const Eigen::VectorXd s = x_new - out.x;
    const Eigen::VectorXd y = g_new - out.gradient;
    const double sy = s.dot(y);
    out.x = x_new;
    out.value = value_new;
    out.gradient = g_new;
    just_reset = false;

    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = h * y;
      h += (rho * rho * y.dot(hy) + rho) * s * s.transpose() -
           rho * (hy * s.transpose() + s * hy.transpose());
    }
  }

  if (gradient_small(out.value, out.gradient, options.gradient_tolerance)) {
    out.converged = true;
    out.message = "gradient tolerance reached";
  } else {
    out.message = "iteration limit reached";
  }
  return out;
}

MinimizeResult minimize_nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                                    const Eigen::VectorXd& step, const MinimizeOptions& options) {
  const Eigen::Index n = x0.size();
  const auto eval = [&](const Eigen::VectorXd& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  };

  std::vector<Eigen::VectorXd> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) simplex[i + 1][i] += step[i];
  for (Eigen::Index i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  MinimizeResult out;
  out.evaluations = static_cast<int>(n + 1);
  std::vector<Eigen::Index> order(n + 1);

  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });
    const Eigen::Index best = order.front();
    const Eigen::Index worst = order.back();
    const Eigen::Index second_worst = order[n - 1];

    const double spread = values[worst] - values[best];
    if (std::isfinite(spread) &&
        spread <= options.value_tolerance * (1.0 + std::abs(values[best]))) {
      out.converged = true;
      out.message = "simplex collapsed";
      break;
    }
    if (out.evaluations >= options.max_evaluations) {
      out.message = "evaluation limit reached";
      break;
    }
    ++out.iterations;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i <= n; ++i)
      if (i != worst) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double f_reflected = eval(reflected);
    ++out.evaluations;

    if (f_reflected < values[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double f_expanded = eval(expanded);
      ++out.evaluations;
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }

    const bool outside = f_reflected < values[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_contracted = eval(contracted);
    ++out.evaluations;
    if (f_contracted < (outside ? f_reflected : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }

    for (Eigen::Index i = 0; i <= n; ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = eval(simplex[i]);
    }
    out.evaluations += static_cast<int>(n);
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  out.x = simplex[static_cast<std::size_t>(best_it - values.begin())];
  out.value = *best_it;
  return out;
}

}  // namespace ssalt::optim
