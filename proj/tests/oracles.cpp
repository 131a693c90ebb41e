#include "oracles.hpp"

#include "ssalt/bootstrap.hpp"
#include "ssalt/characteristics.hpp"
#include "ssalt/random.hpp"
#include "ssalt/robustness.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ssalt::testing {

namespace {

using boost::math::quadrature::gauss_kronrod;

double integrate(const std::function<double(double)>& f, double a, double b) {
  double error = 0.0;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14, &error);
}

// Rate of risk j while the profile sits at the level in force at time t.
double rate_at(const ModelParams& params, const StepStressDesign& design, int risk, double t) {
  const double x = t <= design.tau1 ? design.x1 : design.x2;
  return std::exp(-(params.intercept(risk) + params.slope(risk) * x));
}

// Cumulative exposure written out directly: t / theta_1j before tau1,
// tau1 / theta_1j + (t - tau1) / theta_2j after.
double survival(const ModelParams& params, const StepStressDesign& design, double t) {
  double h = 0.0;
  for (int j = 0; j < params.num_risks(); ++j) {
    const double r1 = std::exp(-(params.intercept(j) + params.slope(j) * design.x1));
    const double r2 = std::exp(-(params.intercept(j) + params.slope(j) * design.x2));
    h += t <= design.tau1 ? t * r1 : design.tau1 * r1 + (t - design.tau1) * r2;
  }
  return std::exp(-h);
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

}  // namespace

StepStressDesign simulation_design() {
  StepStressDesign d;
  d.x1 = 35.0;
  d.x2 = 45.0;
  d.x0 = 25.0;
  d.tau1 = 45.0;
  d.tau2 = 75.0;
  d.inspection_times = {15, 25, 35, 45, 55, 65, 75};
  d.num_risks = 2;
  return d;
}

ModelParams simulation_params() { return ModelParams{5.0, -0.02, 6.2, -0.04}; }

RandomInstance random_instance(std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  RandomInstance out;
  StepStressDesign& d = out.design;
  d.num_risks = 1 + static_cast<int>(uniform01(rng) * 3);
  d.x1 = uniform(rng, 0.0, 1.0);
  d.x2 = d.x1 + uniform(rng, 0.2, 1.0);
  d.x0 = d.x1 - uniform(rng, 0.0, 1.0);
  const int L = 3 + static_cast<int>(uniform01(rng) * 5);
  double t = 0.0;
  for (int l = 0; l < L; ++l) {
    t += uniform(rng, 0.5, 2.0);
    d.inspection_times.push_back(t);
  }
  d.tau1 = d.inspection_times[static_cast<std::size_t>(uniform01(rng) * (L - 1))];
  d.tau2 = d.inspection_times.back();
  Eigen::VectorXd a(2 * d.num_risks);
  // theta at x1 is of the order of tau2.
  for (int j = 0; j < d.num_risks; ++j) {
    a[2 * j + 1] = uniform(rng, -1.5, 0.0);
    a[2 * j] = std::log(d.tau2) + uniform(rng, -0.5, 1.0) - a[2 * j + 1] * d.x1;
  }
  out.params = ModelParams(a);
  return out;
}

OracleReport jacobian_oracle(int instances, std::uint64_t seed) {
  OracleReport report;
  report.tolerance = 1e-6;
  for (int k = 0; k < instances; ++k) {
    const RandomInstance inst = random_instance(seed + static_cast<std::uint64_t>(k));
    const Eigen::MatrixXd W = derivative_matrix(inst.params, inst.design);
    const Eigen::VectorXd a = inst.params.vector();
    for (Eigen::Index c = 0; c < a.size(); ++c) {
      // Richardson-extrapolated central differences.
      const auto central = [&](double h) {
        Eigen::VectorXd up = a, down = a;
        up[c] += h;
        down[c] -= h;
        return Eigen::VectorXd((cell_probabilities(ModelParams(up), inst.design) -
                                cell_probabilities(ModelParams(down), inst.design)) /
                               (2.0 * h));
      };
      const double h = 1e-3;
      const Eigen::VectorXd fd = (4.0 * central(h / 2.0) - central(h)) / 3.0;
      const double scale = std::max(W.col(c).cwiseAbs().maxCoeff(), 1e-12);
      for (Eigen::Index r = 0; r < W.rows(); ++r) {
        // Entries far below the column scale are compared against that scale.
        const double denom = std::max(std::abs(fd[r]), 1e-4 * scale);
        const double rel = std::abs(W(r, c) - fd[r]) / denom;
        if (rel > report.worst) {
          report.worst = rel;
          std::ostringstream s;
          s << "instance " << k << " cell " << r << " coefficient " << c;
          report.detail = s.str();
        }
      }
    }
  }
  return report;
}

OracleReport quadrature_oracle(const ModelParams& params, const StepStressDesign& design) {
  OracleReport report;
  report.tolerance = 1e-8;
  const Eigen::VectorXd p = cell_probabilities(params, design);
  for (int l = 0; l < design.num_intervals(); ++l) {
    const double lo = design.interval_start(l);
    const double hi = design.interval_end(l);
    for (int j = 0; j < design.num_risks; ++j) {
      // Evaluate just inside the interval so the level is that of the cell.
      const double mid = 0.5 * (lo + hi);
      const double rate = rate_at(params, design, j, mid);
      const double q = integrate([&](double t) { return rate * survival(params, design, t); }, lo, hi);
      const double err = std::abs(q - p[design.cell_index(l, j)]);
      if (err > report.worst) {
        report.worst = err;
        report.detail = "interval " + std::to_string(l) + " risk " + std::to_string(j);
      }
    }
  }
  double total_rate = 0.0;
  for (int j = 0; j < design.num_risks; ++j) total_rate += rate_at(params, design, j, design.tau2 + 1.0);
  const double tail = integrate([&](double t) { return total_rate * survival(params, design, t); },
                                design.tau2, std::numeric_limits<double>::infinity());
  const double err = std::abs(tail - p[design.survival_cell()]);
  if (err > report.worst) {
    report.worst = err;
    report.detail = "survival cell";
  }
  return report;
}

OracleReport ml_oracle(const CountData& data, const StepStressDesign& design) {
  OracleReport report;
  report.tolerance = 1e-6;
  const Eigen::VectorXd p_hat = data.empirical();
  const auto loglik = [&](const Eigen::VectorXd& a) {
    const Eigen::VectorXd p = cell_probabilities(ModelParams(a), design);
    double s = 0.0;
    for (Eigen::Index c = 0; c < p.size(); ++c)
      if (p_hat[c] > 0.0) s += p_hat[c] * std::log(p[c]);
    return s;
  };
  // Fisher scoring with step halving.
  Eigen::VectorXd a = moment_initializer(p_hat, data.N, design).vector();
  for (int it = 0; it < 200; ++it) {
    const CellModel m = evaluate_cells(ModelParams(a), design);
    const Eigen::VectorXd inv_p = m.probabilities.cwiseInverse();
    const Eigen::MatrixXd info = m.jacobian.transpose() * inv_p.asDiagonal() * m.jacobian;
    const Eigen::VectorXd score =
        m.jacobian.transpose() * (inv_p.asDiagonal() * (p_hat - m.probabilities));
    Eigen::VectorXd step = info.ldlt().solve(score);
    const double base = loglik(a);
    double t = 1.0;
    while (t > 1e-10 && !(loglik(a + t * step) >= base - 1e-15)) t *= 0.5;
    a += t * step;
    if (step.norm() * t < 1e-14) break;
  }
  const FitResult f = fit(data, design, 0.0);
  const Eigen::VectorXd diff = f.params_hat.vector() - a;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double rel = std::abs(diff[i]) / std::max(std::abs(a[i]), 1e-3);
    if (rel > report.worst) {
      report.worst = rel;
      report.detail = "coefficient " + std::to_string(i);
    }
  }
  return report;
}

OracleReport influence_oracle(const ModelParams& params, const StepStressDesign& design,
                              double beta, double eps) {
  OracleReport report;
  report.tolerance = 0.01;
  const Eigen::VectorXd p = cell_probabilities(params, design);
  const Eigen::MatrixXd IF = influence_matrix(params, design, beta);
  FitOptions options;
  options.initial = params;
  options.gradient_tolerance = 1e-15;
  options.compute_covariance = false;
  options.require_convergence = false;
  for (Eigen::Index c = 0; c < p.size(); ++c) {
    Eigen::VectorXd contaminated = (1.0 - eps) * p;
    contaminated[c] += eps;
    const FitResult f = fit_empirical(contaminated, 1000, design, beta, options);
    const Eigen::VectorXd approx = (f.params_hat.vector() - params.vector()) / eps;
    const double rel = (approx - IF.col(c)).norm() / IF.col(c).norm();
    if (rel > report.worst) {
      report.worst = rel;
      report.detail = "beta " + std::to_string(beta) + " cell " + std::to_string(c);
    }
  }
  return report;
}

OracleReport frequency_oracle(const ModelParams& params, const StepStressDesign& design, int units,
                              std::uint64_t seed) {
  OracleReport report;
  report.tolerance = 3.0;
  Rng rng = make_stream(seed, 0);
  const CountData data = simulate_counts(params, design, units, rng);
  const Eigen::VectorXi n = data.cells();
  const Eigen::VectorXd p = cell_probabilities(params, design);
  for (Eigen::Index c = 0; c < p.size(); ++c) {
    const double sd = std::sqrt(units * p[c] * (1.0 - p[c]));
    const double z = std::abs(n[c] - units * p[c]) / sd;
    if (z > report.worst) {
      report.worst = z;
      report.detail = "cell " + std::to_string(c);
    }
  }
  return report;
}

OracleReport mttf_oracle(const ModelParams& params, const StepStressDesign& design) {
  OracleReport report;
  report.tolerance = 1e-8;
  double rate = 0.0;
  for (int j = 0; j < params.num_risks(); ++j) rate += params.rate(j, design.x0);
  const double integral = integrate([&](double t) { return t * rate * std::exp(-rate * t); }, 0.0,
                                    std::numeric_limits<double>::infinity());
  const double value = characteristic_value(params, design, CharacteristicSpec::mttf());
  report.worst = std::abs(value - integral) / integral;
  report.detail = "mttf " + std::to_string(value);
  return report;
}

}  // namespace ssalt::testing
