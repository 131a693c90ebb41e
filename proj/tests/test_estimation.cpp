#include "oracles.hpp"

#include "ssalt/bootstrap.hpp"
#include "ssalt/errors.hpp"
#include "ssalt/estimation.hpp"
#include "ssalt/random.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>

namespace ssalt {
namespace {

using testing::simulation_design;
using testing::simulation_params;

CountData expected_counts(const ModelParams& a, const StepStressDesign& d, int N) {
  const Eigen::VectorXd p = cell_probabilities(a, d);
  Eigen::VectorXi cells(p.size());
  for (Eigen::Index c = 0; c < p.size(); ++c) cells[c] = static_cast<int>(std::lround(N * p[c]));
  return CountData::from_cells(cells, d.num_risks);
}

CountData clean_sample(std::uint64_t seed, int N = 360) {
  Rng rng = make_stream(seed, 0);
  return simulate_dataset(simulation_params(), simulation_design(), N, rng);
}

TEST(CountData, CellRoundTrip) {
  const CountData data = clean_sample(1);
  EXPECT_EQ(CountData::from_cells(data.cells(), 2), data);
  EXPECT_NEAR(data.empirical().sum(), 1.0, 1e-15);
}

TEST(CountData, WellPosedNeedsEveryRiskAtEveryLevel) {
  CountData data = clean_sample(2);
  EXPECT_TRUE(data.well_posed(simulation_design()));
  for (int l = 4; l < 7; ++l) {
    data.n0 += data.n(l, 1);
    data.n(l, 1) = 0;
  }
  EXPECT_FALSE(data.well_posed(simulation_design()));
  EXPECT_THROW(fit(data, simulation_design(), 0.0), IllPosedError);
}

TEST(Divergence, ZeroAtModel) {
  const Eigen::VectorXd p = cell_probabilities(simulation_params(), simulation_design());
  for (double beta : {0.0, 0.3, 1.0}) EXPECT_NEAR(dpd_divergence(p, p, beta), 0.0, 1e-15);
}

TEST(Divergence, TwoCellHighPrecisionValues) {
  const Eigen::Vector2d p_hat(0.5, 0.5), p(0.8, 0.2);
  EXPECT_NEAR(dpd_divergence(p_hat, p, 0.5), 0.206736854523208623912, 1e-14);
  EXPECT_NEAR(dpd_divergence(p_hat, p, 0.0), 0.223143551314209700255, 1e-14);
}

TEST(Divergence, ContinuousAtBetaZero) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = testing::random_instance(300 + s);
    const Eigen::VectorXd p = cell_probabilities(inst.params, inst.design);
    const Eigen::VectorXd q = (0.7 * p.array() + 0.3 / static_cast<double>(p.size())).matrix();
    EXPECT_LT(std::abs(dpd_divergence(q, p, 1e-4) - dpd_divergence(q, p, 0.0)), 1e-3);
  }
}

TEST(EstimatingEquations, ZeroAtModel) {
  const auto a = simulation_params();
  const Eigen::VectorXd p = cell_probabilities(a, simulation_design());
  EXPECT_LT(estimating_equation_residual(a, p, simulation_design(), 0.4).norm(), 1e-15);
}

TEST(EstimatingEquations, ProportionalToLossGradient) {
  const CountData data = clean_sample(3);
  const auto d = simulation_design();
  const ModelParams a{5.1, -0.021, 6.1, -0.038};
  for (double beta : {0.0, 0.2, 0.5, 1.0}) {
    const Eigen::VectorXd r = estimating_equation_residual(a, data, d, beta);
    for (int i = 0; i < 4; ++i) {
      const auto central = [&](double h) {
        Eigen::VectorXd up = a.vector(), down = a.vector();
        up[i] += h;
        down[i] -= h;
        return (dpd_loss(ModelParams(up), data, d, beta) - dpd_loss(ModelParams(down), data, d, beta)) /
               (2.0 * h);
      };
      const double h = 1e-4;
      const double fd = (4.0 * central(h / 2.0) - central(h)) / 3.0;
      EXPECT_NEAR(-(1.0 + beta) * r[i], fd, 1e-6 * std::max(1.0, std::abs(fd)))
          << "beta " << beta << " coefficient " << i;
    }
  }
}

TEST(Fit, RecoversParametersFromExpectedCounts) {
  const auto a = simulation_params();
  const auto d = simulation_design();
  const CountData data = expected_counts(a, d, 1000000);
  for (double beta : {0.0, 0.5, 1.0}) {
    const FitResult f = fit(data, d, beta);
    EXPECT_TRUE(f.converged);
    EXPECT_LT((f.params_hat.vector() - a.vector()).cwiseAbs().maxCoeff(), 1e-2) << "beta " << beta;
  }
}

TEST(Fit, BetaZeroMatchesFisherScoring) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto r = testing::ml_oracle(clean_sample(40 + s), simulation_design());
    EXPECT_TRUE(r.passed()) << r.worst << " at " << r.detail;
  }
}

TEST(Fit, SolvesEstimatingEquations) {
  const CountData data = clean_sample(5);
  for (double beta : {0.0, 0.2, 0.6, 1.0}) {
    const FitResult f = fit(data, simulation_design(), beta);
    EXPECT_LT(estimating_equation_residual(f.params_hat, data, simulation_design(), beta).norm(), 1e-6);
    EXPECT_EQ(f.beta, beta);
    EXPECT_EQ(f.N, 360);
  }
}

TEST(Fit, DeterministicAcrossCalls) {
  const CountData data = clean_sample(6);
  const FitResult a = fit(data, simulation_design(), 0.4);
  const FitResult b = fit(data, simulation_design(), 0.4);
  EXPECT_EQ(a.params_hat, b.params_hat);
  EXPECT_EQ(a.covariance, b.covariance);
}

TEST(Fit, RejectsNegativeBeta) {
  EXPECT_THROW(fit(clean_sample(7), simulation_design(), -0.1), DomainError);
}

TEST(Covariance, BetaZeroIsInverseFisherInformation) {
  const auto a = simulation_params();
  const auto d = simulation_design();
  const CellModel m = evaluate_cells(a, d);
  const InformationMatrices info = information_matrices(m, 0.0);
  EXPECT_LT((info.J - info.K).cwiseAbs().maxCoeff(), 1e-12 * info.J.cwiseAbs().maxCoeff());
  const Eigen::MatrixXd sigma = asymptotic_covariance(a, d, 0.0);
  const Eigen::MatrixXd fisher =
      m.jacobian.transpose() * m.probabilities.cwiseInverse().asDiagonal() * m.jacobian;
  EXPECT_LT((sigma * fisher - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Covariance, SymmetricPositiveDefinite) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto inst = testing::random_instance(500 + s);
    for (double beta : {0.0, 0.5, 1.0}) {
      Eigen::MatrixXd sigma;
      try {
        sigma = asymptotic_covariance(inst.params, inst.design, beta);
      } catch (const SingularInformationError&) {
        continue;
      }
      EXPECT_LT((sigma - sigma.transpose()).cwiseAbs().maxCoeff(), 1e-9 * sigma.cwiseAbs().maxCoeff());
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sigma).eigenvalues().minCoeff(), 0.0);
    }
  }
}

TEST(Covariance, MatchesMonteCarloSpread) {
  const auto a = simulation_params();
  const auto d = simulation_design();
  const int N = 360, reps = 1000;
  for (double beta : {0.0, 0.5}) {
    Eigen::MatrixXd est(reps, 4);
    for (int r = 0; r < reps; ++r) {
      Rng rng = make_stream(99, static_cast<std::uint64_t>(r));
      FitOptions o;
      o.compute_covariance = false;
      est.row(r) = fit(simulate_dataset(a, d, N, rng), d, beta, o).params_hat.vector().transpose();
    }
    const Eigen::RowVectorXd mean = est.colwise().mean();
    const Eigen::MatrixXd centred = est.rowwise() - mean;
    const Eigen::VectorXd empirical = (centred.transpose() * centred).diagonal() * N / (reps - 1);
    const Eigen::VectorXd theory = asymptotic_covariance(a, d, beta).diagonal();
    for (int i = 0; i < 4; ++i)
      EXPECT_NEAR(empirical[i] / theory[i], 1.0, 0.15) << "beta " << beta << " coefficient " << i;
  }
}

TEST(Covariance, SingularInformationIsReported) {
  InformationMatrices info;
  info.J = Eigen::Matrix2d{{1.0, 1.0}, {1.0, 1.0}};
  info.K = Eigen::Matrix2d::Identity();
  EXPECT_THROW(sandwich_covariance(info), SingularInformationError);
}

TEST(ParamIntervals, ZeroWidthAtLevelZero) {
  const FitResult f = fit(clean_sample(8), simulation_design(), 0.0);
  for (const Interval& ci : param_confidence_interval(f, 0.0)) EXPECT_EQ(ci.width(), 0.0);
}

TEST(ParamIntervals, WidthShrinksWithRootN) {
  const auto d = simulation_design();
  const FitResult small = fit(expected_counts(simulation_params(), d, 360), d, 0.0);
  const FitResult large = fit(expected_counts(simulation_params(), d, 1440), d, 0.0);
  const auto a = param_confidence_interval(small, 0.95);
  const auto b = param_confidence_interval(large, 0.95);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].width() / b[i].width(), 2.0, 0.1);
}

TEST(ParamIntervals, CoverNominally) {
  const auto a = simulation_params();
  const auto d = simulation_design();
  const int reps = 400;
  std::vector<int> hits(4, 0);
  for (int r = 0; r < reps; ++r) {
    Rng rng = make_stream(123, static_cast<std::uint64_t>(r));
    const FitResult f = fit(simulate_dataset(a, d, 360, rng), d, 0.0);
    const auto cis = param_confidence_interval(f, 0.95);
    for (int i = 0; i < 4; ++i) hits[i] += cis[i].contains(a[i]) ? 1 : 0;
  }
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(hits[i] / static_cast<double>(reps), 0.95, 0.04);
}

}  // namespace
}  // namespace ssalt
