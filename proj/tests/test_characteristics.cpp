#include "oracles.hpp"

#include "ssalt/bootstrap.hpp"
#include "ssalt/characteristics.hpp"
#include "ssalt/errors.hpp"
#include "ssalt/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ssalt {
namespace {

using testing::simulation_design;
using testing::simulation_params;

FitResult sample_fit(std::uint64_t seed, double beta = 0.0) {
  Rng rng = make_stream(seed, 0);
  const CountData data = simulate_dataset(simulation_params(), simulation_design(), 360, rng);
  return fit(data, simulation_design(), beta);
}

TEST(Mttf, SingleRiskIsScaleAtNormalStress) {
  StepStressDesign d = simulation_design();
  d.num_risks = 1;
  const ModelParams a{5.0, -0.02};
  EXPECT_NEAR(characteristic_value(a, d, CharacteristicSpec::mttf()), std::exp(5.0 - 0.5), 1e-12);
  EXPECT_EQ(characteristic_value(a, d, CharacteristicSpec::mttf(0)),
            characteristic_value(a, d, CharacteristicSpec::mttf()));
}

TEST(Mttf, HarmonicCombinationOfCauses) {
  const auto a = simulation_params();
  const auto d = simulation_design();
  const double e = characteristic_value(a, d, CharacteristicSpec::mttf());
  const double e1 = characteristic_value(a, d, CharacteristicSpec::mttf(0));
  const double e2 = characteristic_value(a, d, CharacteristicSpec::mttf(1));
  EXPECT_NEAR(1.0 / e, 1.0 / e1 + 1.0 / e2, 1e-15);
}

TEST(Mttf, MatchesQuadrature) {
  const auto r = testing::mttf_oracle(simulation_params(), simulation_design());
  EXPECT_TRUE(r.passed()) << r.worst;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = testing::random_instance(700 + s);
    const auto q = testing::mttf_oracle(inst.params, inst.design);
    EXPECT_TRUE(q.passed()) << q.worst;
  }
}

TEST(Reliability, OneAtTimeZero) {
  const FitResult f = sample_fit(1);
  const CharacteristicEstimate r = reliability(f, simulation_design(), 0.0);
  EXPECT_EQ(r.value, 1.0);
  EXPECT_EQ(r.sigma, 0.0);
}

TEST(Reliability, AgreesWithLifetimeCdfAtNormalStress) {
  const auto a = simulation_params();
  StepStressDesign constant = simulation_design();
  constant.x1 = constant.x0;
  constant.x2 = constant.x0 + 1.0;
  constant.tau1 = 45.0;
  // Before tau1 the profile runs at x1 = x0.
  for (double t0 : {5.0, 20.0, 40.0}) {
    const double r = characteristic_value(a, simulation_design(), CharacteristicSpec::reliability(t0));
    EXPECT_NEAR(r, 1.0 - lifetime_cdf(a, constant, t0), 1e-12);
  }
}

TEST(Quantile, UnitExponentialIdentity) {
  const auto a = simulation_params();
  const auto d = simulation_design();
  EXPECT_NEAR(characteristic_value(a, d, CharacteristicSpec::quantile(1.0 - std::exp(-1.0))),
              characteristic_value(a, d, CharacteristicSpec::mttf()), 1e-10);
}

TEST(Quantile, InvertsLifetimeCdf) {
  const auto a = simulation_params();
  StepStressDesign constant = simulation_design();
  constant.x1 = constant.x0;
  constant.x2 = constant.x0 + 1.0;
  constant.tau1 = 1e6;
  constant.tau2 = 2e6;
  constant.inspection_times = {1e6, 2e6};
  for (double alpha : {0.1, 0.5, 0.9}) {
    const double q = characteristic_value(a, simulation_design(), CharacteristicSpec::quantile(alpha));
    EXPECT_NEAR(lifetime_cdf(a, constant, q), alpha, 1e-10);
  }
}

TEST(Gradient, MatchesFiniteDifferences) {
  const auto a = simulation_params();
  const auto d = simulation_design();
  for (const auto& spec :
       {CharacteristicSpec::mttf(), CharacteristicSpec::reliability(50.0), CharacteristicSpec::quantile(0.3),
        CharacteristicSpec::mttf(1), CharacteristicSpec::reliability(50.0, 0),
        CharacteristicSpec::quantile(0.3, 1)}) {
    const Eigen::VectorXd g = characteristic_gradient(a, d, spec);
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd up = a.vector(), down = a.vector();
      const double h = 1e-6;
      up[i] += h;
      down[i] -= h;
      const double fd = (characteristic_value(ModelParams(up), d, spec) -
                         characteristic_value(ModelParams(down), d, spec)) /
                        (2.0 * h);
      EXPECT_NEAR(g[i], fd, 1e-6 * std::max(1.0, std::abs(fd))) << spec.name() << " " << i;
    }
  }
}

TEST(CauseSpecific, BlockVarianceEqualsZeroPaddedDeltaMethod) {
  const FitResult f = sample_fit(2);
  const auto d = simulation_design();
  for (int j = 0; j < 2; ++j) {
    for (const auto& spec : {CharacteristicSpec::mttf(j), CharacteristicSpec::reliability(40.0, j),
                             CharacteristicSpec::quantile(0.5, j)}) {
      const Eigen::VectorXd g = characteristic_gradient(f.params_hat, d, spec);
      for (int i = 0; i < 4; ++i)
        if (i / 2 != j) EXPECT_EQ(g[i], 0.0);
      const double full = std::sqrt(g.dot(f.covariance * g));
      EXPECT_NEAR(characteristic_sigma(f.params_hat, d, spec, f.covariance), full, 1e-12 * full);
    }
  }
}

TEST(Intervals, CollapseWhenSigmaIsZero) {
  const auto spec = CharacteristicSpec::mttf();
  EXPECT_EQ(direct_ci(spec, 10.0, 0.0, 100, 0.95), (Interval{10.0, 10.0}));
  EXPECT_EQ(transformed_ci(spec, 10.0, 0.0, 100, 0.95), (Interval{10.0, 10.0}));
}

TEST(Intervals, DirectIsTruncatedToDomain) {
  const Interval m = direct_ci(CharacteristicSpec::mttf(), 1.0, 50.0, 10, 0.95);
  EXPECT_EQ(m.lower, 0.0);
  const Interval r = direct_ci(CharacteristicSpec::reliability(1.0), 0.9, 5.0, 10, 0.95);
  EXPECT_EQ(r.lower, 0.0);
  EXPECT_EQ(r.upper, 1.0);
}

TEST(Intervals, TransformedThrowsAtBoundary) {
  EXPECT_THROW(transformed_ci(CharacteristicSpec::reliability(1.0), 1.0, 0.1, 10, 0.95), DegenerateError);
  EXPECT_THROW(transformed_ci(CharacteristicSpec::mttf(), 0.0, 0.1, 10, 0.95), DegenerateError);
}

TEST(Intervals, TransformedStaysInsideDomain) {
  const auto d = simulation_design();
  for (std::uint64_t s = 0; s < 100; ++s) {
    const FitResult f = sample_fit(1000 + s, 0.2 * static_cast<double>(s % 6));
    for (const auto& spec : {CharacteristicSpec::mttf(), CharacteristicSpec::reliability(50.0),
                             CharacteristicSpec::quantile(0.5), CharacteristicSpec::reliability(200.0, 1)}) {
      const CharacteristicEstimate e = estimate_characteristic(f, d, spec, 0.99);
      EXPECT_GT(e.ci_transformed.lower, 0.0);
      if (spec.kind == CharacteristicKind::reliability) EXPECT_LT(e.ci_transformed.upper, 1.0);
      EXPECT_TRUE(e.ci_transformed.contains(e.value));
      EXPECT_TRUE(e.ci_direct.contains(e.value));
    }
  }
}

TEST(Estimate, StandardErrorScalesSigma) {
  const FitResult f = sample_fit(3);
  const CharacteristicEstimate e = mttf(f, simulation_design());
  EXPECT_NEAR(e.std_error, e.sigma / std::sqrt(360.0), 1e-15);
  EXPECT_EQ(e.spec.name(), "mttf");
  EXPECT_EQ(cause_specific_reliability(f, simulation_design(), 1, 4.0).spec.name(), "reliability_risk2");
}

}  // namespace
}  // namespace ssalt
