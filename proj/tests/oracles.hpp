#pragma once

#include "ssalt/estimation.hpp"
#include "ssalt/model.hpp"

#include <cstdint>
#include <string>

namespace ssalt::testing {

/// Two-risk scenario with x = (35, 45), tau1 = 45 and seven inspections.
StepStressDesign simulation_design();
ModelParams simulation_params();

/// Random two-stress design and parameters with well-behaved scales.
struct RandomInstance {
  StepStressDesign design;
  ModelParams params;
};
RandomInstance random_instance(std::uint64_t seed);

/// Worst deviation found by an oracle, with the largest allowed value.
struct OracleReport {
  double worst = 0.0;
  double tolerance = 0.0;
  std::string detail;
  bool passed() const { return worst < tolerance; }
};

/// Analytic derivative matrix vs central differences, relative per entry.
OracleReport jacobian_oracle(int instances, std::uint64_t seed);

/// Cell probabilities vs Gauss-Kronrod integration of the joint (time, cause) density.
OracleReport quadrature_oracle(const ModelParams& params, const StepStressDesign& design);

/// MDPDE at beta = 0 vs Fisher scoring on the multinomial log-likelihood.
OracleReport ml_oracle(const CountData& data, const StepStressDesign& design);

/// Influence function vs (a_eps - a0) / eps for point-mass contamination at every cell.
OracleReport influence_oracle(const ModelParams& params, const StepStressDesign& design,
                              double beta, double eps = 1e-4);

/// Cell frequencies of simulated units vs cell probabilities, in binomial standard errors.
OracleReport frequency_oracle(const ModelParams& params, const StepStressDesign& design, int units,
                              std::uint64_t seed);

/// Closed-form MTTF vs integral of t f(t) at the normal operating stress.
OracleReport mttf_oracle(const ModelParams& params, const StepStressDesign& design);

}  // namespace ssalt::testing
