#pragma once

#include "ssalt/model.hpp"

#include <Eigen/Core>

#include <vector>

namespace ssalt {

enum class SensitivityKind { gross_error, self_standardized };

struct SensitivityValue {
  double value = 0.0;
  /// Cell attaining the maximum (0-based, cell order of CellProbabilities).
  int cell = 0;
};

struct SensitivityCurve {
  SensitivityKind kind = SensitivityKind::self_standardized;
  std::vector<double> betas;
  std::vector<double> values;
  std::vector<int> cells;
};

/// IF = J^-1 W^T D^{beta-1} (delta_cell - p) at the model distribution p(a).
Eigen::VectorXd influence_function(const ModelParams& params, const StepStressDesign& design,
                                   double beta, int cell);

/// All cells at once; column c is the IF for contamination at cell c.
Eigen::MatrixXd influence_matrix(const ModelParams& params, const StepStressDesign& design,
                                 double beta);

/// Gross-error: max_c ||IF(c)||_2. Self-standardized: max_c IF(c)^T Sigma^-1 IF(c).
SensitivityValue sensitivity(const ModelParams& params, const StepStressDesign& design,
                             double beta, SensitivityKind kind);

SensitivityCurve sensitivity_curve(const ModelParams& params, const StepStressDesign& design,
                                   const std::vector<double>& betas, SensitivityKind kind);

}  // namespace ssalt
