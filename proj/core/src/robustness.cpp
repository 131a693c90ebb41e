#include "ssalt/robustness.hpp"

#include "ssalt/errors.hpp"
#include "ssalt/estimation.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace ssalt {

Eigen::MatrixXd influence_matrix(const ModelParams& params, const StepStressDesign& design,
                                 double beta) {
  if (!(beta >= 0.0)) throw DomainError("beta must be nonnegative");
  const CellModel cells = evaluate_cells(params, design);
  const InformationMatrices info = information_matrices(cells, beta);
  // Reuses the singularity check of the covariance.
  sandwich_covariance(info);

  const Eigen::VectorXd& p = cells.probabilities;
  const Eigen::Index C = p.size();
  Eigen::MatrixXd contrast = -p.replicate(1, C);
  contrast.diagonal().array() += 1.0;
  Eigen::VectorXd weight(C);
  for (Eigen::Index i = 0; i < C; ++i) weight[i] = p[i] > 0.0 ? std::pow(p[i], beta - 1.0) : 0.0;

  const Eigen::MatrixXd score = cells.jacobian.transpose() * weight.asDiagonal() * contrast;
  return info.J.ldlt().solve(score);
}

Eigen::VectorXd influence_function(const ModelParams& params, const StepStressDesign& design,
                                   double beta, int cell) {
  if (cell < 0 || cell >= design.num_cells()) throw DomainError("cell index out of range");
  return influence_matrix(params, design, beta).col(cell);
}

SensitivityValue sensitivity(const ModelParams& params, const StepStressDesign& design,
                             double beta, SensitivityKind kind) {
  const Eigen::MatrixXd IF = influence_matrix(params, design, beta);
  Eigen::VectorXd values(IF.cols());
  if (kind == SensitivityKind::gross_error) {
    values = IF.colwise().norm().transpose();
  } else {
    const Eigen::MatrixXd sigma = asymptotic_covariance(params, design, beta);
    const Eigen::MatrixXd solved = sigma.ldlt().solve(IF);
    values = IF.cwiseProduct(solved).colwise().sum().transpose();
  }
  SensitivityValue out;
  out.value = values.maxCoeff(&out.cell);
  return out;
}

SensitivityCurve sensitivity_curve(const ModelParams& params, const StepStressDesign& design,
                                   const std::vector<double>& betas, SensitivityKind kind) {
  SensitivityCurve out;
  out.kind = kind;
  out.betas = betas;
  for (double beta : betas) {
    const SensitivityValue v = sensitivity(params, design, beta, kind);
    out.values.push_back(v.value);
    out.cells.push_back(v.cell);
  }
  return out;
}

}  // namespace ssalt
