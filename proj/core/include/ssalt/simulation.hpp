#pragma once

#include "ssalt/characteristics.hpp"
#include "ssalt/estimation.hpp"
#include "ssalt/model.hpp"
#include "ssalt/random.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace ssalt {

/// Multinomial cell (interval, risk), both 0-based.
struct CellTarget {
  int interval = 0;
  int risk = 0;

  friend bool operator==(const CellTarget&, const CellTarget&) = default;
};

enum class IntervalMethod { direct, transformed, bca };

std::string to_string(IntervalMethod method);

struct SimulationScenario {
  StepStressDesign design;
  ModelParams true_params;
  int N = 360;
  double contamination_fraction = 0.0;
  std::vector<CellTarget> contamination_cells;
  int replications = 1000;
  std::vector<double> betas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::uint64_t seed = 1;
  int max_regenerations = 1000;
  /// Mission time and quantile level for the reliability and quantile characteristics.
  double t0 = 50.0;
  double alpha0 = 0.5;
  double level = 0.95;
  int bootstrap_B = 1000;
  /// 0 means one worker per hardware thread.
  int threads = 0;

  /// Throws DomainError. The contamination fraction may be 1 for generation only.
  void validate() const;

  /// Every risk in intervals 2 and 3 (1-based), clipped to the design.
  static std::vector<CellTarget> default_contamination_cells(const StepStressDesign& design);
};

/// floor(eps N) units spread uniformly over the target cells, the rest from the model.
/// Ill-posed draws are regenerated and counted in `discarded` when given.
CountData generate_contaminated(const SimulationScenario& scenario, Rng& rng,
                                int* discarded = nullptr);

struct CoverageCell {
  double beta = 0.0;
  CharacteristicSpec characteristic;
  IntervalMethod method = IntervalMethod::direct;
  double coverage = 0.0;
  double mean_width = 0.0;
  int count = 0;
};

struct SimulationReport {
  double contamination_fraction = 0.0;
  int N = 0;
  int replications = 0;
  std::vector<double> betas;
  /// Per beta, MSE of each coefficient.
  std::vector<Eigen::VectorXd> param_mse;
  std::vector<CharacteristicSpec> characteristics;
  /// Per beta, MSE of each characteristic.
  std::vector<std::vector<double>> characteristic_mse;
  std::vector<CoverageCell> coverage;
  /// Per beta, replicates whose fit failed and were excluded.
  std::vector<int> failed_fits;
  /// Generated data sets discarded as ill posed.
  int discarded_datasets = 0;

  const CoverageCell* find(double beta, const std::string& characteristic,
                           IntervalMethod method) const;
};

struct StudyOptions {
  std::vector<CharacteristicSpec> characteristics;
  std::vector<IntervalMethod> methods;
  /// Betas for which BCa intervals are computed; empty means every beta.
  std::vector<double> bca_betas;
};

/// MSE and coverage from one pass over the replicates; every beta sees the same data sets.
SimulationReport run_study(const SimulationScenario& scenario, const StudyOptions& options);

/// MSE of the coefficients and of MTTF, reliability(t0) and the alpha0 quantile.
SimulationReport run_mse_study(const SimulationScenario& scenario);

SimulationReport run_coverage_study(const SimulationScenario& scenario,
                                    const CharacteristicSpec& characteristic,
                                    const std::vector<IntervalMethod>& methods);

}  // namespace ssalt
