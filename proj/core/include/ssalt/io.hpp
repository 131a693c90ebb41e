#pragma once

#include "ssalt/estimation.hpp"
#include "ssalt/model.hpp"
#include "ssalt/simulation.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ssalt {

/// Arrhenius temperature-to-stress map x = -(1/K)(1/T0 - 1/T).
struct ArrheniusSpec {
  double T0 = 0.0;
  std::vector<double> T_levels;
  /// eV/K
  double boltzmann = 8.36e-5;
};

double arrhenius_stress(double T0, double T, double boltzmann = 8.36e-5);

/// Raw transformed stress for every entry of T_levels. Throws DomainError on T <= 0.
std::vector<double> arrhenius_stress(const ArrheniusSpec& spec);

struct LoadOptions {
  /// Multiplies every time in the file.
  double time_scale = 1.0;
  /// Divide Arrhenius stresses by the raw level farthest from x0, mapping it to 1.
  /// Defaults to the file's setting, else on.
  std::optional<bool> normalize_stress;
};

struct Dataset {
  StepStressDesign design;
  CountData data;
  /// Present when stresses were given in Kelvin.
  std::optional<ArrheniusSpec> arrhenius;
  bool normalized = false;
  /// Signed divisor applied to the raw Arrhenius stresses.
  double stress_scale = 1.0;
  double time_scale = 1.0;
};

/**
 * Dataset text format:
 *
 *   # comment
 *   N 35
 *   tau1 5
 *   tau2 6
 *   risks 2
 *   stress 293K 353K      (plain numbers are used as is)
 *   x0 293K
 *   normalize yes         (optional, Arrhenius only)
 *   boltzmann 8.36e-5     (optional)
 *   2, 2, 5               (IT, n_1, ..., n_R)
 *
 * Survivors are N minus the listed failures. Throws ParseError.
 */
Dataset parse_dataset(std::istream& in, const std::string& source, const LoadOptions& options = {});
Dataset load_dataset(const std::string& path, const LoadOptions& options = {});

/// Writes in the format read by parse_dataset; times are written after scaling.
void write_dataset(std::ostream& out, const Dataset& dataset);
void save_dataset(const std::string& path, const Dataset& dataset);

/**
 * Scenario text format, one key per line:
 *
 *   x1 35 / x2 45 / x0 25 / tau1 45 / tau2 75
 *   inspection_times 15 25 35 45 55 65 75
 *   params 5 -0.02 6.2 -0.04
 *   N 360 / replications 1000 / seed 7 / betas 0 0.2 ... / epsilon 0.1
 *   contamination 3:1 3:2 ...     (1-based interval:risk; default intervals 2-3)
 *   t0 50 / alpha0 0.5 / level 0.95 / B 1000 / max_regenerations 1000
 */
SimulationScenario parse_scenario(std::istream& in, const std::string& source);
SimulationScenario load_scenario(const std::string& path);
void write_scenario(std::ostream& out, const SimulationScenario& scenario);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace ssalt
