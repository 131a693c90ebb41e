#pragma once

#include "ssalt/bootstrap.hpp"
#include "ssalt/characteristics.hpp"
#include "ssalt/estimation.hpp"
#include "ssalt/io.hpp"
#include "ssalt/robustness.hpp"
#include "ssalt/simulation.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace ssalt {

void to_json(nlohmann::json& j, const Interval& v);
void to_json(nlohmann::json& j, const StepStressDesign& v);
void to_json(nlohmann::json& j, const CountData& v);
void to_json(nlohmann::json& j, const Dataset& v);
void to_json(nlohmann::json& j, const FitResult& v);
void to_json(nlohmann::json& j, const CharacteristicSpec& v);
void to_json(nlohmann::json& j, const CharacteristicEstimate& v);
/// Replicates are omitted; the summary fields are kept.
void to_json(nlohmann::json& j, const BcaResult& v);
void to_json(nlohmann::json& j, const SensitivityCurve& v);
void to_json(nlohmann::json& j, const SimulationScenario& v);
void to_json(nlohmann::json& j, const SimulationReport& v);

/// Pretty-printed JSON; doubles are written with round-trip precision.
void save_report(const nlohmann::json& report, const std::string& path);
nlohmann::json load_report(const std::string& path);

}  // namespace ssalt
