#pragma once

// CSV tables and JSON summaries for experiment reports.

#include <span>
#include <string>

#include "json.hpp"

#include "ct/analysis.hpp"
#include "ct/bottleneck.hpp"

namespace ct::reports {

using Json = nlohmann::json;

Json summary(const bottleneck::EvaluationReport& r);
/// One row per seed.
std::string csv(const bottleneck::EvaluationReport& r);

Json summary(const analysis::InterventionReport& r);
/// One row per (state, alternative).
std::string csv(const analysis::InterventionReport& r);

Json summary(const analysis::AblationReport& r);
/// One row per ablation condition.
std::string csv(const analysis::AblationReport& r);

std::string curve_csv(std::span<const double> curve);

std::string csv(std::span<const analysis::SweepRow> rows);

}  // namespace ct::reports
