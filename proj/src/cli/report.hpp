#pragma once

#include <json.hpp>

#include <set>
#include <string>

#include "kgt/cli.hpp"
#include "kgt/kam.hpp"
#include "kgt/resonance.hpp"

namespace kgt::cli {

nlohmann::json config_object(const RunConfig& cfg);
nlohmann::json kam_report_json(const KamReport& rep);
std::string kam_trace_csv(const KamReport& rep);
nlohmann::json measure_json(const MeasureEstimate& est, const EllBudget& budget, long samples, std::uint64_t seed);

}  // namespace kgt::cli
