#pragma once

#include <string>

#include "selcon/gate.hpp"
#include "selcon/metrics.hpp"
#include "selcon/risk.hpp"

namespace selcon {

// Stable JSON/CSV serializations used by the CLI and the report files.
std::string gate_decision_to_json(const GateDecision& d);
std::string risk_profile_to_json(const RiskProfile& p);
std::string sampling_budget_to_json(const SamplingBudget& b);
std::string aggregate_report_to_json(const AggregateReport& r);
std::string aggregate_report_to_csv(const AggregateReport& r);

}  // namespace selcon
