#include "selcon/report.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace selcon {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json opt(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

ordered_json trial_to_json(const TrialReport& tr) {
  ordered_json j;
  j["trial_index"] = tr.trial_index;
  j["emr"] = opt(tr.emr);
  j["ssm"] = opt(tr.ssm);
  j["apss"] = opt(tr.apss);
  j["apss_dedup"] = opt(tr.apss_dedup);
  j["abstention_rate"] = tr.abstention_rate;
  ordered_json strata = ordered_json::object();
  for (const auto& [size, st] : tr.strata) {
    strata[std::to_string(size)] = {{"count", st.count},
                                    {"miscoverage", st.miscoverage}};
  }
  j["strata"] = std::move(strata);
  return j;
}

}  // namespace

std::string gate_decision_to_json(const GateDecision& d) {
  ordered_json j;
  j["id"] = d.id;
  ordered_json ps = ordered_json::object();
  for (const auto& [notion, p] : d.p_values) ps[notion_name(notion)] = p;
  j["p_values"] = std::move(ps);
  j["rejected"] = d.rejected;
  if (d.bh_threshold_used) j["bh_threshold_used"] = *d.bh_threshold_used;
  if (d.prediction_set) j["prediction_set"] = *d.prediction_set;
  return j.dump();
}

std::string risk_profile_to_json(const RiskProfile& p) {
  ordered_json j;
  j["n"] = p.n;
  j["miss_fraction"] = p.miss_fraction;
  j["alpha_min"] = p.alpha_min;
  return j.dump();
}

std::string sampling_budget_to_json(const SamplingBudget& b) {
  ordered_json j;
  j["beta"] = b.beta;
  j["quantile_rank"] = b.quantile_rank;
  j["m_hat"] = b.m_hat;
  return j.dump();
}

std::string aggregate_report_to_json(const AggregateReport& r) {
  ordered_json j;
  ordered_json agg;
  agg["emr_mean"] = opt(r.emr_mean);
  agg["emr_std"] = opt(r.emr_std);
  agg["emr_median"] = opt(r.emr_median);
  agg["ssm_mean"] = opt(r.ssm_mean);
  agg["apss_mean"] = opt(r.apss_mean);
  agg["apss_dedup_mean"] = opt(r.apss_dedup_mean);
  agg["abstention_mean"] = r.abstention_mean;
  j["aggregate"] = std::move(agg);
  ordered_json trials = ordered_json::array();
  for (const auto& tr : r.trials) trials.push_back(trial_to_json(tr));
  j["trials"] = std::move(trials);
  return j.dump(2);
}

std::string aggregate_report_to_csv(const AggregateReport& r) {
  std::ostringstream os;
  os << "trial_index,emr,ssm,apss,apss_dedup,abstention_rate\n";
  auto cell = [&](const std::optional<double>& v) {
    if (v) {
      os << *v;
    }
  };
  for (const auto& tr : r.trials) {
    os << tr.trial_index << ',';
    cell(tr.emr);
    os << ',';
    cell(tr.ssm);
    os << ',';
    cell(tr.apss);
    os << ',';
    cell(tr.apss_dedup);
    os << ',' << tr.abstention_rate << '\n';
  }
  return os.str();
}

}  // namespace selcon
