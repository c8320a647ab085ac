#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selcon/conformal.hpp"

namespace selcon {

enum class Variant { baseline, pro };

const char* variant_name(Variant v);
Variant variant_from_string(const std::string& s);

struct GateConfig {
  Variant variant = Variant::baseline;
  double delta = 0.1;
  std::vector<Notion> notions = {Notion::pe_frequency};
  bool use_bh = false;  // engaged when more than one notion is listed
};

// Per test sample: p-values per notion, the accept/abstain verdict, and the
// prediction set when accepted.
struct GateDecision {
  std::string id;
  std::map<Notion, double> p_values;
  bool rejected = false;
  std::optional<double> bh_threshold_used;
  std::optional<std::vector<std::size_t>> prediction_set;
};

// Rank-based conformal p-value (1 + #{u_i >= u_test}) / (N+1).
double p_value_baseline(const std::vector<double>& cal_uncertainty, double u_test);

// Refined p-value: only calibration points whose leave-one-out prediction
// status is good contribute to the count.
double p_value_pro(const std::vector<double>& cal_uncertainty,
                   const std::vector<bool>& loo_status, double u_test);

// Benjamini-Hochberg step-up selection: sorts p ascending, finds the largest
// k with p_(k) <= k*delta/B, rejects every hypothesis with p <= p_(k*).
// Returns the indices (into the input list) of rejected hypotheses.
std::vector<std::size_t> bh_select(const std::vector<double>& p_values, double delta);

// Per-notion calibration uncertainties aligned with cal.scores_sorted /
// cal.loo_status.
using NotionValues = std::map<Notion, std::vector<double>>;

GateDecision gate(const CalibrationArtifact& cal, const NotionValues& cal_uncertainty,
                  const ScoredSample& test, const GateConfig& cfg);

// Builds the aligned per-notion uncertainty lists for a calibration artifact
// from the samples it was calibrated on. Throws DataError when a notion is
// unavailable for some record.
NotionValues collect_notion_values(const CalibrationArtifact& cal,
                                   const std::vector<ScoredSample>& samples,
                                   const std::vector<Notion>& notions);

}  // namespace selcon
