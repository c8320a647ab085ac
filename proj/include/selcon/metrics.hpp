#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "selcon/gate.hpp"

namespace selcon {

// Repeated random split evaluation config. Trial t uses seed base_seed + t.
// When `gate` is absent every test sample is accepted (ungated baseline).
// When `calibration_domain` is set, calibration records are drawn only from
// that domain; the remaining records of all domains form the test side.
struct SplitConfig {
  double split_ratio = 0.5;
  int trials = 1;
  std::uint64_t base_seed = 0;
  double alpha = 0.1;
  std::optional<GateConfig> gate;
  std::optional<std::string> calibration_domain;
  bool force = false;
};

struct StratumStats {
  std::size_t count = 0;
  double miscoverage = 0.0;
};

// Metrics of one random split. EMR/SSM/APSS are over accepted samples only
// and absent when every test sample abstained.
struct TrialReport {
  int trial_index = 0;
  std::optional<double> emr;
  std::map<std::size_t, StratumStats> strata;  // keyed by prediction-set size
  std::optional<double> ssm;
  std::optional<double> apss;
  std::optional<double> apss_dedup;
  double abstention_rate = 0.0;
};

struct AggregateReport {
  std::optional<double> emr_mean, emr_std, emr_median;
  std::optional<double> ssm_mean;
  std::optional<double> apss_mean, apss_dedup_mean;
  double abstention_mean = 0.0;
  std::vector<TrialReport> trials;
};

// Fraction of entries that are uncovered. Absent when empty.
std::optional<double> emr(const std::vector<bool>& covered);

// Stratifies by exact set size (empty sets are their own stratum, miscoverage
// 1 by construction) and returns the worst-stratum miscoverage.
std::pair<std::map<std::size_t, StratumStats>, double> ssm(
    const std::vector<std::pair<std::size_t, bool>>& size_and_covered);

// Mean set size; empty sets count as 0.
double apss(const std::vector<std::size_t>& sizes);

// Keeps one representative per semantic cluster: the member with the highest
// count, ties by lowest index; an admissible member always wins its cluster.
std::vector<std::size_t> semantic_dedup(const ScoredSample& sample,
                                        const std::vector<std::size_t>& pred_set);

// Full harness: for each trial split, calibrate, optionally gate, build sets
// and compute metrics. Deterministic for a fixed base_seed. Enforces the
// minimum risk level when the NS consumes the sampling set, unless forced.
AggregateReport run_trials(const Dataset& ds, const SplitConfig& cfg,
                           const NsWeights& w);

}  // namespace selcon
