#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selcon/uncertainty.hpp"

namespace selcon {

// Minimum risk level the calibration set can certify:
// alpha_min = N * L_N(1) / (N+1), where L_N(1) is the fraction of records
// with no admissible sampled answer.
struct RiskProfile {
  std::size_t n = 0;
  double miss_fraction = 0.0;
  double alpha_min = 0.0;
};

enum class AlphaCheck { ok, below_minimum };

// Calibrated sampling budget: m_hat is the rank-ceil((1-beta)(N+1)) smallest
// of the calibration minimum sampling sizes.
struct SamplingBudget {
  double beta = 0.0;
  int m_hat = 0;
  std::size_t quantile_rank = 0;
};

RiskProfile min_risk_level(const std::vector<ScoredSample>& samples);

// below_minimum iff alpha < profile.alpha_min (equality is ok).
AlphaCheck check_alpha(double alpha, const RiskProfile& profile);

// Whether the NS configuration consumes the sampling set, in which case
// check_alpha applies; pure-logit MCQA permits any alpha.
bool risk_check_applies(TaskKind kind, const NsWeights& w);

// Throws DataError listing the ids of records with absent m_i (a finite
// budget cannot be certified from them) and on rank overflow (beta too
// small for N; the message reports the minimum feasible beta).
SamplingBudget sampling_budget(
    const std::vector<std::pair<std::string, std::optional<int>>>& m_values,
    double beta);

}  // namespace selcon
