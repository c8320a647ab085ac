#include "selcon/risk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selcon/conformal.hpp"
#include "selcon/error.hpp"

namespace selcon {

RiskProfile min_risk_level(const std::vector<ScoredSample>& samples) {
  if (samples.empty()) throw DataError("min_risk_level: empty sample list");
  RiskProfile p;
  p.n = samples.size();
  std::size_t misses = 0;
  for (const auto& s : samples) {
    if (!s.has_admissible) ++misses;
  }
  p.miss_fraction = static_cast<double>(misses) / static_cast<double>(p.n);
  // N * L_N(1) / (N+1) == misses / (N+1), computed that way for exactness.
  p.alpha_min = static_cast<double>(misses) / static_cast<double>(p.n + 1);
  return p;
}

AlphaCheck check_alpha(double alpha, const RiskProfile& profile) {
  if (alpha <= 0.0 || alpha >= 1.0) throw DataError("alpha must be in (0, 1)");
  return alpha < profile.alpha_min ? AlphaCheck::below_minimum : AlphaCheck::ok;
}

bool risk_check_applies(TaskKind kind, const NsWeights& w) {
  return kind == TaskKind::open_domain || w.w_f > 0.0;
}

SamplingBudget sampling_budget(
    const std::vector<std::pair<std::string, std::optional<int>>>& m_values,
    double beta) {
  if (m_values.empty()) throw DataError("sampling_budget: empty input");
  if (beta <= 0.0 || beta >= 1.0) throw DataError("beta must be in (0, 1)");
  std::string absent;
  std::vector<int> ms;
  ms.reserve(m_values.size());
  for (const auto& [id, m] : m_values) {
    if (m) {
      ms.push_back(*m);
    } else {
      if (!absent.empty()) absent += ", ";
      absent += id;
    }
  }
  if (!absent.empty()) {
    throw DataError(
        "sampling_budget: records without any admissible draw cannot certify a "
        "finite budget: " + absent);
  }
  const std::size_t n = ms.size();
  const std::size_t rank = conformal_rank(n, beta);
  if (rank > n) {
    std::ostringstream os;
    os << "sampling_budget: rank " << rank << " exceeds N=" << n
       << "; minimum feasible beta is " << 1.0 / static_cast<double>(n + 1);
    throw DataError(os.str());
  }
  std::nth_element(ms.begin(), ms.begin() + (rank - 1), ms.end());
  SamplingBudget b;
  b.beta = beta;
  b.quantile_rank = rank;
  b.m_hat = ms[rank - 1];
  return b;
}

}  // namespace selcon
