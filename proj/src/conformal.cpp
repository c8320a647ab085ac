#include "selcon/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "selcon/error.hpp"

namespace selcon {

std::size_t conformal_rank(std::size_t n, double alpha) {
  // ceil((n+1)(1-alpha)); the epsilon guards against binary representations
  // of (1-alpha) pushing an exact integer product just above it.
  const double v = static_cast<double>(n + 1) * (1.0 - alpha);
  const double r = std::ceil(v - 1e-9);
  return r < 1.0 ? 1 : static_cast<std::size_t>(r);
}

double conformal_quantile(std::vector<double> scores, double alpha) {
  if (scores.empty()) throw DataError("conformal_quantile: empty score list");
  if (alpha <= 0.0 || alpha >= 1.0) throw DataError("alpha must be in (0, 1)");
  const std::size_t rank = conformal_rank(scores.size(), alpha);
  if (rank > scores.size()) return std::numeric_limits<double>::infinity();
  std::nth_element(scores.begin(), scores.begin() + (rank - 1), scores.end());
  return scores[rank - 1];
}

std::vector<std::size_t> prediction_set(const ScoredSample& sample, double q_hat) {
  std::vector<std::size_t> set;
  for (std::size_t i = 0; i < sample.per_answer_ns.size(); ++i) {
    if (sample.per_answer_ns[i] <= q_hat) set.push_back(i);
  }
  return set;
}

bool covers(const ScoredSample& sample, double q_hat) {
  if (!sample.ns_truth) {
    throw DataError("covers: sample '" + sample.id + "' has no ns_truth");
  }
  if (!sample.has_admissible) return std::isinf(q_hat);
  return *sample.ns_truth <= q_hat;
}

CalibrationArtifact calibrate(const std::vector<ScoredSample>& samples, double alpha) {
  if (samples.empty()) throw DataError("calibrate: empty calibration set");
  if (alpha <= 0.0 || alpha >= 1.0) throw DataError("alpha must be in (0, 1)");
  const std::size_t n = samples.size();

  CalibrationArtifact art;
  art.alpha = alpha;
  art.source_index.resize(n);
  std::iota(art.source_index.begin(), art.source_index.end(), std::size_t{0});
  std::stable_sort(art.source_index.begin(), art.source_index.end(),
                   [&](std::size_t a, std::size_t b) {
                     return *samples[a].ns_truth < *samples[b].ns_truth;
                   });
  art.scores_sorted.reserve(n);
  art.source_ids.reserve(n);
  for (std::size_t idx : art.source_index) {
    art.scores_sorted.push_back(*samples[idx].ns_truth);
    art.source_ids.push_back(samples[idx].id);
  }
  const std::size_t rank = conformal_rank(n, alpha);
  art.q_hat = rank > n ? std::numeric_limits<double>::infinity()
                       : art.scores_sorted[rank - 1];

  // Leave-one-out status from the global sort: removing the element at sorted
  // position k, the remaining n-1 scores are calibrated in their own right at
  // rank ceil(n(1-alpha)); that rank's element is scores_sorted[r-1] when the
  // removed position is at or beyond r, else scores_sorted[r].
  art.loo_status.assign(n, false);
  if (n > 1) {
    const std::size_t loo_rank = conformal_rank(n - 1, alpha);
    for (std::size_t k = 0; k < n; ++k) {
      double q;
      if (loo_rank > n - 1) {
        q = std::numeric_limits<double>::infinity();
      } else if (k >= loo_rank) {
        q = art.scores_sorted[loo_rank - 1];
      } else {
        q = art.scores_sorted[loo_rank];
      }
      art.loo_status[k] = covers(samples[art.source_index[k]], q);
    }
  }
  return art;
}

}  // namespace selcon
