#pragma once

// Naive brute-force reimplementations used as independent oracles. These stay
// deliberately dumb: full sorts, explicit enumeration, no shared code with
// the library path they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

inline std::size_t rank_of(std::size_t n, double alpha) {
  // smallest k in 1..n+1 with k >= (n+1)(1-alpha)
  const double target = static_cast<double>(n + 1) * (1.0 - alpha);
  for (std::size_t k = 1; k <= n + 1; ++k) {
    if (static_cast<double>(k) >= target - 1e-9) return k;
  }
  return n + 1;
}

inline double quantile(std::vector<double> scores, double alpha) {
  std::sort(scores.begin(), scores.end());
  const std::size_t k = rank_of(scores.size(), alpha);
  if (k > scores.size()) return std::numeric_limits<double>::infinity();
  return scores[k - 1];
}

// Leave-one-out coverage status by explicit re-calibration per point.
inline std::vector<bool> loo_status(const std::vector<double>& scores, double alpha) {
  const std::size_t n = scores.size();
  std::vector<bool> status(n, false);
  if (n < 2) return status;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> rest;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) rest.push_back(scores[j]);
    }
    status[i] = scores[i] <= quantile(rest, alpha);
  }
  return status;
}

inline double p_baseline(const std::vector<double>& u, double u_test) {
  std::size_t c = 0;
  for (double v : u) {
    if (v >= u_test) ++c;
  }
  return static_cast<double>(1 + c) / static_cast<double>(u.size() + 1);
}

inline double p_pro(const std::vector<double>& u, const std::vector<bool>& status,
                    double u_test) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] >= u_test && status[i]) ++c;
  }
  return static_cast<double>(1 + c) / static_cast<double>(u.size() + 1);
}

// BH step-up by trying every k per the definition.
inline std::vector<std::size_t> bh(const std::vector<double>& p, double delta) {
  const std::size_t b = p.size();
  std::vector<double> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  std::size_t k_star = 0;
  for (std::size_t k = 1; k <= b; ++k) {
    if (sorted[k - 1] <= static_cast<double>(k) * delta / static_cast<double>(b)) {
      k_star = k;
    }
  }
  std::vector<std::size_t> rejected;
  if (k_star > 0) {
    for (std::size_t i = 0; i < b; ++i) {
      if (p[i] <= sorted[k_star - 1]) rejected.push_back(i);
    }
  }
  return rejected;
}

}  // namespace oracle
