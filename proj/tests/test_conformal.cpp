#include <doctest.h>

#include <cmath>
#include <limits>

#include "selcon/conformal.hpp"
#include "selcon/error.hpp"
#include "selcon/rng.hpp"

#include "oracles.hpp"

using namespace selcon;

namespace {

ScoredSample sample_with(double ns_truth, std::vector<double> per_answer = {}) {
  ScoredSample s;
  s.id = "s";
  s.ns_truth = ns_truth;
  s.has_admissible = true;
  s.per_answer_ns = std::move(per_answer);
  return s;
}

std::vector<ScoredSample> samples_from(const std::vector<double>& scores) {
  std::vector<ScoredSample> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    auto s = sample_with(scores[i]);
    s.id = "s" + std::to_string(i);
    out.push_back(s);
  }
  return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("conformal_quantile picks the ceil((N+1)(1-alpha)) order statistic") {
  CHECK(conformal_quantile({0.1, 0.2, 0.3, 0.4}, 0.5) == 0.3);
  CHECK(conformal_quantile({0.5}, 0.9) == 0.5);
  CHECK(std::isinf(conformal_quantile({0.1, 0.2, 0.3, 0.4}, 0.1)));
  CHECK_THROWS_AS(conformal_quantile({}, 0.5), DataError);
}

TEST_CASE("prediction_set is a threshold filter with ties included") {
  const auto s = sample_with(0.2, {0.2, 0.6, 0.9, 0.95});
  CHECK(prediction_set(s, 0.6) == std::vector<std::size_t>{0, 1});
  CHECK(prediction_set(s, kInf) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(prediction_set(s, 0.1).empty());
}

TEST_CASE("covers honors the boundary and the no-admissible convention") {
  CHECK(covers(sample_with(0.3), 0.3));
  CHECK(covers(sample_with(0.4), kInf));
  auto miss = sample_with(1.0);
  miss.has_admissible = false;
  CHECK_FALSE(covers(miss, 0.99));
  CHECK_FALSE(covers(miss, 1.0));
  CHECK(covers(miss, kInf));
  ScoredSample no_truth;
  no_truth.id = "x";
  CHECK_THROWS_AS(covers(no_truth, 0.5), DataError);
}

TEST_CASE("calibrate: exhaustive leave-one-out example") {
  const auto art = calibrate(samples_from({0.1, 0.2, 0.3, 0.4}), 0.5);
  CHECK(art.scores_sorted == std::vector<double>{0.1, 0.2, 0.3, 0.4});
  CHECK(art.q_hat == 0.3);
  // leave out 0.1 -> q=0.3 covers; leave out 0.4 -> q=0.2 does not
  REQUIRE(art.loo_status.size() == 4);
  CHECK(art.loo_status[0]);
  CHECK(art.loo_status[1]);
  CHECK_FALSE(art.loo_status[2]);
  CHECK_FALSE(art.loo_status[3]);
}

TEST_CASE("calibrate: N=1 leave-one-out is false by convention") {
  const auto art = calibrate(samples_from({0.5}), 0.9);
  REQUIRE(art.loo_status.size() == 1);
  CHECK_FALSE(art.loo_status[0]);
}

TEST_CASE("calibrate: all-equal scores are all leave-one-out covered") {
  const auto art = calibrate(samples_from(std::vector<double>(9, 0.5)), 0.2);
  for (bool st : art.loo_status) CHECK(st);
}

TEST_CASE("quantile is antitone in alpha") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    std::vector<double> scores(n);
    for (double& s : scores) s = rng.uniform();
    const double a1 = 0.05 + 0.9 * rng.uniform();
    const double a2 = 0.05 + 0.9 * rng.uniform();
    const double lo = std::min(a1, a2), hi = std::max(a1, a2);
    CHECK(conformal_quantile(scores, lo) >= conformal_quantile(scores, hi));
  }
}

TEST_CASE("prediction_set size is nonincreasing as q_hat decreases") {
  Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> ns(8);
    for (double& x : ns) x = rng.uniform();
    const auto s = sample_with(ns[0], ns);
    double q1 = rng.uniform(), q2 = rng.uniform();
    if (q1 < q2) std::swap(q1, q2);
    CHECK(prediction_set(s, q1).size() >= prediction_set(s, q2).size());
  }
}

TEST_CASE("quantile and leave-one-out match the brute-force oracle") {
  Rng rng(33);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    std::vector<double> scores(n);
    for (double& s : scores) {
      // coarse grid on purpose: exercises ties
      s = static_cast<double>(rng.below(12)) / 11.0;
    }
    const double alpha = 0.02 + 0.96 * rng.uniform();
    CHECK(conformal_quantile(scores, alpha) == oracle::quantile(scores, alpha));

    const auto art = calibrate(samples_from(scores), alpha);
    const auto expect = oracle::loo_status(scores, alpha);
    REQUIRE(art.loo_status.size() == n);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(art.loo_status[k] == expect[art.source_index[k]]);
    }
  }
}

TEST_CASE("exchangeable synthetic scores meet the marginal coverage band") {
  // Calibration and test scores drawn from one exchangeable pool; mean
  // coverage must land in [1-alpha, ceil((N+1)(1-alpha))/(N+1)] within 3 SE.
  Rng rng(34);
  const std::size_t n_cal = 50;
  const int trials = 2000;
  const double alpha = 0.2;
  int covered_count = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> cal(n_cal);
    for (double& s : cal) s = rng.uniform();
    const double q = conformal_quantile(cal, alpha);
    if (rng.uniform() <= q) ++covered_count;
  }
  const double cov = static_cast<double>(covered_count) / trials;
  const double upper = std::ceil((n_cal + 1) * (1 - alpha)) / (n_cal + 1);
  const double se = std::sqrt(cov * (1 - cov) / trials);
  CHECK(cov >= 1 - alpha - 3 * se);
  CHECK(cov <= upper + 3 * se);
}
