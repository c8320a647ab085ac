#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "selcon/error.hpp"
#include "selcon/risk.hpp"
#include "selcon/rng.hpp"

using namespace selcon;

namespace {

std::vector<ScoredSample> samples_with_misses(std::size_t n, std::size_t misses) {
  std::vector<ScoredSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    ScoredSample s;
    s.id = "s" + std::to_string(i);
    s.has_admissible = i >= misses;
    s.ns_truth = s.has_admissible ? 0.5 : 1.0;
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("min_risk_level evaluates N L_N(1)/(N+1)") {
  const auto p = min_risk_level(samples_with_misses(10, 2));
  CHECK(p.n == 10);
  CHECK(p.miss_fraction == 0.2);
  CHECK(p.alpha_min == doctest::Approx(2.0 / 11.0).epsilon(1e-14));

  CHECK(min_risk_level(samples_with_misses(7, 0)).alpha_min == 0.0);
  CHECK(min_risk_level(samples_with_misses(4, 4)).alpha_min ==
        doctest::Approx(4.0 / 5.0).epsilon(1e-14));
  CHECK_THROWS_AS(min_risk_level({}), DataError);
}

TEST_CASE("check_alpha is inclusive at the boundary") {
  const auto p = min_risk_level(samples_with_misses(10, 2));
  CHECK(check_alpha(0.3, p) == AlphaCheck::ok);
  CHECK(check_alpha(0.1, p) == AlphaCheck::below_minimum);
  CHECK(check_alpha(p.alpha_min, p) == AlphaCheck::ok);
}

TEST_CASE("risk check applies only when the NS consumes the sampling set") {
  CHECK(risk_check_applies(TaskKind::mcqa, {.w_l = 0.0, .w_f = 1.0}));
  CHECK(risk_check_applies(TaskKind::mcqa, {.w_l = 0.5, .w_f = 0.5}));
  CHECK_FALSE(risk_check_applies(TaskKind::mcqa, {.w_l = 1.0, .w_f = 0.0}));
  CHECK(risk_check_applies(TaskKind::open_domain, {.w_l = 1.0, .w_f = 0.0}));
}

TEST_CASE("min_risk_level is permutation invariant and moves with new records") {
  auto base = samples_with_misses(9, 3);
  auto shuffled = base;
  Rng rng(7);
  rng.shuffle(shuffled);
  CHECK(min_risk_level(base).alpha_min == min_risk_level(shuffled).alpha_min);

  auto plus_covered = base;
  plus_covered.push_back(samples_with_misses(1, 0)[0]);
  CHECK(min_risk_level(plus_covered).alpha_min < min_risk_level(base).alpha_min);
  auto plus_miss = base;
  plus_miss.push_back(samples_with_misses(1, 1)[0]);
  CHECK(min_risk_level(plus_miss).alpha_min > min_risk_level(base).alpha_min);
}

TEST_CASE("sampling_budget picks the rank-ceil((1-beta)(N+1)) order statistic") {
  std::vector<std::pair<std::string, std::optional<int>>> m;
  const std::vector<int> fib{1, 1, 2, 3, 5, 8, 13, 21, 34};
  for (std::size_t i = 0; i < fib.size(); ++i) {
    m.emplace_back("r" + std::to_string(i), fib[i]);
  }
  const auto b = sampling_budget(m, 0.2);
  CHECK(b.quantile_rank == 8);
  CHECK(b.m_hat == 21);

  CHECK_THROWS_WITH_AS(sampling_budget(m, 0.05), doctest::Contains("minimum feasible beta"),
                       DataError);

  std::vector<std::pair<std::string, std::optional<int>>> ones;
  for (int i = 0; i < 12; ++i) ones.emplace_back("x" + std::to_string(i), 1);
  CHECK(sampling_budget(ones, 0.25).m_hat == 1);
}

TEST_CASE("sampling_budget hard-errors on absent m_i, listing ids") {
  std::vector<std::pair<std::string, std::optional<int>>> m{
      {"a", 3}, {"b", std::nullopt}, {"c", 5}, {"d", std::nullopt}};
  CHECK_THROWS_WITH_AS(sampling_budget(m, 0.2), doctest::Contains("b, d"), DataError);
}

TEST_CASE("budget coverage meets the 1-beta order-statistic guarantee") {
  // Exchangeable geometric-like first hits: frequency of m_test <= m_hat
  // must be >= 1 - beta within 3 SE.
  Rng rng(71);
  const std::size_t n = 120;
  const int trials = 3000;
  for (double beta : {0.1, 0.25}) {
    int covered = 0;
    for (int t = 0; t < trials; ++t) {
      std::vector<std::pair<std::string, std::optional<int>>> m;
      auto draw = [&] {
        int v = 1;
        while (rng.uniform() > 0.35 && v < 60) ++v;
        return v;
      };
      for (std::size_t i = 0; i < n; ++i) m.emplace_back("r", draw());
      const auto b = sampling_budget(m, beta);
      if (draw() <= b.m_hat) ++covered;
    }
    const double freq = static_cast<double>(covered) / trials;
    const double se = std::sqrt(freq * (1 - freq) / trials);
    CHECK(freq >= 1 - beta - 3 * se);
  }
}
