#include "selcon/gate.hpp"

#include <algorithm>
#include <numeric>

#include "selcon/error.hpp"

namespace selcon {

const char* variant_name(Variant v) {
  return v == Variant::baseline ? "baseline" : "pro";
}

Variant variant_from_string(const std::string& s) {
  if (s == "baseline") return Variant::baseline;
  if (s == "pro") return Variant::pro;
  throw DataError("unknown gate variant '" + s + "'");
}

double p_value_baseline(const std::vector<double>& cal_uncertainty, double u_test) {
  if (cal_uncertainty.empty()) throw DataError("p_value: empty calibration list");
  std::size_t count = 0;
  for (double u : cal_uncertainty) {
    if (u >= u_test) ++count;
  }
  return static_cast<double>(1 + count) /
         static_cast<double>(cal_uncertainty.size() + 1);
}

double p_value_pro(const std::vector<double>& cal_uncertainty,
                   const std::vector<bool>& loo_status, double u_test) {
  if (cal_uncertainty.empty()) throw DataError("p_value: empty calibration list");
  if (cal_uncertainty.size() != loo_status.size()) {
    throw DataError("p_value_pro: uncertainty and loo_status lengths differ");
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < cal_uncertainty.size(); ++i) {
    if (cal_uncertainty[i] >= u_test && loo_status[i]) ++count;
  }
  return static_cast<double>(1 + count) /
         static_cast<double>(cal_uncertainty.size() + 1);
}

std::vector<std::size_t> bh_select(const std::vector<double>& p_values, double delta) {
  if (p_values.empty()) throw DataError("bh_select: empty p-value list");
  if (delta <= 0.0 || delta >= 1.0) throw DataError("bh_select: delta must be in (0, 1)");
  const std::size_t b = p_values.size();
  std::vector<std::size_t> order(b);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
    return p_values[a] < p_values[c];
  });
  std::size_t k_star = 0;  // 1-based; 0 = nothing rejected
  for (std::size_t k = 1; k <= b; ++k) {
    if (p_values[order[k - 1]] <= static_cast<double>(k) * delta / b) k_star = k;
  }
  std::vector<std::size_t> rejected;
  if (k_star > 0) {
    const double cutoff = p_values[order[k_star - 1]];
    for (std::size_t i = 0; i < b; ++i) {
      if (p_values[i] <= cutoff) rejected.push_back(i);
    }
  }
  return rejected;
}

NotionValues collect_notion_values(const CalibrationArtifact& cal,
                                   const std::vector<ScoredSample>& samples,
                                   const std::vector<Notion>& notions) {
  NotionValues out;
  for (Notion n : notions) {
    std::vector<double> values;
    values.reserve(cal.source_index.size());
    for (std::size_t idx : cal.source_index) {
      const auto& s = samples[idx];
      auto it = s.uncertainty.find(n);
      if (it == s.uncertainty.end()) {
        throw DataError("notion '" + std::string(notion_name(n)) +
                        "' unavailable for record '" + s.id + "'");
      }
      values.push_back(it->second);
    }
    out.emplace(n, std::move(values));
  }
  return out;
}

GateDecision gate(const CalibrationArtifact& cal, const NotionValues& cal_uncertainty,
                  const ScoredSample& test, const GateConfig& cfg) {
  if (cfg.notions.empty()) throw DataError("gate: no uncertainty notions configured");
  if (cfg.delta <= 0.0 || cfg.delta >= 1.0) throw DataError("gate: delta must be in (0, 1)");
  GateDecision d;
  d.id = test.id;
  std::vector<double> ps;
  ps.reserve(cfg.notions.size());
  for (Notion n : cfg.notions) {
    auto cal_it = cal_uncertainty.find(n);
    if (cal_it == cal_uncertainty.end()) {
      throw DataError("gate: calibration uncertainties missing for notion '" +
                      std::string(notion_name(n)) + "'");
    }
    auto test_it = test.uncertainty.find(n);
    if (test_it == test.uncertainty.end()) {
      throw DataError("notion '" + std::string(notion_name(n)) +
                      "' unavailable for record '" + test.id + "'");
    }
    const double p = cfg.variant == Variant::pro
                         ? p_value_pro(cal_it->second, cal.loo_status, test_it->second)
                         : p_value_baseline(cal_it->second, test_it->second);
    d.p_values[n] = p;
    ps.push_back(p);
  }
  if (cfg.use_bh) {
    const auto rejected = bh_select(ps, cfg.delta);
    d.rejected = !rejected.empty();
    if (d.rejected) {
      d.bh_threshold_used = static_cast<double>(rejected.size()) * cfg.delta /
                            static_cast<double>(ps.size());
    }
  } else {
    d.rejected = std::any_of(ps.begin(), ps.end(),
                             [&](double p) { return p <= cfg.delta; });
  }
  if (!d.rejected) d.prediction_set = prediction_set(test, cal.q_hat);
  return d;
}

}  // namespace selcon
