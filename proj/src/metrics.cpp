#include "selcon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "selcon/error.hpp"
#include "selcon/risk.hpp"
#include "selcon/rng.hpp"

namespace selcon {

std::optional<double> emr(const std::vector<bool>& covered) {
  if (covered.empty()) return std::nullopt;
  const auto missed = std::count(covered.begin(), covered.end(), false);
  return static_cast<double>(missed) / static_cast<double>(covered.size());
}

std::pair<std::map<std::size_t, StratumStats>, double> ssm(
    const std::vector<std::pair<std::size_t, bool>>& size_and_covered) {
  if (size_and_covered.empty()) throw DataError("ssm: empty input");
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> raw;  // size -> (n, missed)
  for (const auto& [size, covered] : size_and_covered) {
    auto& [n, missed] = raw[size];
    ++n;
    if (!covered) ++missed;
  }
  std::map<std::size_t, StratumStats> strata;
  double worst = 0.0;
  for (const auto& [size, nm] : raw) {
    StratumStats st;
    st.count = nm.first;
    st.miscoverage = static_cast<double>(nm.second) / static_cast<double>(nm.first);
    worst = std::max(worst, st.miscoverage);
    strata.emplace(size, st);
  }
  return {std::move(strata), worst};
}

double apss(const std::vector<std::size_t>& sizes) {
  if (sizes.empty()) throw DataError("apss: empty input");
  const auto total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  return static_cast<double>(total) / static_cast<double>(sizes.size());
}

std::vector<std::size_t> semantic_dedup(const ScoredSample& sample,
                                        const std::vector<std::size_t>& pred_set) {
  std::map<int, std::size_t> representative;  // cluster -> chosen member
  auto better = [&](std::size_t cand, std::size_t incumbent) {
    const bool cand_adm = sample.answer_admissible[cand];
    const bool inc_adm = sample.answer_admissible[incumbent];
    if (cand_adm != inc_adm) return cand_adm;
    if (sample.answer_count[cand] != sample.answer_count[incumbent]) {
      return sample.answer_count[cand] > sample.answer_count[incumbent];
    }
    return cand < incumbent;
  };
  for (std::size_t i : pred_set) {
    const int c = sample.answer_cluster[i];
    auto it = representative.find(c);
    if (it == representative.end()) {
      representative.emplace(c, i);
    } else if (better(i, it->second)) {
      it->second = i;
    }
  }
  std::vector<std::size_t> out;
  out.reserve(representative.size());
  for (const auto& [c, i] : representative) out.push_back(i);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct Split {
  std::vector<std::size_t> cal;
  std::vector<std::size_t> test;
};

Split make_split(const Dataset& ds, const SplitConfig& cfg, Rng& rng) {
  const std::size_t n = ds.records.size();
  const auto n_cal = static_cast<std::size_t>(
      std::llround(cfg.split_ratio * static_cast<double>(n)));
  if (n_cal < 1 || n_cal >= n) {
    std::ostringstream os;
    os << "degenerate split: " << n_cal << " calibration of " << n << " records";
    throw DataError(os.str());
  }
  Split sp;
  if (cfg.calibration_domain) {
    std::vector<std::size_t> pool, rest;
    for (std::size_t i = 0; i < n; ++i) {
      (ds.records[i].domain == *cfg.calibration_domain ? pool : rest).push_back(i);
    }
    if (pool.size() < n_cal) {
      throw DataError("calibration domain '" + *cfg.calibration_domain +
                      "' has only " + std::to_string(pool.size()) +
                      " records, need " + std::to_string(n_cal));
    }
    rng.shuffle(pool);
    sp.cal.assign(pool.begin(), pool.begin() + n_cal);
    sp.test.assign(pool.begin() + n_cal, pool.end());
    sp.test.insert(sp.test.end(), rest.begin(), rest.end());
  } else {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng.shuffle(idx);
    sp.cal.assign(idx.begin(), idx.begin() + n_cal);
    sp.test.assign(idx.begin() + n_cal, idx.end());
  }
  return sp;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

AggregateReport run_trials(const Dataset& ds, const SplitConfig& cfg,
                           const NsWeights& w) {
  if (ds.records.empty()) throw DataError("run_trials: empty dataset");
  if (cfg.trials < 1) throw DataError("run_trials: trials must be >= 1");
  validate_weights(w);

  std::vector<ScoredSample> scored;
  scored.reserve(ds.records.size());
  for (const auto& rec : ds.records) scored.push_back(score_record(rec, w));

  if (!cfg.force && risk_check_applies(ds.records.front().task_kind, w)) {
    const RiskProfile profile = min_risk_level(scored);
    if (check_alpha(cfg.alpha, profile) == AlphaCheck::below_minimum) {
      std::ostringstream os;
      os << "alpha " << cfg.alpha << " is below the minimum risk level "
         << profile.alpha_min << " certified by the dataset";
      throw RiskError(os.str());
    }
  }

  AggregateReport agg;
  agg.trials.reserve(cfg.trials);
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng(cfg.base_seed + static_cast<std::uint64_t>(t));
    const Split sp = make_split(ds, cfg, rng);

    std::vector<ScoredSample> cal_samples;
    cal_samples.reserve(sp.cal.size());
    for (std::size_t i : sp.cal) cal_samples.push_back(scored[i]);
    const CalibrationArtifact art = calibrate(cal_samples, cfg.alpha);
    NotionValues cal_u;
    if (cfg.gate) {
      cal_u = collect_notion_values(art, cal_samples, cfg.gate->notions);
    }

    TrialReport tr;
    tr.trial_index = t;
    std::vector<bool> covered;
    std::vector<std::pair<std::size_t, bool>> size_and_covered;
    std::vector<std::size_t> sizes, dedup_sizes;
    std::size_t abstained = 0;
    for (std::size_t i : sp.test) {
      const ScoredSample& s = scored[i];
      std::vector<std::size_t> set;
      if (cfg.gate) {
        const GateDecision d = gate(art, cal_u, s, *cfg.gate);
        if (d.rejected) {
          ++abstained;
          continue;
        }
        set = *d.prediction_set;
      } else {
        set = prediction_set(s, art.q_hat);
      }
      const bool cov = covers(s, art.q_hat);
      covered.push_back(cov);
      size_and_covered.emplace_back(set.size(), cov);
      sizes.push_back(set.size());
      dedup_sizes.push_back(semantic_dedup(s, set).size());
    }
    tr.abstention_rate =
        static_cast<double>(abstained) / static_cast<double>(sp.test.size());
    if (!covered.empty()) {
      tr.emr = emr(covered);
      auto [strata, worst] = ssm(size_and_covered);
      tr.strata = std::move(strata);
      tr.ssm = worst;
      tr.apss = apss(sizes);
      tr.apss_dedup = apss(dedup_sizes);
    }
    agg.trials.push_back(std::move(tr));
  }

  std::vector<double> emrs, ssms, apsss, dedups, abst;
  for (const auto& tr : agg.trials) {
    abst.push_back(tr.abstention_rate);
    if (tr.emr) {
      emrs.push_back(*tr.emr);
      ssms.push_back(*tr.ssm);
      apsss.push_back(*tr.apss);
      dedups.push_back(*tr.apss_dedup);
    }
  }
  agg.abstention_mean = mean_of(abst);
  if (!emrs.empty()) {
    agg.emr_mean = mean_of(emrs);
    agg.emr_std = sample_std(emrs, *agg.emr_mean);
    agg.emr_median = median_of(emrs);
    agg.ssm_mean = mean_of(ssms);
    agg.apss_mean = mean_of(apsss);
    agg.apss_dedup_mean = mean_of(dedups);
  }
  return agg;
}

}  // namespace selcon
