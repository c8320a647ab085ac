#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "selcon/error.hpp"
#include "selcon/metrics.hpp"
#include "selcon/report.hpp"
#include "selcon/risk.hpp"

namespace {

using namespace selcon;

constexpr int kExitData = 2;
constexpr int kExitRisk = 3;

// "logit:<w_l>,freq:<w_f>"
NsWeights parse_weights(const std::string& s) {
  NsWeights w;
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw DataError("bad --weights '" + s + "'");
  auto parse_part = [&](const std::string& part, const std::string& key) {
    if (part.rfind(key + ":", 0) != 0) {
      throw DataError("bad --weights component '" + part + "', expected '" + key + ":<w>'");
    }
    return std::stod(part.substr(key.size() + 1));
  };
  w.w_l = parse_part(s.substr(0, comma), "logit");
  w.w_f = parse_part(s.substr(comma + 1), "freq");
  validate_weights(w);
  return w;
}

std::vector<Notion> parse_notions(const std::vector<std::string>& names) {
  std::vector<Notion> out;
  for (const auto& n : names) out.push_back(notion_from_string(n));
  return out;
}

void write_or_print(const std::optional<std::string>& path, const std::string& text) {
  if (path) {
    std::ofstream out(*path);
    if (!out) throw DataError("cannot write '" + *path + "'");
    out << text;
  } else {
    std::cout << text;
  }
}

struct CommonData {
  std::string path;
  std::string kind = "mcqa";
};

int run(int argc, char** argv) {
  CLI::App app{"Selective split-conformal calibration and evaluation for QA score data"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic MCQA dataset");
  std::string synth_out;
  SynthSpec spec;
  synth->add_option("--out", synth_out, "Output JSONL path")->required();
  synth->add_option("--n", spec.n_records, "Number of records")->required();
  synth->add_option("--options", spec.option_count, "Options per question");
  synth->add_option("--difficulty", spec.difficulty, "True-answer mass in [0,1]");
  synth->add_option("--shift", spec.shift, "Distribution shift of the second half");
  synth->add_option("--seed", spec.seed, "RNG seed");

  // min-risk
  auto* minrisk = app.add_subcommand("min-risk", "Minimum manageable risk level of a calibration file");
  CommonData mr;
  std::string mr_weights = "logit:0,freq:1";
  std::optional<std::string> mr_out;
  minrisk->add_option("--cal", mr.path, "Calibration JSONL")->required();
  minrisk->add_option("--kind", mr.kind, "mcqa|open_domain");
  minrisk->add_option("--weights", mr_weights, "NS weights 'logit:<w_l>,freq:<w_f>'");
  minrisk->add_option("--out", mr_out, "Write JSON here instead of stdout");

  // sample-size
  auto* samplesize = app.add_subcommand("sample-size", "Calibrated sampling budget for a target error rate");
  CommonData ss;
  double ss_beta = 0.1;
  std::optional<std::string> ss_out;
  samplesize->add_option("--cal", ss.path, "Calibration JSONL")->required();
  samplesize->add_option("--kind", ss.kind, "mcqa|open_domain");
  samplesize->add_option("--beta", ss_beta, "Error rate in (0,1)")->required();
  samplesize->add_option("--out", ss_out, "Write JSON here instead of stdout");

  // predict
  auto* predict = app.add_subcommand("predict", "Gate test records and emit prediction sets");
  std::string pr_cal, pr_test;
  std::string pr_kind = "mcqa";
  double pr_alpha = 0.1;
  std::optional<double> pr_delta;
  std::string pr_weights = "logit:0,freq:1";
  std::string pr_variant = "baseline";
  std::vector<std::string> pr_notions = {"pe_frequency"};
  bool pr_force = false;
  std::optional<std::string> pr_out;
  predict->add_option("--cal", pr_cal, "Calibration JSONL")->required();
  predict->add_option("--test", pr_test, "Test JSONL")->required();
  predict->add_option("--kind", pr_kind, "mcqa|open_domain");
  predict->add_option("--alpha", pr_alpha, "Risk level")->required();
  predict->add_option("--delta", pr_delta, "Gate significance level (default: alpha)");
  predict->add_option("--weights", pr_weights, "NS weights 'logit:<w_l>,freq:<w_f>'");
  predict->add_option("--variant", pr_variant, "baseline|pro");
  predict->add_option("--notions", pr_notions, "Uncertainty notions")->delimiter(',');
  predict->add_flag("--force", pr_force, "Proceed below the minimum risk level");
  predict->add_option("--out", pr_out, "Write JSONL here instead of stdout");

  // eval
  auto* eval = app.add_subcommand("eval", "Repeated random-split evaluation harness");
  std::string ev_data;
  std::string ev_kind = "mcqa";
  double ev_alpha = 0.1;
  std::optional<double> ev_delta;
  std::string ev_weights = "logit:0,freq:1";
  std::string ev_gate = "off";
  std::vector<std::string> ev_notions = {"pe_frequency"};
  double ev_ratio = 0.5;
  int ev_trials = 100;
  std::uint64_t ev_seed = 0;
  std::optional<std::string> ev_cal_domain;
  bool ev_force = false;
  std::optional<std::string> ev_out_json, ev_out_csv;
  eval->add_option("--data", ev_data, "Dataset JSONL")->required();
  eval->add_option("--kind", ev_kind, "mcqa|open_domain");
  eval->add_option("--alpha", ev_alpha, "Risk level")->required();
  eval->add_option("--delta", ev_delta, "Gate significance level (default: alpha)");
  eval->add_option("--weights", ev_weights, "NS weights 'logit:<w_l>,freq:<w_f>'");
  eval->add_option("--gate", ev_gate, "off|baseline|pro");
  eval->add_option("--notions", ev_notions, "Uncertainty notions")->delimiter(',');
  eval->add_option("--split-ratio", ev_ratio, "Calibration fraction");
  eval->add_option("--trials", ev_trials, "Number of random splits");
  eval->add_option("--seed", ev_seed, "Base seed; trial t uses seed+t");
  eval->add_option("--cal-domain", ev_cal_domain, "Restrict calibration records to one domain");
  eval->add_flag("--force", ev_force, "Proceed below the minimum risk level");
  eval->add_option("--out-json", ev_out_json, "Write the JSON report here");
  eval->add_option("--out-csv", ev_out_csv, "Write the per-trial CSV here");

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    write_jsonl(synth_generate(spec), synth_out);
    return 0;
  }

  if (minrisk->parsed()) {
    const Dataset ds = ingest(mr.path, task_kind_from_string(mr.kind));
    if (ds.records.empty()) throw DataError("'" + mr.path + "' contains no records");
    const NsWeights w = parse_weights(mr_weights);
    std::vector<ScoredSample> scored;
    for (const auto& rec : ds.records) scored.push_back(score_record(rec, w));
    write_or_print(mr_out, risk_profile_to_json(min_risk_level(scored)) + "\n");
    return 0;
  }

  if (samplesize->parsed()) {
    const Dataset ds = ingest(ss.path, task_kind_from_string(ss.kind));
    if (ds.records.empty()) throw DataError("'" + ss.path + "' contains no records");
    const SamplingBudget b = sampling_budget(minimum_sampling_sizes(ds), ss_beta);
    write_or_print(ss_out, sampling_budget_to_json(b) + "\n");
    return 0;
  }

  if (predict->parsed()) {
    const TaskKind kind = task_kind_from_string(pr_kind);
    const NsWeights w = parse_weights(pr_weights);
    const Dataset cal_ds = ingest(pr_cal, kind);
    const Dataset test_ds = ingest(pr_test, kind);
    if (cal_ds.records.empty()) throw DataError("'" + pr_cal + "' contains no records");
    if (test_ds.records.empty()) throw DataError("'" + pr_test + "' contains no records");

    std::vector<ScoredSample> cal_scored;
    for (const auto& rec : cal_ds.records) cal_scored.push_back(score_record(rec, w));
    if (!pr_force && risk_check_applies(kind, w)) {
      const RiskProfile profile = min_risk_level(cal_scored);
      if (check_alpha(pr_alpha, profile) == AlphaCheck::below_minimum) {
        std::ostringstream os;
        os << "alpha " << pr_alpha << " is below the minimum risk level "
           << profile.alpha_min << " certified by '" << pr_cal
           << "'; pass --force to proceed anyway";
        throw RiskError(os.str());
      }
    }
    const CalibrationArtifact art = calibrate(cal_scored, pr_alpha);
    GateConfig gcfg;
    gcfg.variant = variant_from_string(pr_variant);
    gcfg.delta = pr_delta.value_or(pr_alpha);
    gcfg.notions = parse_notions(pr_notions);
    gcfg.use_bh = gcfg.notions.size() > 1;
    const NotionValues cal_u = collect_notion_values(art, cal_scored, gcfg.notions);

    std::ostringstream out;
    std::size_t abstained = 0;
    for (const auto& rec : test_ds.records) {
      const GateDecision d = gate(art, cal_u, score_record(rec, w), gcfg);
      if (d.rejected) ++abstained;
      out << gate_decision_to_json(d) << '\n';
    }
    nlohmann::ordered_json footer;
    footer["summary"] = {
        {"n_test", test_ds.records.size()},
        {"abstention_rate", static_cast<double>(abstained) /
                                static_cast<double>(test_ds.records.size())}};
    out << footer.dump() << '\n';
    write_or_print(pr_out, out.str());
    return 0;
  }

  // eval
  const TaskKind kind = task_kind_from_string(ev_kind);
  const Dataset ds = ingest(ev_data, kind);
  SplitConfig cfg;
  cfg.split_ratio = ev_ratio;
  cfg.trials = ev_trials;
  cfg.base_seed = ev_seed;
  cfg.alpha = ev_alpha;
  cfg.calibration_domain = ev_cal_domain;
  cfg.force = ev_force;
  if (ev_gate != "off") {
    GateConfig gcfg;
    gcfg.variant = variant_from_string(ev_gate);
    gcfg.delta = ev_delta.value_or(ev_alpha);
    gcfg.notions = parse_notions(ev_notions);
    gcfg.use_bh = gcfg.notions.size() > 1;
    cfg.gate = gcfg;
  }
  const AggregateReport report = run_trials(ds, cfg, parse_weights(ev_weights));
  const std::string json = aggregate_report_to_json(report) + "\n";
  if (ev_out_json) {
    write_or_print(ev_out_json, json);
  }
  if (ev_out_csv) {
    write_or_print(ev_out_csv, aggregate_report_to_csv(report));
  }
  if (!ev_out_json && !ev_out_csv) std::cout << json;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const selcon::RiskError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRisk;
  } catch (const selcon::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
}
