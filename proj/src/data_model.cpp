#include "selcon/data_model.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "selcon/error.hpp"
#include "selcon/rng.hpp"

namespace selcon {

using ordered_json = nlohmann::ordered_json;

const char* task_kind_name(TaskKind k) {
  return k == TaskKind::mcqa ? "mcqa" : "open_domain";
}

TaskKind task_kind_from_string(const std::string& s) {
  if (s == "mcqa") return TaskKind::mcqa;
  if (s == "open_domain") return TaskKind::open_domain;
  throw DataError("unknown task_kind '" + s + "'");
}

int CandidateRecord::total_draws() const {
  if (task_kind == TaskKind::mcqa) {
    return std::accumulate(sample_counts.begin(), sample_counts.end(), 0);
  }
  int m = 0;
  for (const auto& c : candidates) m += c.count;
  return m;
}

namespace {

void validate_record(const CandidateRecord& rec) {
  const std::string where = "record '" + rec.id + "': ";
  if (rec.id.empty()) throw DataError("record with empty id");
  if (rec.task_kind == TaskKind::mcqa) {
    const int k = static_cast<int>(rec.sample_counts.size());
    if (k < 2 || k > 26) throw DataError(where + "option count must be in [2, 26]");
    if (!rec.ground_truth || *rec.ground_truth < 0 || *rec.ground_truth >= k) {
      throw DataError(where + "ground_truth missing or out of range");
    }
    int m = 0;
    for (int c : rec.sample_counts) {
      if (c < 0) throw DataError(where + "negative sample count");
      m += c;
    }
    if (m <= 0) throw DataError(where + "sum(sample_counts) must be positive");
    if (rec.logit_probs) {
      if (static_cast<int>(rec.logit_probs->size()) != k) {
        throw DataError(where + "logit_probs length differs from option count");
      }
      double sum = 0.0;
      for (double p : *rec.logit_probs) {
        if (p < 0.0 || p > 1.0) throw DataError(where + "logit_probs entry outside [0,1]");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-6) {
        std::ostringstream os;
        os << where << "logit_probs sum to " << sum << ", expected 1";
        throw DataError(os.str());
      }
    }
    if (!rec.candidates.empty() &&
        static_cast<int>(rec.candidates.size()) != k) {
      throw DataError(where + "candidates length differs from option count");
    }
  } else {
    if (rec.candidates.empty()) throw DataError(where + "open_domain record without candidates");
    if (rec.ground_truth) throw DataError(where + "open_domain record with ground_truth");
    for (const auto& c : rec.candidates) {
      if (c.count < 0) throw DataError(where + "negative candidate count");
      if (c.similarity_to_ref &&
          (*c.similarity_to_ref < 0.0 || *c.similarity_to_ref > 1.0)) {
        throw DataError(where + "similarity_to_ref outside [0,1]");
      }
    }
    if (rec.total_draws() <= 0) throw DataError(where + "candidate counts sum to zero");
  }
  if (rec.first_hit_index) {
    if (*rec.first_hit_index < 1 || *rec.first_hit_index > rec.total_draws()) {
      throw DataError(where + "first_hit_index outside [1, total draws]");
    }
  }
}

Candidate candidate_from_json(const nlohmann::json& j, const std::string& where) {
  Candidate c;
  if (!j.contains("text")) throw DataError(where + "candidate without text");
  c.text = j.at("text").get<std::string>();
  c.count = j.value("count", 1);
  c.admissible = j.value("admissible", false);
  if (j.contains("cluster_id")) c.cluster_id = j.at("cluster_id").get<std::string>();
  if (j.contains("similarity_to_ref")) {
    c.similarity_to_ref = j.at("similarity_to_ref").get<double>();
  }
  return c;
}

CandidateRecord record_from_json(const nlohmann::json& j, TaskKind kind,
                                 const std::string& where) {
  CandidateRecord rec;
  rec.task_kind = kind;
  if (!j.contains("id")) throw DataError(where + "missing field 'id'");
  rec.id = j.at("id").get<std::string>();
  rec.domain = j.value("domain", "");
  if (j.contains("task_kind")) {
    rec.task_kind = task_kind_from_string(j.at("task_kind").get<std::string>());
    if (rec.task_kind != kind) {
      throw DataError(where + "task_kind does not match the declared dataset kind");
    }
  }
  if (j.contains("candidates")) {
    for (const auto& cj : j.at("candidates")) {
      rec.candidates.push_back(candidate_from_json(cj, where));
    }
  }
  if (j.contains("ground_truth")) rec.ground_truth = j.at("ground_truth").get<int>();
  if (j.contains("sample_counts")) {
    rec.sample_counts = j.at("sample_counts").get<std::vector<int>>();
  }
  if (j.contains("logit_probs")) {
    rec.logit_probs = j.at("logit_probs").get<std::vector<double>>();
  }
  if (j.contains("first_hit_index")) {
    rec.first_hit_index = j.at("first_hit_index").get<int>();
  }
  return rec;
}

ordered_json record_to_json(const CandidateRecord& rec, int schema_version) {
  ordered_json j;
  j["schema_version"] = schema_version;
  j["id"] = rec.id;
  j["domain"] = rec.domain;
  j["task_kind"] = task_kind_name(rec.task_kind);
  if (!rec.candidates.empty()) {
    ordered_json arr = ordered_json::array();
    for (const auto& c : rec.candidates) {
      ordered_json cj;
      cj["text"] = c.text;
      cj["count"] = c.count;
      cj["admissible"] = c.admissible;
      if (c.cluster_id) cj["cluster_id"] = *c.cluster_id;
      if (c.similarity_to_ref) cj["similarity_to_ref"] = *c.similarity_to_ref;
      arr.push_back(std::move(cj));
    }
    j["candidates"] = std::move(arr);
  }
  if (rec.ground_truth) j["ground_truth"] = *rec.ground_truth;
  if (!rec.sample_counts.empty()) j["sample_counts"] = rec.sample_counts;
  if (rec.logit_probs) j["logit_probs"] = *rec.logit_probs;
  if (rec.first_hit_index) j["first_hit_index"] = *rec.first_hit_index;
  return j;
}

}  // namespace

std::string record_to_jsonl_line(const CandidateRecord& rec, int schema_version) {
  return record_to_json(rec, schema_version).dump();
}

Dataset ingest(const std::filesystem::path& path, TaskKind kind) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  Dataset ds;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  int with_logits = 0;
  int without_logits = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.filename().string() + " line " +
                              std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + e.what());
    }
    CandidateRecord rec;
    try {
      rec = record_from_json(j, kind, where);
      validate_record(rec);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + e.what());
    }
    if (j.contains("schema_version")) {
      const int v = j.at("schema_version").get<int>();
      if (ds.records.empty()) {
        ds.schema_version = v;
      } else if (v != ds.schema_version) {
        throw DataError(where + "inconsistent schema_version");
      }
    }
    if (!seen_ids.insert(rec.id).second) {
      throw DataError(where + "duplicate id '" + rec.id + "'");
    }
    if (rec.task_kind == TaskKind::mcqa) {
      (rec.logit_probs ? with_logits : without_logits) += 1;
    }
    ds.records.push_back(std::move(rec));
  }
  if (with_logits > 0 && without_logits > 0) {
    throw DataError(path.filename().string() +
                    ": mixed logit_probs availability (" +
                    std::to_string(with_logits) + " records with, " +
                    std::to_string(without_logits) + " without)");
  }
  return ds;
}

void write_jsonl(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  for (const auto& rec : ds.records) {
    out << record_to_jsonl_line(rec, ds.schema_version) << '\n';
  }
}

Dataset synth_generate(const SynthSpec& spec) {
  if (spec.n_records < 1) throw DataError("synth: n_records must be >= 1");
  if (spec.option_count < 2 || spec.option_count > 26) {
    throw DataError("synth: option_count must be in [2, 26]");
  }
  if (spec.difficulty < 0.0 || spec.difficulty > 1.0) {
    throw DataError("synth: difficulty must be in [0, 1]");
  }
  if (spec.shift < 0.0) throw DataError("synth: shift must be >= 0");

  constexpr int kDraws = 20;
  Rng rng(spec.seed);
  Dataset ds;
  ds.records.reserve(spec.n_records);
  const int k = spec.option_count;
  const int first_shifted = (spec.n_records + 1) / 2;  // second half is shifted
  for (int i = 0; i < spec.n_records; ++i) {
    const bool shifted = spec.shift > 0.0 && i >= first_shifted;
    CandidateRecord rec;
    rec.id = "synth-" + std::to_string(i);
    rec.domain = shifted ? "shifted" : "base";
    rec.task_kind = TaskKind::mcqa;
    const int truth = static_cast<int>(rng.below(static_cast<std::size_t>(k)));
    rec.ground_truth = truth;

    // Dirichlet(1) base mixed with a one-hot at the true option.
    std::vector<double> probs(k);
    double sum = 0.0;
    for (double& p : probs) {
      p = rng.exponential();
      sum += p;
    }
    for (double& p : probs) p = (1.0 - spec.difficulty) * (p / sum);
    probs[truth] += spec.difficulty;

    if (shifted) {
      // Temperature flattening: p^(1/(1+shift)), renormalized.
      const double inv_t = 1.0 / (1.0 + spec.shift);
      double s = 0.0;
      for (double& p : probs) {
        p = p > 0.0 ? std::pow(p, inv_t) : 0.0;
        s += p;
      }
      for (double& p : probs) p /= s;
    }
    rec.logit_probs = probs;

    rec.sample_counts.assign(k, 0);
    for (int d = 0; d < kDraws; ++d) {
      const double u = rng.uniform();
      double acc = 0.0;
      int pick = k - 1;
      for (int o = 0; o < k; ++o) {
        acc += probs[o];
        if (u < acc) {
          pick = o;
          break;
        }
      }
      rec.sample_counts[pick] += 1;
      if (pick == truth && !rec.first_hit_index) rec.first_hit_index = d + 1;
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

std::vector<std::pair<std::string, std::optional<int>>> minimum_sampling_sizes(
    const Dataset& ds) {
  std::vector<std::pair<std::string, std::optional<int>>> out;
  out.reserve(ds.records.size());
  for (const auto& rec : ds.records) {
    out.emplace_back(rec.id, rec.first_hit_index);
  }
  return out;
}

}  // namespace selcon
