#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace selcon {

enum class TaskKind { mcqa, open_domain };

const char* task_kind_name(TaskKind k);
TaskKind task_kind_from_string(const std::string& s);

// One sampled answer (open-domain) or one option's sampling summary (MCQA).
struct Candidate {
  std::string text;
  int count = 0;
  bool admissible = false;
  std::optional<std::string> cluster_id;
  std::optional<double> similarity_to_ref;

  bool operator==(const Candidate&) const = default;
};

// One QA sample with its precomputed candidate set.
//
// MCQA: `sample_counts` holds the per-option draw counts over M samples and
// `ground_truth` indexes the correct option; `candidates` may be empty.
// Open-domain: `candidates` are the M draws themselves (count 1 each) and
// admissibility lives on them; `ground_truth` is absent.
struct CandidateRecord {
  std::string id;
  std::string domain;
  TaskKind task_kind = TaskKind::mcqa;
  std::vector<Candidate> candidates;
  std::optional<int> ground_truth;
  std::vector<int> sample_counts;
  std::optional<std::vector<double>> logit_probs;
  std::optional<int> first_hit_index;  // 1-based; absent if no draw is admissible

  bool operator==(const CandidateRecord&) const = default;

  // Total number of draws M.
  int total_draws() const;
};

struct Dataset {
  std::vector<CandidateRecord> records;
  int schema_version = 1;
};

// Synthetic MCQA generator spec. `difficulty` in [0,1] is the mass placed on
// the true option on top of a Dirichlet-like base (1 = exact one-hot);
// `shift` > 0 temperature-flattens the option probabilities of the second
// half of the records, which are tagged domain "shifted".
struct SynthSpec {
  int n_records = 1;
  int option_count = 4;
  double difficulty = 0.5;
  double shift = 0.0;
  std::uint64_t seed = 0;
};

// Reads a JSONL file (one record per line) and validates every schema
// invariant. Throws DataError naming the line or record id on violation.
Dataset ingest(const std::filesystem::path& path, TaskKind kind);

// Inverse of ingest: one JSON object per line, absent optionals omitted.
void write_jsonl(const Dataset& ds, const std::filesystem::path& path);
std::string record_to_jsonl_line(const CandidateRecord& rec, int schema_version);

Dataset synth_generate(const SynthSpec& spec);

// Per record: first_hit_index when present, absent otherwise. Order-preserving.
std::vector<std::pair<std::string, std::optional<int>>> minimum_sampling_sizes(
    const Dataset& ds);

}  // namespace selcon
