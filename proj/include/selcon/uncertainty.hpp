#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selcon/data_model.hpp"

namespace selcon {

// Uncertainty notions. Names are stable strings used in CLI flags and reports.
enum class Notion { pe_logit, pe_frequency, semantic_count };

const char* notion_name(Notion n);
Notion notion_from_string(const std::string& s);

// Weights of the logit and frequency confidence scores in the MCQA
// nonconformity score. Must sum to 1.
struct NsWeights {
  double w_l = 0.0;
  double w_f = 1.0;
};

void validate_weights(const NsWeights& w);

// A record reduced to what the conformal machinery needs: uncertainty per
// notion, the nonconformity score of the admissible answer, and per-answer
// scores for prediction-set construction. Answers in the same semantic
// cluster share one NS value, so prediction sets enumerate surface forms
// while coverage is decided at cluster granularity.
struct ScoredSample {
  std::string id;
  std::string domain;
  std::map<Notion, double> uncertainty;
  std::optional<double> ns_truth;
  bool has_admissible = false;
  std::vector<double> per_answer_ns;
  std::vector<int> answer_cluster;     // cluster index per answer
  std::vector<int> answer_count;       // draw count per answer
  std::vector<bool> answer_admissible; // answer covers the ground truth
};

// Shannon entropy sum(-p ln p) with 0 ln 0 := 0. Throws DataError if the
// vector is not a probability distribution (sum within 1e-6 of 1).
double predictive_entropy(const std::vector<double>& probs);

// Empirical answer distribution: MCQA option counts / M, or open-domain
// semantic-cluster frequencies / M.
std::vector<double> frequency_probs(const CandidateRecord& rec);

// Number of distinct semantic clusters among the draws (options with
// count > 0 for MCQA).
double semantic_count(const CandidateRecord& rec);

// NS of each option: 1 - w_l*F_l(o) - w_f*F_f(o).
ScoredSample mcqa_ns(const CandidateRecord& rec, const NsWeights& w);

// Open-domain NS: 1 - 0.5*F(ref) - 0.5*(1/M) sum_j S(ref, y_j) F(y_j), with
// the reference being the admissible candidate of highest count (ties by
// lowest index). Records with no admissible candidate get ns_truth = 1.
ScoredSample open_domain_ns(const CandidateRecord& rec);

// Dispatch on task kind. `w` is ignored for open-domain records.
ScoredSample score_record(const CandidateRecord& rec, const NsWeights& w);

// Fallback clustering key: cluster_id when present, else the normalized text
// (lowercased, trimmed, inner whitespace collapsed, terminal punctuation
// stripped).
std::string normalize_text(const std::string& s);
std::string cluster_key(const Candidate& c);

}  // namespace selcon
