#include "selcon/uncertainty.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "selcon/error.hpp"

namespace selcon {

const char* notion_name(Notion n) {
  switch (n) {
    case Notion::pe_logit: return "pe_logit";
    case Notion::pe_frequency: return "pe_frequency";
    case Notion::semantic_count: return "semantic_count";
  }
  return "?";
}

Notion notion_from_string(const std::string& s) {
  if (s == "pe_logit") return Notion::pe_logit;
  if (s == "pe_frequency") return Notion::pe_frequency;
  if (s == "semantic_count") return Notion::semantic_count;
  throw DataError("unknown uncertainty notion '" + s + "'");
}

void validate_weights(const NsWeights& w) {
  if (w.w_l < 0.0 || w.w_l > 1.0 || w.w_f < 0.0 || w.w_f > 1.0 ||
      std::abs(w.w_l + w.w_f - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "invalid NS weights (w_l=" << w.w_l << ", w_f=" << w.w_f
       << "): both must be in [0,1] and sum to 1";
    throw DataError(os.str());
  }
}

double predictive_entropy(const std::vector<double>& probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0 || p > 1.0 + 1e-9) throw DataError("predictive_entropy: entry outside [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw DataError("predictive_entropy: probabilities sum to " + std::to_string(sum));
  }
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h < 0.0 ? 0.0 : h;
}

std::string normalize_text(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char ch : s) {
    if (std::isspace(ch)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(ch)));
  }
  while (!out.empty()) {
    const char back = out.back();
    if (back == '.' || back == '!' || back == '?' || back == ',' ||
        back == ';' || back == ':') {
      out.pop_back();
    } else {
      break;
    }
  }
  return out;
}

std::string cluster_key(const Candidate& c) {
  return c.cluster_id ? *c.cluster_id : normalize_text(c.text);
}

namespace {

// Cluster assignment in first-appearance order.
std::vector<int> assign_clusters(const std::vector<Candidate>& candidates,
                                 int* n_clusters) {
  std::vector<int> cluster(candidates.size());
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const std::string key = cluster_key(candidates[i]);
    auto [it, inserted] = index.try_emplace(key, static_cast<int>(index.size()));
    cluster[i] = it->second;
  }
  *n_clusters = static_cast<int>(index.size());
  return cluster;
}

}  // namespace

std::vector<double> frequency_probs(const CandidateRecord& rec) {
  const int m = rec.total_draws();
  if (m <= 0) throw DataError("frequency_probs: record '" + rec.id + "' has no draws");
  std::vector<double> probs;
  if (rec.task_kind == TaskKind::mcqa) {
    probs.reserve(rec.sample_counts.size());
    for (int c : rec.sample_counts) probs.push_back(static_cast<double>(c) / m);
  } else {
    int n_clusters = 0;
    const std::vector<int> cluster = assign_clusters(rec.candidates, &n_clusters);
    probs.assign(n_clusters, 0.0);
    for (std::size_t i = 0; i < rec.candidates.size(); ++i) {
      probs[cluster[i]] += static_cast<double>(rec.candidates[i].count) / m;
    }
  }
  return probs;
}

double semantic_count(const CandidateRecord& rec) {
  if (rec.task_kind == TaskKind::mcqa) {
    return static_cast<double>(
        std::count_if(rec.sample_counts.begin(), rec.sample_counts.end(),
                      [](int c) { return c > 0; }));
  }
  int n_clusters = 0;
  const std::vector<int> cluster = assign_clusters(rec.candidates, &n_clusters);
  std::vector<int> cluster_count(n_clusters, 0);
  for (std::size_t i = 0; i < rec.candidates.size(); ++i) {
    cluster_count[cluster[i]] += rec.candidates[i].count;
  }
  return static_cast<double>(
      std::count_if(cluster_count.begin(), cluster_count.end(),
                    [](int c) { return c > 0; }));
}

ScoredSample mcqa_ns(const CandidateRecord& rec, const NsWeights& w) {
  validate_weights(w);
  if (rec.task_kind != TaskKind::mcqa) {
    throw DataError("mcqa_ns: record '" + rec.id + "' is not mcqa");
  }
  if (w.w_l > 0.0 && !rec.logit_probs) {
    throw DataError("record '" + rec.id + "': w_l > 0 but logit_probs absent");
  }
  const int m = rec.total_draws();
  const int k = static_cast<int>(rec.sample_counts.size());
  const int truth = *rec.ground_truth;

  ScoredSample s;
  s.id = rec.id;
  s.domain = rec.domain;
  s.per_answer_ns.resize(k);
  s.answer_cluster.resize(k);
  s.answer_count = rec.sample_counts;
  s.answer_admissible.assign(k, false);
  s.has_admissible = w.w_f > 0.0 ? rec.sample_counts[truth] > 0 : true;
  s.answer_admissible[truth] = s.has_admissible;
  for (int o = 0; o < k; ++o) {
    const double f_l = rec.logit_probs ? (*rec.logit_probs)[o] : 0.0;
    const double f_f = static_cast<double>(rec.sample_counts[o]) / m;
    double ns = 1.0 - w.w_l * f_l - w.w_f * f_f;
    s.per_answer_ns[o] = std::clamp(ns, 0.0, 1.0);
    s.answer_cluster[o] = o;
  }
  s.ns_truth = s.per_answer_ns[truth];
  if (rec.logit_probs) {
    s.uncertainty[Notion::pe_logit] = predictive_entropy(*rec.logit_probs);
  }
  s.uncertainty[Notion::pe_frequency] = predictive_entropy(frequency_probs(rec));
  s.uncertainty[Notion::semantic_count] = semantic_count(rec);
  return s;
}

ScoredSample open_domain_ns(const CandidateRecord& rec) {
  if (rec.task_kind != TaskKind::open_domain) {
    throw DataError("open_domain_ns: record '" + rec.id + "' is not open_domain");
  }
  const int m = rec.total_draws();
  const std::size_t n = rec.candidates.size();
  int n_clusters = 0;
  const std::vector<int> cluster = assign_clusters(rec.candidates, &n_clusters);
  std::vector<double> cluster_freq(n_clusters, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cluster_freq[cluster[i]] += static_cast<double>(rec.candidates[i].count) / m;
  }

  // Reference: admissible candidate with the highest count, ties by lowest index.
  std::optional<std::size_t> ref;
  for (std::size_t i = 0; i < n; ++i) {
    if (rec.candidates[i].admissible &&
        (!ref || rec.candidates[i].count > rec.candidates[*ref].count)) {
      ref = i;
    }
  }

  const bool have_similarity =
      std::all_of(rec.candidates.begin(), rec.candidates.end(),
                  [](const Candidate& c) { return c.similarity_to_ref.has_value(); });

  // NS with cluster `c` as reference; similarity falls back to the same-cluster
  // indicator unless explicit similarities apply (truth reference only).
  auto cluster_ns = [&](int c, bool use_similarity) {
    double cross = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double sim = use_similarity ? *rec.candidates[j].similarity_to_ref
                                        : (cluster[j] == c ? 1.0 : 0.0);
      cross += rec.candidates[j].count * sim * cluster_freq[cluster[j]];
    }
    const double ns = 1.0 - 0.5 * cluster_freq[c] - 0.5 * cross / m;
    return std::clamp(ns, 0.0, 1.0);
  };

  ScoredSample s;
  s.id = rec.id;
  s.domain = rec.domain;
  s.has_admissible = ref.has_value();
  s.per_answer_ns.resize(n);
  s.answer_cluster = cluster;
  s.answer_count.resize(n);
  s.answer_admissible.resize(n);
  std::vector<double> ns_of_cluster(n_clusters);
  for (int c = 0; c < n_clusters; ++c) ns_of_cluster[c] = cluster_ns(c, false);
  for (std::size_t i = 0; i < n; ++i) {
    s.per_answer_ns[i] = ns_of_cluster[cluster[i]];
    s.answer_count[i] = rec.candidates[i].count;
    s.answer_admissible[i] = rec.candidates[i].admissible;
  }
  if (ref) {
    s.ns_truth = cluster_ns(cluster[*ref], have_similarity);
    // Keep the set-membership score of the truth cluster consistent.
    for (std::size_t i = 0; i < n; ++i) {
      if (cluster[i] == cluster[*ref]) s.per_answer_ns[i] = *s.ns_truth;
    }
  } else {
    s.ns_truth = 1.0;
  }
  s.uncertainty[Notion::pe_frequency] = predictive_entropy(frequency_probs(rec));
  s.uncertainty[Notion::semantic_count] = semantic_count(rec);
  return s;
}

ScoredSample score_record(const CandidateRecord& rec, const NsWeights& w) {
  return rec.task_kind == TaskKind::mcqa ? mcqa_ns(rec, w) : open_domain_ns(rec);
}

}  // namespace selcon
