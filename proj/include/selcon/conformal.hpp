#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "selcon/uncertainty.hpp"

namespace selcon {

// Frozen calibration state at a given alpha. `scores_sorted`, `source_ids`,
// `source_index` and `loo_status` are aligned: entry k describes the k-th
// smallest calibration score; `source_index[k]` is its position in the input
// sample list. q_hat may be +infinity (rank overflow: all-inclusive sets).
struct CalibrationArtifact {
  std::vector<double> scores_sorted;
  double alpha = 0.0;
  double q_hat = 0.0;
  std::vector<bool> loo_status;
  std::vector<std::string> source_ids;
  std::vector<std::size_t> source_index;
};

// 1-based conformal rank ceil((n+1)*(1-alpha)), clamped below at 1.
std::size_t conformal_rank(std::size_t n, double alpha);

// Element of rank ceil((N+1)(1-alpha)) of the ascending scores, or
// +infinity when the rank exceeds N. Throws DataError on empty input.
double conformal_quantile(std::vector<double> scores, double alpha);

// Indices of answers with per_answer_ns <= q_hat. May be empty.
std::vector<std::size_t> prediction_set(const ScoredSample& sample, double q_hat);

// ns_truth <= q_hat; records without an admissible answer are never covered
// at a finite threshold. Throws DataError when ns_truth is absent.
bool covers(const ScoredSample& sample, double q_hat);

// Sorts scores, computes q_hat, and the leave-one-out prediction status of
// each calibration point (whether its own true answer would be covered by a
// set calibrated on the other N-1 points at the same alpha). N=1 yields
// loo_status = {false}.
CalibrationArtifact calibrate(const std::vector<ScoredSample>& samples, double alpha);

}  // namespace selcon
