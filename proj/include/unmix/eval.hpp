#pragma once

#include <string>
#include <vector>

#include "unmix/potts.hpp"
#include "unmix/sampler.hpp"
#include "unmix/types.hpp"

namespace unmix {

// Per-endmember mean squared abundance error over all pixels.
Eigen::VectorXd global_mse(const AbundanceMatrix& estimated,
                           const AbundanceMatrix& truth);

struct AccuracyResult {
  double accuracy = 0.0;
  std::vector<int> permutation;  // estimated class k -> permutation[k-1]
  bool exhaustive = true;        // false for the greedy K > 8 fallback
};

// Pixel agreement maximized over class relabelings; exhaustive for K <= 8,
// greedy (flagged) above.
AccuracyResult classification_accuracy(const LabelField& estimated,
                                       const LabelField& truth);

struct TraceSummary {
  std::string name;
  double mean = 0.0;
  double variance = 0.0;
  double first_half_mean = 0.0;
  double second_half_mean = 0.0;
  double relative_shift = 0.0;
  bool shift_flag = false;      // relative mean shift > 10%
  bool degenerate_trace = false;  // zero variance
};

struct ChainReport {
  Eigen::VectorXd acceptance_per_coordinate;
  std::vector<TraceSummary> traces;
  double s2_mean = 0.0;
  double s2_variance = 0.0;
  std::int64_t v2_degenerate_count = 0;
};

ChainReport chain_report(const PosteriorSamples& samples);

std::string chain_report_text(const ChainReport& report);
std::string chain_report_json(const ChainReport& report);

}  // namespace unmix
