#include "unmix/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace unmix {

Eigen::VectorXd global_mse(const AbundanceMatrix& estimated,
                           const AbundanceMatrix& truth) {
  if (estimated.values.rows() != truth.values.rows() ||
      estimated.values.cols() != truth.values.cols())
    throw std::invalid_argument("global_mse: dimension mismatch");
  const int P = static_cast<int>(truth.values.cols());
  return (estimated.values - truth.values)
             .array()
             .square()
             .rowwise()
             .sum()
             .matrix() /
         static_cast<double>(P);
}

AccuracyResult classification_accuracy(const LabelField& estimated,
                                       const LabelField& truth) {
  if (estimated.width != truth.width || estimated.height != truth.height ||
      estimated.num_classes != truth.num_classes)
    throw std::invalid_argument(
        "classification_accuracy: geometry or class count mismatch");
  const int P = truth.pixels();
  const int K = truth.num_classes;
  AccuracyResult out;

  // confusion(i, j) = #pixels estimated i+1 and truly j+1
  Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(K, K);
  for (int p = 0; p < P; ++p)
    confusion(estimated.labels[p] - 1, truth.labels[p] - 1) += 1.0;

  if (K <= 8) {
    std::vector<int> perm(K);
    std::iota(perm.begin(), perm.end(), 0);
    double best = -1.0;
    std::vector<int> best_perm = perm;
    do {
      double agree = 0.0;
      for (int i = 0; i < K; ++i) agree += confusion(i, perm[i]);
      if (agree > best) {
        best = agree;
        best_perm = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.accuracy = best / P;
    out.permutation.resize(K);
    for (int i = 0; i < K; ++i) out.permutation[i] = best_perm[i] + 1;
    out.exhaustive = true;
  } else {
    // greedy row-by-row matching
    out.exhaustive = false;
    std::vector<bool> used(K, false);
    out.permutation.assign(K, 0);
    double agree = 0.0;
    for (int i = 0; i < K; ++i) {
      int best_j = -1;
      for (int j = 0; j < K; ++j)
        if (!used[j] && (best_j < 0 || confusion(i, j) > confusion(i, best_j)))
          best_j = j;
      used[best_j] = true;
      out.permutation[i] = best_j + 1;
      agree += confusion(i, best_j);
    }
    out.accuracy = agree / P;
  }
  return out;
}

namespace {

TraceSummary summarize(const std::string& name,
                       const std::vector<double>& trace) {
  TraceSummary s;
  s.name = name;
  const int n = static_cast<int>(trace.size());
  double mean = std::accumulate(trace.begin(), trace.end(), 0.0) / n;
  double var = 0.0;
  for (double x : trace) var += (x - mean) * (x - mean);
  var /= n;
  s.mean = mean;
  s.variance = var;
  const int half = n / 2;
  s.first_half_mean =
      std::accumulate(trace.begin(), trace.begin() + half, 0.0) / half;
  s.second_half_mean =
      std::accumulate(trace.begin() + half, trace.end(), 0.0) / (n - half);
  double denom = std::abs(s.first_half_mean);
  s.relative_shift = denom > 0.0
                         ? std::abs(s.second_half_mean - s.first_half_mean) /
                               denom
                         : 0.0;
  s.shift_flag = s.relative_shift > 0.10;
  s.degenerate_trace = var == 0.0;
  return s;
}

}  // namespace

ChainReport chain_report(const PosteriorSamples& samples) {
  if (samples.draws() < 2)
    throw std::invalid_argument("chain_report: need at least 2 stored draws");
  ChainReport report;
  report.acceptance_per_coordinate =
      samples.acceptance_rate_per_coordinate();
  report.v2_degenerate_count = samples.v2_degenerate_count;

  report.traces.push_back(summarize("s2", samples.s2));
  report.traces.push_back(summarize("v2", samples.v2));
  report.traces.push_back(summarize("delta", samples.delta));
  const int K = samples.num_classes;
  const int R = samples.num_endmembers;
  for (int k = 0; k < K; ++k)
    for (int r = 0; r < R; ++r) {
      std::vector<double> psi_trace, sig_trace;
      psi_trace.reserve(samples.draws());
      sig_trace.reserve(samples.draws());
      for (int d = 0; d < samples.draws(); ++d) {
        psi_trace.push_back(samples.psi[d](k, r));
        sig_trace.push_back(samples.sigma2[d](k, r));
      }
      std::string idx =
          "[" + std::to_string(k + 1) + "," + std::to_string(r + 1) + "]";
      report.traces.push_back(summarize("psi" + idx, psi_trace));
      report.traces.push_back(summarize("sigma2" + idx, sig_trace));
    }
  report.s2_mean = report.traces[0].mean;
  report.s2_variance = report.traces[0].variance;
  return report;
}

std::string chain_report_text(const ChainReport& report) {
  std::ostringstream os;
  os << "MH acceptance rate per coordinate:";
  for (int r = 0; r < report.acceptance_per_coordinate.size(); ++r)
    os << " " << report.acceptance_per_coordinate[r];
  os << "\n";
  os << "s2 trace: mean " << report.s2_mean << ", variance "
     << report.s2_variance << "\n";
  if (report.v2_degenerate_count > 0)
    os << "v2 degenerate draws: " << report.v2_degenerate_count << "\n";
  for (const auto& t : report.traces) {
    os << t.name << ": mean " << t.mean << " var " << t.variance
       << " halves " << t.first_half_mean << "/" << t.second_half_mean;
    if (t.degenerate_trace) os << " [degenerate trace]";
    if (t.shift_flag) os << " [mean shift " << 100.0 * t.relative_shift
                         << "% > 10%]";
    os << "\n";
  }
  return os.str();
}

std::string chain_report_json(const ChainReport& report) {
  nlohmann::json j;
  j["acceptance_per_coordinate"] = std::vector<double>(
      report.acceptance_per_coordinate.data(),
      report.acceptance_per_coordinate.data() +
          report.acceptance_per_coordinate.size());
  j["s2_mean"] = report.s2_mean;
  j["s2_variance"] = report.s2_variance;
  j["v2_degenerate_count"] = report.v2_degenerate_count;
  j["traces"] = nlohmann::json::array();
  for (const auto& t : report.traces) {
    nlohmann::json jt;
    jt["name"] = t.name;
    jt["mean"] = t.mean;
    jt["variance"] = t.variance;
    jt["first_half_mean"] = t.first_half_mean;
    jt["second_half_mean"] = t.second_half_mean;
    jt["relative_shift"] = t.relative_shift;
    jt["shift_flag"] = t.shift_flag;
    jt["degenerate_trace"] = t.degenerate_trace;
    j["traces"].push_back(jt);
  }
  return j.dump(2);
}

}  // namespace unmix
