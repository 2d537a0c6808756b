#include <doctest.h>

#include <nlohmann/json.hpp>

#include "unmix/eval.hpp"

using namespace unmix;

TEST_CASE("global mse on a hand-computed pair") {
  AbundanceMatrix est, truth;
  est.values.resize(2, 2);
  truth.values.resize(2, 2);
  est.values << 0.7, 0.4, 0.3, 0.6;
  truth.values << 0.5, 0.5, 0.5, 0.5;
  Eigen::VectorXd mse = global_mse(est, truth);
  // endmember 0: ((0.2)^2 + (0.1)^2) / 2 = 0.025, same for endmember 1.
  CHECK(mse[0] == doctest::Approx(0.025).epsilon(1e-14));
  CHECK(mse[1] == doctest::Approx(0.025).epsilon(1e-14));
}

TEST_CASE("global mse rejects mismatched shapes") {
  AbundanceMatrix est, truth;
  est.values.resize(2, 3);
  truth.values.resize(2, 2);
  CHECK_THROWS_AS(global_mse(est, truth), std::invalid_argument);
}

TEST_CASE("classification accuracy is invariant to relabeling") {
  LabelField truth;
  truth.width = 3;
  truth.height = 2;
  truth.num_classes = 3;
  truth.labels = {1, 1, 2, 2, 3, 3};

  LabelField est = truth;
  est.labels = {2, 2, 3, 3, 1, 1};  // a pure permutation of the truth
  AccuracyResult r = classification_accuracy(est, truth);
  CHECK(r.accuracy == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.exhaustive);
  REQUIRE(r.permutation.size() == 3);
  CHECK(r.permutation[0] == 3);  // estimated 1 covers true 3
  CHECK(r.permutation[1] == 1);
  CHECK(r.permutation[2] == 2);

  est.labels = {2, 2, 3, 1, 1, 1};  // one pixel wrong under the best map
  r = classification_accuracy(est, truth);
  CHECK(r.accuracy == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("many-class accuracy falls back to the greedy matcher") {
  LabelField truth;
  truth.width = 9;
  truth.height = 1;
  truth.num_classes = 9;
  truth.labels = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  AccuracyResult r = classification_accuracy(truth, truth);
  CHECK(r.accuracy == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_FALSE(r.exhaustive);
}

namespace {

PosteriorSamples tiny_samples() {
  PosteriorSamples s;
  s.width = 2;
  s.height = 1;
  s.num_classes = 2;
  s.num_endmembers = 2;
  s.beta = 1.0;
  const int n = 20;
  for (int d = 0; d < n; ++d) {
    s.labels.push_back({1, 2});
    Eigen::MatrixXd c(2, 2);
    c.setConstant(0.1 * d);
    s.coeffs.push_back(c);
    s.s2.push_back(1.0 + 0.01 * d);
    s.v2.push_back(2.0);
    s.delta.push_back(0.5);
    Eigen::MatrixXd h(2, 2);
    h.setConstant(0.3);
    s.psi.push_back(h);
    s.sigma2.push_back(h);
  }
  s.accept_counts = Eigen::MatrixXd::Constant(2, 2, 0.25 * n);
  s.kept_iterations = n;
  s.proposal_sd = Eigen::VectorXd::Constant(2, 0.8);
  return s;
}

}  // namespace

TEST_CASE("chain report summarizes traces and flags drift") {
  PosteriorSamples s = tiny_samples();
  ChainReport rep = chain_report(s);

  CHECK(rep.acceptance_per_coordinate.size() == 2);
  CHECK(rep.acceptance_per_coordinate[0] == doctest::Approx(0.25));
  CHECK(rep.s2_mean ==
        doctest::Approx(1.0 + 0.01 * 9.5).epsilon(1e-12));
  CHECK(rep.v2_degenerate_count == 0);

  bool saw_s2 = false;
  for (const TraceSummary& t : rep.traces) {
    if (t.name == "s2") {
      saw_s2 = true;
      // the trace rises linearly: halves differ, but by less than 10%.
      CHECK(t.first_half_mean < t.second_half_mean);
      CHECK_FALSE(t.shift_flag);
      CHECK_FALSE(t.degenerate_trace);
    }
    if (t.name == "v2") CHECK(t.degenerate_trace);  // constant trace
  }
  CHECK(saw_s2);
}

TEST_CASE("drifting trace sets the shift flag") {
  PosteriorSamples s = tiny_samples();
  for (int d = 0; d < 20; ++d) s.s2[d] = (d < 10) ? 1.0 : 3.0;
  ChainReport rep = chain_report(s);
  for (const TraceSummary& t : rep.traces)
    if (t.name == "s2") {
      CHECK(t.shift_flag);
      CHECK(t.relative_shift > 0.1);
    }
}

TEST_CASE("chain report serializes to parseable json") {
  ChainReport rep = chain_report(tiny_samples());
  std::string text = chain_report_text(rep);
  CHECK(!text.empty());
  nlohmann::json j = nlohmann::json::parse(chain_report_json(rep));
  CHECK(j.contains("acceptance_per_coordinate"));
  CHECK(j.contains("traces"));
  CHECK(j["s2_mean"].get<double>() ==
        doctest::Approx(rep.s2_mean).epsilon(1e-12));
}
