#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "unmix/potts.hpp"

using namespace unmix;

namespace {

std::vector<int> sorted_neighbors(int p, int w, int h, NeighborhoodOrder o) {
  std::vector<int> n = neighbors(p, w, h, o);
  std::sort(n.begin(), n.end());
  return n;
}

}  // namespace

TEST_CASE("first-order neighbors on a 3x3 lattice") {
  CHECK(sorted_neighbors(0, 3, 3, NeighborhoodOrder::First) ==
        std::vector<int>{1, 3});
  CHECK(sorted_neighbors(1, 3, 3, NeighborhoodOrder::First) ==
        std::vector<int>{0, 2, 4});
  CHECK(sorted_neighbors(4, 3, 3, NeighborhoodOrder::First) ==
        std::vector<int>{1, 3, 5, 7});
  CHECK(sorted_neighbors(8, 3, 3, NeighborhoodOrder::First) ==
        std::vector<int>{5, 7});
}

TEST_CASE("second-order neighbors on a 3x3 lattice") {
  CHECK(sorted_neighbors(0, 3, 3, NeighborhoodOrder::Second) ==
        std::vector<int>{1, 3, 4});
  CHECK(sorted_neighbors(4, 3, 3, NeighborhoodOrder::Second) ==
        std::vector<int>{0, 1, 2, 3, 5, 6, 7, 8});
}

TEST_CASE("neighbor relation is symmetric") {
  for (NeighborhoodOrder o :
       {NeighborhoodOrder::First, NeighborhoodOrder::Second}) {
    const int w = 7, h = 5;
    for (int p = 0; p < w * h; ++p)
      for (int q : neighbors(p, w, h, o)) {
        std::vector<int> back = neighbors(q, w, h, o);
        CHECK(std::find(back.begin(), back.end(), p) != back.end());
      }
  }
}

TEST_CASE("label conditional with four equal neighbors") {
  LabelField f;
  f.width = f.height = 3;
  f.num_classes = 2;
  f.beta = 1.0;
  f.labels.assign(9, 1);
  Eigen::VectorXd probs = label_prior_conditional(f, 4,
                                                  NeighborhoodOrder::First);
  const double e4 = std::exp(4.0);
  CHECK(probs[0] == doctest::Approx(e4 / (e4 + 1.0)).epsilon(1e-14));
  CHECK(probs[1] == doctest::Approx(1.0 / (e4 + 1.0)).epsilon(1e-14));
  CHECK(probs.sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("homogeneity of extreme fields") {
  LabelField uni;
  uni.width = uni.height = 4;
  uni.num_classes = 3;
  uni.labels.assign(16, 2);
  CHECK(homogeneity(uni, NeighborhoodOrder::First) == doctest::Approx(1.0));

  LabelField checker;
  checker.width = checker.height = 4;
  checker.num_classes = 2;
  checker.labels.resize(16);
  for (int p = 0; p < 16; ++p)
    checker.labels[p] = 1 + ((p / 4 + p % 4) % 2);
  CHECK(homogeneity(checker, NeighborhoodOrder::First) ==
        doctest::Approx(0.0));
}

TEST_CASE("beta zero gives i.i.d. uniform labels") {
  LabelField f = sample_field(3, 0.0, 100, 100, NeighborhoodOrder::First, 5,
                              21, 4);
  std::vector<int> counts(3, 0);
  for (int z : f.labels) {
    REQUIRE(z >= 1);
    REQUIRE(z <= 3);
    ++counts[z - 1];
  }
  // chi-square with 2 dof; 3-sigma-ish bound ~ 16.
  double chi2 = 0.0;
  const double expect = 10000.0 / 3.0;
  for (int k = 0; k < 3; ++k)
    chi2 += (counts[k] - expect) * (counts[k] - expect) / expect;
  CHECK(chi2 < 16.0);
}

TEST_CASE("sampled fields are deterministic and thread invariant") {
  LabelField a = sample_field(3, 0.9, 17, 11, NeighborhoodOrder::First, 40,
                              77, 1);
  LabelField b = sample_field(3, 0.9, 17, 11, NeighborhoodOrder::First, 40,
                              77, 8);
  CHECK(a.labels == b.labels);
  LabelField c = sample_field(3, 0.9, 17, 11, NeighborhoodOrder::First, 40,
                              78, 1);
  CHECK(a.labels != c.labels);
}

TEST_CASE("2x2 field matches the exact Gibbs distribution") {
  // 16 configurations, energy beta * #equal unordered first-order pairs;
  // the pairs on a 2x2 lattice are (0,1), (2,3), (0,2), (1,3).
  const double beta = 0.8;
  std::map<int, double> exact;
  double zsum = 0.0;
  for (int cfg = 0; cfg < 16; ++cfg) {
    int z[4];
    for (int i = 0; i < 4; ++i) z[i] = (cfg >> i) & 1;
    int eq = (z[0] == z[1]) + (z[2] == z[3]) + (z[0] == z[2]) +
             (z[1] == z[3]);
    double w = std::exp(beta * eq);
    exact[cfg] = w;
    zsum += w;
  }
  for (auto& kv : exact) kv.second /= zsum;

  const int n = 20000;
  std::map<int, int> counts;
  for (int t = 0; t < n; ++t) {
    LabelField f = sample_field(2, beta, 2, 2, NeighborhoodOrder::First, 30,
                                1000 + t, 1);
    int cfg = 0;
    for (int i = 0; i < 4; ++i) cfg |= (f.labels[i] - 1) << i;
    ++counts[cfg];
  }
  double tv = 0.0;
  for (int cfg = 0; cfg < 16; ++cfg)
    tv += std::abs(counts[cfg] / static_cast<double>(n) - exact[cfg]);
  CHECK(tv / 2.0 < 0.01);
}

TEST_CASE("mean homogeneity grows with beta") {
  double prev = -1.0;
  for (double beta : {0.3, 0.8, 1.3}) {
    double mean = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s)
      mean += homogeneity(sample_field(3, beta, 16, 16,
                                       NeighborhoodOrder::First, 120, s, 2),
                          NeighborhoodOrder::First);
    mean /= 5.0;
    CHECK(mean > prev);
    prev = mean;
  }
}

TEST_CASE("label field validation") {
  LabelField f;
  f.width = 2;
  f.height = 1;
  f.num_classes = 2;
  f.labels = {1, 3};
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);
  f.labels = {1, 2};
  CHECK_NOTHROW(f.validate());
}
