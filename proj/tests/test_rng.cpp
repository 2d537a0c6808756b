#include <doctest.h>

#include <cmath>
#include <vector>

#include "unmix/rng.hpp"

using namespace unmix;

TEST_CASE("streams are reproducible and key-sensitive") {
  StreamRng a(42, 1, 2, 3), b(42, 1, 2, 3), c(42, 1, 2, 4);
  bool all_equal = true, any_equal_c = false;
  for (int i = 0; i < 64; ++i) {
    std::uint64_t x = a.next_u64();
    all_equal = all_equal && (x == b.next_u64());
    any_equal_c = any_equal_c || (x == c.next_u64());
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_c);
}

TEST_CASE("uniform lies in the open unit interval with the right mean") {
  StreamRng rng(9);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  double se = 1.0 / std::sqrt(12.0 * n);
  CHECK(std::abs(sum / n - 0.5) < 3.0 * se);
}

TEST_CASE("normal moments") {
  StreamRng rng(10);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal(2.0, 3.0);
    s += x;
    s2 += x * x;
  }
  double mean = s / n;
  double var = s2 / n - mean * mean;
  CHECK(std::abs(mean - 2.0) < 3.0 * 3.0 / std::sqrt(n));
  CHECK(std::abs(var - 9.0) < 3.0 * 9.0 * std::sqrt(2.0 / n));
}

TEST_CASE("gamma moments, including shape below one") {
  StreamRng rng(11);
  const int n = 200000;
  double s_a = 0.0, s_b = 0.0;
  for (int i = 0; i < n; ++i) {
    s_a += rng.gamma(3.5, 2.0);
    s_b += rng.gamma(0.5, 1.0);
  }
  CHECK(std::abs(s_a / n - 7.0) < 3.0 * std::sqrt(3.5 * 4.0 / n));
  CHECK(std::abs(s_b / n - 0.5) < 3.0 * std::sqrt(0.5 / n));
}

TEST_CASE("inverse gamma mean") {
  StreamRng rng(12);
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.inv_gamma(3.0, 2.0);
    REQUIRE(x > 0.0);
    s += x;
  }
  // IG(3, 2): mean 1, variance 1.
  CHECK(std::abs(s / n - 1.0) < 3.0 * std::sqrt(1.0 / n));
}

TEST_CASE("gamma_rate matches gamma with inverted scale") {
  StreamRng a(13, 5), b(13, 5);
  for (int i = 0; i < 32; ++i)
    CHECK(a.gamma_rate(2.5, 4.0) ==
          doctest::Approx(b.gamma(2.5, 0.25)).epsilon(1e-15));
}

TEST_CASE("discrete frequencies") {
  StreamRng rng(14);
  const int n = 100000;
  double probs[3] = {0.2, 0.3, 0.5};
  std::vector<int> counts(3, 0);
  for (int i = 0; i < n; ++i) ++counts[rng.discrete(probs, 3)];
  for (int k = 0; k < 3; ++k) {
    double se = std::sqrt(probs[k] * (1.0 - probs[k]) / n);
    CHECK(std::abs(counts[k] / static_cast<double>(n) - probs[k]) < 3.0 * se);
  }
}

TEST_CASE("gamma rejects invalid parameters") {
  StreamRng rng(15);
  CHECK_THROWS_AS(rng.gamma(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rng.gamma(1.0, -1.0), std::invalid_argument);
}
