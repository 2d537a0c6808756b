#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "unmix/model.hpp"
#include "unmix/rng.hpp"
#include "unmix/sampler.hpp"

using namespace unmix;

namespace {

EndmemberMatrix random_endmembers(int L, int R, std::uint64_t seed) {
  EndmemberMatrix m;
  m.spectra.resize(L, R);
  StreamRng rng(seed);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < R; ++j) m.spectra(i, j) = rng.uniform();
  return m;
}

ImageCube random_cube(int w, int h, int L, std::uint64_t seed) {
  ImageCube cube;
  cube.width = w;
  cube.height = h;
  cube.bands = L;
  cube.data.resize(w * h, L);
  StreamRng rng(seed);
  for (int p = 0; p < w * h; ++p)
    for (int l = 0; l < L; ++l) cube.data(p, l) = rng.uniform();
  return cube;
}

}  // namespace

TEST_CASE("noise variance conditional has the documented shape") {
  // L=189, P=2500 -> IG shape L P / 2 + 1 = 236251. With zero residuals the
  // scale is just delta, so the draws concentrate at delta / shape.
  const int L = 189, W = 50, H = 50;
  EndmemberMatrix m = random_endmembers(L, 2, 50);
  LogisticState state;
  state.coeffs = Eigen::MatrixXd::Zero(2, W * H);
  ImageCube cube;
  cube.width = W;
  cube.height = H;
  cube.bands = L;
  cube.data.resize(W * H, L);
  Eigen::VectorXd clean = m.spectra * softmax_abundances(state.coeffs.col(0));
  for (int p = 0; p < W * H; ++p) cube.data.row(p) = clean.transpose();

  const double shape = L * W * H / 2.0 + 1.0;
  const double delta = 3.0;
  double mean = 0.0;
  const int n = 50;
  for (int i = 0; i < n; ++i)
    mean += sample_noise_variance(cube, m, state, delta, 1.0, 51, i, 4);
  mean /= n;
  CHECK(mean == doctest::Approx(delta / shape).epsilon(2e-3));
}

TEST_CASE("class mean conditional matches the closed form") {
  // sigma2=1, v2=1, n_k=4, cbar=2 -> N(8/5, 1/5).
  LabelField f;
  f.width = 2;
  f.height = 2;
  f.num_classes = 1;
  f.labels.assign(4, 1);
  LogisticState state;
  state.coeffs = Eigen::MatrixXd::Constant(1, 4, 2.0);
  ClassHyperParams hyper;
  hyper.psi = Eigen::MatrixXd::Zero(1, 1);
  hyper.sigma2 = Eigen::MatrixXd::Ones(1, 1);

  const int n = 20000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    sample_class_means(hyper, f, state, 1.0, 52, i);
    s += hyper.psi(0, 0);
    s2 += hyper.psi(0, 0) * hyper.psi(0, 0);
    hyper.sigma2(0, 0) = 1.0;
  }
  double mean = s / n;
  double var = s2 / n - mean * mean;
  CHECK(std::abs(mean - 1.6) < 3.0 * std::sqrt(0.2 / n));
  CHECK(std::abs(var - 0.2) < 3.0 * 0.2 * std::sqrt(2.0 / n));
}

TEST_CASE("class variance conditional matches IG(2, 6)") {
  // n_k=2, deviations {1, 1}, xi=1, gamma=5 -> IG(2, 6), median 6 / 1.67835.
  LabelField f;
  f.width = 2;
  f.height = 1;
  f.num_classes = 1;
  f.labels.assign(2, 1);
  LogisticState state;
  state.coeffs.resize(1, 2);
  state.coeffs << 1.0, -1.0;
  ClassHyperParams hyper;
  hyper.psi = Eigen::MatrixXd::Zero(1, 1);
  hyper.sigma2 = Eigen::MatrixXd::Ones(1, 1);

  const int n = 20000;
  std::vector<double> draws(n);
  for (int i = 0; i < n; ++i) {
    sample_class_variances(hyper, f, state, 5.0, 1.0, 53, i);
    draws[i] = hyper.sigma2(0, 0);
    REQUIRE(draws[i] > 0.0);
  }
  std::nth_element(draws.begin(), draws.begin() + n / 2, draws.end());
  // asymptotic median standard error 1 / (2 f(med) sqrt(n)) with
  // f(3.5749) = 0.1471 for IG(2, 6)
  CHECK(std::abs(draws[n / 2] - 3.5749) < 3.0 * 0.024);
}

TEST_CASE("global hyperparameter conditionals") {
  ClassHyperParams hyper;
  hyper.psi.resize(1, 2);
  hyper.psi << 3.0, 4.0;  // psi'psi = 25 -> v2 ~ IG(1, 12.5)
  hyper.sigma2 = Eigen::MatrixXd::Ones(1, 2);
  PriorConfig prior;  // reference defaults

  const int n = 20000;
  std::vector<double> v2(n);
  double dsum = 0.0;
  const double s2 = 2.0;
  for (int i = 0; i < n; ++i) {
    GlobalDraw d = sample_global_hyper(hyper, s2, prior, 54, i);
    REQUIRE(d.v2 > 0.0);
    REQUIRE(d.delta > 0.0);
    CHECK_FALSE(d.degenerate);
    v2[i] = d.v2;
    dsum += d.delta;
  }
  // IG(1, 12.5) median = 12.5 / ln 2; density there 0.01923
  std::nth_element(v2.begin(), v2.begin() + n / 2, v2.end());
  CHECK(std::abs(v2[n / 2] - 12.5 / std::log(2.0)) <
        3.0 / (2.0 * 0.01923 * std::sqrt(static_cast<double>(n))));
  // delta ~ Gamma(1, rate 1/s2): mean s2, sd s2
  CHECK(std::abs(dsum / n - s2) < 3.0 * s2 / std::sqrt(n));

  ClassHyperParams zero;
  zero.psi = Eigen::MatrixXd::Zero(1, 2);
  zero.sigma2 = Eigen::MatrixXd::Ones(1, 2);
  GlobalDraw d = sample_global_hyper(zero, 1.0, prior, 54, 0);
  CHECK(d.degenerate);
}

TEST_CASE("vanishing proposal accepts everything and changes nothing") {
  EndmemberMatrix m = random_endmembers(8, 3, 55);
  ImageCube cube = random_cube(3, 2, 8, 56);
  LabelField f;
  f.width = 3;
  f.height = 2;
  f.num_classes = 2;
  f.labels = {1, 2, 1, 2, 1, 2};
  ClassHyperParams hyper;
  hyper.psi = Eigen::MatrixXd::Zero(2, 3);
  hyper.sigma2 = Eigen::MatrixXd::Ones(2, 3);
  LogisticState state;
  state.coeffs = Eigen::MatrixXd::Constant(3, 6, 0.3);
  Eigen::MatrixXd before = state.coeffs;
  Eigen::MatrixXd accepted = mh_update_coefficients(
      state, f, hyper, cube, m, 0.01,
      Eigen::VectorXd::Constant(3, 1e-300), 57, 1, 2);
  CHECK(accepted.minCoeff() == 1.0);
  CHECK((state.coeffs - before).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("MH scan is thread invariant") {
  EndmemberMatrix m = random_endmembers(8, 3, 58);
  ImageCube cube = random_cube(4, 4, 8, 59);
  LabelField f;
  f.width = 4;
  f.height = 4;
  f.num_classes = 2;
  for (int p = 0; p < 16; ++p) f.labels.push_back(1 + p % 2);
  ClassHyperParams hyper;
  hyper.psi = Eigen::MatrixXd::Zero(2, 3);
  hyper.sigma2 = Eigen::MatrixXd::Ones(2, 3);
  LogisticState s1, s8;
  s1.coeffs = Eigen::MatrixXd::Zero(3, 16);
  s8.coeffs = Eigen::MatrixXd::Zero(3, 16);
  Eigen::VectorXd u = Eigen::VectorXd::Constant(3, 0.5);
  Eigen::MatrixXd a1 = mh_update_coefficients(s1, f, hyper, cube, m, 0.01, u,
                                              60, 7, 1);
  Eigen::MatrixXd a8 = mh_update_coefficients(s8, f, hyper, cube, m, 0.01, u,
                                              60, 7, 8);
  CHECK(s1.coeffs == s8.coeffs);
  CHECK(a1 == a8);
}

TEST_CASE("short chain satisfies the stored-state invariants") {
  EndmemberMatrix m = random_endmembers(16, 3, 61);
  ImageCube cube = random_cube(6, 6, 16, 62);
  ChainConfig cfg;
  cfg.n_mc = 60;
  cfg.n_burn = 20;
  cfg.num_classes = 2;
  cfg.seed = 63;
  cfg.threads = 2;
  PosteriorSamples out = run_chain(cube, m, cfg);
  CHECK(out.draws() == 40);
  CHECK(out.kept_iterations == 40);
  for (int d = 0; d < out.draws(); ++d) {
    CHECK(out.s2[d] > 0.0);
    CHECK(out.v2[d] > 0.0);
    CHECK(out.delta[d] > 0.0);
    CHECK((out.sigma2[d].array() > 0.0).all());
    for (int z : out.labels[d]) {
      CHECK(z >= 1);
      CHECK(z <= 2);
    }
    for (int p = 0; p < 36; ++p) {
      Eigen::VectorXd a = softmax_abundances(out.coeffs[d].col(p));
      CHECK(std::abs(a.sum() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("MAP labels break ties toward the smallest class") {
  PosteriorSamples s;
  s.width = 2;
  s.height = 1;
  s.num_classes = 3;
  s.num_endmembers = 2;
  s.labels = {{3, 2}, {1, 2}};
  s.coeffs = {Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2)};
  s.s2 = {1.0, 1.0};
  LabelField map = estimate_map_labels(s);
  CHECK(map.labels == std::vector<int>{1, 2});
}

TEST_CASE("MMSE abundances respect the swap symmetry") {
  PosteriorSamples s;
  s.width = 1;
  s.height = 1;
  s.num_classes = 1;
  s.num_endmembers = 2;
  s.labels = {{1}, {1}};
  Eigen::MatrixXd c1(2, 1), c2(2, 1);
  c1 << 0.7, -0.2;
  c2 << -0.2, 0.7;
  s.coeffs = {c1, c2};
  s.s2 = {1.0, 1.0};
  LabelField map = estimate_map_labels(s);
  AbundanceMatrix a = estimate_mmse_abundances(s, map);
  CHECK(a.values(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(a.values(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("checkpoint round trip is exact") {
  SamplerState st;
  st.labels.width = 3;
  st.labels.height = 2;
  st.labels.num_classes = 2;
  st.labels.beta = 1.1;
  st.labels.labels = {1, 2, 2, 1, 1, 2};
  st.coeffs.coeffs = Eigen::MatrixXd::Random(2, 6);
  st.s2 = 0.0123456789;
  st.hyper.psi = Eigen::MatrixXd::Random(2, 2);
  st.hyper.sigma2 = Eigen::MatrixXd::Random(2, 2).cwiseAbs();
  st.global.v2 = 7.5;
  st.global.delta = 0.25;
  Eigen::VectorXd u(2);
  u << 0.31, 0.62;

  std::string path =
      (std::filesystem::temp_directory_path() / "unmix_ckpt_test.bin")
          .string();
  save_checkpoint(path, st, 1234, u);
  Checkpoint ck = load_checkpoint(path);
  std::remove(path.c_str());

  CHECK(ck.iteration == 1234);
  CHECK(ck.state.labels.labels == st.labels.labels);
  CHECK(ck.state.coeffs.coeffs == st.coeffs.coeffs);
  CHECK(ck.state.s2 == st.s2);
  CHECK(ck.state.hyper.psi == st.hyper.psi);
  CHECK(ck.state.hyper.sigma2 == st.hyper.sigma2);
  CHECK(ck.state.global.v2 == st.global.v2);
  CHECK(ck.state.global.delta == st.global.delta);
  CHECK(ck.proposal_sd == u);
}

TEST_CASE("resumed chains reproduce the uninterrupted tail") {
  EndmemberMatrix m = random_endmembers(12, 2, 64);
  ImageCube cube = random_cube(5, 4, 12, 65);
  std::string path =
      (std::filesystem::temp_directory_path() / "unmix_resume_test.bin")
          .string();

  ChainConfig cfg;
  cfg.n_mc = 99;  // a single checkpoint fires, at iteration 50
  cfg.n_burn = 20;
  cfg.num_classes = 2;
  cfg.seed = 66;
  cfg.adapt = false;  // proposal must match across the split for equality
  cfg.checkpoint_every = 50;
  cfg.checkpoint_path = path;
  PosteriorSamples full = run_chain(cube, m, cfg);

  ChainConfig resumed = cfg;
  resumed.checkpoint_every = 0;
  resumed.checkpoint_path.clear();
  resumed.resume_path = path;
  PosteriorSamples tail = run_chain(cube, m, resumed);
  std::remove(path.c_str());

  // full keeps iterations 21..99; the resume restarts at 51 and keeps
  // 51..99, which must match the last 49 stored draws bit for bit.
  REQUIRE(tail.draws() == 49);
  REQUIRE(full.draws() == 79);
  for (int d = 0; d < 49; ++d) {
    CHECK(tail.coeffs[d] == full.coeffs[30 + d]);
    CHECK(tail.s2[d] == full.s2[30 + d]);
    CHECK(tail.labels[d] == full.labels[30 + d]);
  }
}

TEST_CASE("chain config validation") {
  ChainConfig cfg;
  cfg.n_mc = 10;
  cfg.n_burn = 10;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.n_burn = 2;
  CHECK_NOTHROW(cfg.validate());
  cfg.beta = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
