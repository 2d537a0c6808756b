#include "unmix/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "unmix/baseline.hpp"
#include "unmix/errors.hpp"
#include "unmix/model.hpp"
#include "unmix/parallel.hpp"
#include "unmix/rng.hpp"

namespace unmix {

namespace {

// RNG step tags; the stream key is (seed, iteration, slot, tag)
enum StepTag : std::uint64_t {
  kTagInitLabels = 1,
  kTagLabelSweep = 2,
  kTagMh = 3,
  kTagNoise = 4,
  kTagPsi = 5,
  kTagSigma = 6,
  kTagGlobal = 7,
};

}  // namespace

void ClassHyperParams::validate() const {
  if (psi.rows() != sigma2.rows() || psi.cols() != sigma2.cols())
    throw std::invalid_argument("ClassHyperParams: psi/sigma2 shape mismatch");
  if (!psi.allFinite() || !sigma2.allFinite())
    throw std::invalid_argument("ClassHyperParams: non-finite entry");
  if ((sigma2.array() <= 0.0).any())
    throw std::runtime_error("ClassHyperParams: nonpositive variance");
}

void GlobalHyperParams::validate() const {
  if (!(v2 > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("GlobalHyperParams: v2 and delta must be > 0");
}

void ChainConfig::validate() const {
  if (n_mc < 1 || n_burn < 0 || n_burn >= n_mc)
    throw std::invalid_argument("ChainConfig: need 0 <= n_burn < n_mc");
  if (num_classes < 1)
    throw std::invalid_argument("ChainConfig: K must be at least 1");
  if (beta < 0.0) throw std::invalid_argument("ChainConfig: beta must be >= 0");
  if (proposal_sd.size() > 0 && (proposal_sd.array() <= 0.0).any())
    throw std::invalid_argument("ChainConfig: proposal_sd must be positive");
  if (threads < 1) throw std::invalid_argument("ChainConfig: threads >= 1");
}

Eigen::VectorXd PosteriorSamples::acceptance_rate_per_coordinate() const {
  if (kept_iterations == 0 || width * height == 0)
    return Eigen::VectorXd::Zero(num_endmembers);
  return accept_counts.rowwise().sum() /
         (static_cast<double>(kept_iterations) * width * height);
}

Eigen::VectorXd PosteriorSamples::acceptance_rate_per_pixel() const {
  if (kept_iterations == 0)
    return Eigen::VectorXd::Zero(width * height);
  return accept_counts.colwise().sum().transpose() /
         (static_cast<double>(kept_iterations) * num_endmembers);
}

Eigen::VectorXd label_conditional_probs(const LabelField& field, int p,
                                        const Eigen::VectorXd& c_p,
                                        const ClassHyperParams& hyper,
                                        double beta, NeighborhoodOrder order) {
  hyper.validate();
  const int K = field.num_classes;
  const int R = static_cast<int>(c_p.size());
  if (hyper.psi.rows() != K || hyper.psi.cols() != R)
    throw std::invalid_argument("label_conditional_probs: hyper shape mismatch");
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(K);
  for (int q : neighbors(p, field.width, field.height, order))
    counts[field.labels[q] - 1] += 1.0;
  Eigen::VectorXd logp(K);
  for (int k = 0; k < K; ++k) {
    double quad = 0.0;
    double logdet = 0.0;
    for (int r = 0; r < R; ++r) {
      double d = c_p[r] - hyper.psi(k, r);
      quad += d * d / hyper.sigma2(k, r);
      logdet += std::log(hyper.sigma2(k, r));
    }
    logp[k] = beta * counts[k] - 0.5 * logdet - 0.5 * quad;
  }
  Eigen::VectorXd probs = (logp.array() - logp.maxCoeff()).exp();
  probs /= probs.sum();
  return probs;
}

void sweep_labels(LabelField& field, const LogisticState& coeffs,
                  const ClassHyperParams& hyper, NeighborhoodOrder order,
                  std::uint64_t seed, std::uint64_t iteration, int threads) {
  const int P = field.pixels();
  const int K = field.num_classes;
  for (int color = 0; color < 2; ++color) {
    parallel_for(0, P, threads, [&](int p) {
      if (((p / field.width) + (p % field.width)) % 2 != color) return;
      Eigen::VectorXd probs = label_conditional_probs(
          field, p, coeffs.coeffs.col(p), hyper, field.beta, order);
      StreamRng rng(seed, iteration, static_cast<std::uint64_t>(p),
                    kTagLabelSweep);
      field.labels[p] = 1 + rng.discrete(probs.data(), K);
    });
  }
}

Eigen::MatrixXd mh_update_coefficients(LogisticState& coeffs,
                                       const LabelField& field,
                                       const ClassHyperParams& hyper,
                                       const ImageCube& cube,
                                       const EndmemberMatrix& endmembers,
                                       double s2,
                                       const Eigen::VectorXd& proposal_sd,
                                       std::uint64_t seed,
                                       std::uint64_t iteration, int threads) {
  const int P = cube.pixels();
  const int R = endmembers.count();
  if (proposal_sd.size() != R)
    throw std::invalid_argument("mh_update_coefficients: proposal_sd size");
  Eigen::MatrixXd accepted = Eigen::MatrixXd::Zero(R, P);
  const Eigen::MatrixXd& M = endmembers.spectra;
  std::vector<std::string> failures(P);

  parallel_for(0, P, threads, [&](int p) {
    StreamRng rng(seed, iteration, static_cast<std::uint64_t>(p), kTagMh);
    const int k = field.labels[p] - 1;
    Eigen::VectorXd c = coeffs.coeffs.col(p);
    Eigen::VectorXd y = cube.data.row(p).transpose();
    double res2 = (y - M * softmax_abundances(c)).squaredNorm();
    for (int r = 0; r < R; ++r) {
      double step = rng.normal(0.0, proposal_sd[r]);
      double c_old = c[r];
      double prior_old = -0.5 * (c_old - hyper.psi(k, r)) *
                         (c_old - hyper.psi(k, r)) / hyper.sigma2(k, r);
      c[r] = c_old + step;
      double res2_new = (y - M * softmax_abundances(c)).squaredNorm();
      double prior_new = -0.5 * (c[r] - hyper.psi(k, r)) *
                         (c[r] - hyper.psi(k, r)) / hyper.sigma2(k, r);
      double delta = (res2 - res2_new) / (2.0 * s2) + prior_new - prior_old;
      if (!std::isfinite(delta)) {
        failures[p] = "non-finite MH log-target at iteration " +
                      std::to_string(iteration) + ", pixel " +
                      std::to_string(p) + ", coordinate " + std::to_string(r);
        return;
      }
      if (std::log(rng.uniform()) < delta) {
        res2 = res2_new;
        accepted(r, p) = 1.0;
      } else {
        c[r] = c_old;
      }
    }
    coeffs.coeffs.col(p) = c;
  });
  for (int p = 0; p < P; ++p)
    if (!failures[p].empty()) throw numeric_error(failures[p]);
  return accepted;
}

double sample_noise_variance(const ImageCube& cube,
                             const EndmemberMatrix& endmembers,
                             const LogisticState& coeffs, double delta,
                             double nu, std::uint64_t seed,
                             std::uint64_t iteration, int threads) {
  const int P = cube.pixels();
  const double L = static_cast<double>(cube.bands);
  const Eigen::MatrixXd& M = endmembers.spectra;
  std::vector<double> partial(P);
  parallel_for(0, P, threads, [&](int p) {
    partial[p] = (cube.data.row(p).transpose() -
                  M * softmax_abundances(coeffs.coeffs.col(p)))
                     .squaredNorm();
  });
  double residual_sum = std::accumulate(partial.begin(), partial.end(), 0.0);
  StreamRng rng(seed, iteration, 0, kTagNoise);
  return rng.inv_gamma(L * P / 2.0 + nu, delta + residual_sum / 2.0);
}

void sample_class_means(ClassHyperParams& hyper, const LabelField& field,
                        const LogisticState& coeffs, double v2,
                        std::uint64_t seed, std::uint64_t iteration) {
  const int K = field.num_classes;
  const int R = static_cast<int>(coeffs.coeffs.rows());
  Eigen::VectorXd n_k = Eigen::VectorXd::Zero(K);
  Eigen::MatrixXd sum_c = Eigen::MatrixXd::Zero(K, R);
  for (int p = 0; p < field.pixels(); ++p) {
    int k = field.labels[p] - 1;
    n_k[k] += 1.0;
    sum_c.row(k) += coeffs.coeffs.col(p).transpose();
  }
  for (int k = 0; k < K; ++k) {
    for (int r = 0; r < R; ++r) {
      StreamRng rng(seed, iteration, static_cast<std::uint64_t>(k * R + r),
                    kTagPsi);
      if (n_k[k] == 0.0) {
        hyper.psi(k, r) = rng.normal(0.0, std::sqrt(v2));
        continue;
      }
      double cbar = sum_c(k, r) / n_k[k];
      double denom = hyper.sigma2(k, r) + v2 * n_k[k];
      double mean = v2 * n_k[k] * cbar / denom;
      double var = v2 * hyper.sigma2(k, r) / denom;
      hyper.psi(k, r) = rng.normal(mean, std::sqrt(var));
    }
  }
}

void sample_class_variances(ClassHyperParams& hyper, const LabelField& field,
                            const LogisticState& coeffs, double gamma_scale,
                            double xi, std::uint64_t seed,
                            std::uint64_t iteration) {
  const int K = field.num_classes;
  const int R = static_cast<int>(coeffs.coeffs.rows());
  Eigen::VectorXd n_k = Eigen::VectorXd::Zero(K);
  Eigen::MatrixXd dev2 = Eigen::MatrixXd::Zero(K, R);
  for (int p = 0; p < field.pixels(); ++p) {
    int k = field.labels[p] - 1;
    n_k[k] += 1.0;
    for (int r = 0; r < R; ++r) {
      double d = coeffs.coeffs(r, p) - hyper.psi(k, r);
      dev2(k, r) += d * d;
    }
  }
  for (int k = 0; k < K; ++k)
    for (int r = 0; r < R; ++r) {
      StreamRng rng(seed, iteration, static_cast<std::uint64_t>(k * R + r),
                    kTagSigma);
      hyper.sigma2(k, r) =
          rng.inv_gamma(n_k[k] / 2.0 + xi, gamma_scale + dev2(k, r) / 2.0);
    }
}

GlobalDraw sample_global_hyper(const ClassHyperParams& hyper, double s2,
                               const PriorConfig& prior, std::uint64_t seed,
                               std::uint64_t iteration) {
  const double RK = static_cast<double>(hyper.psi.size());
  GlobalDraw out;
  double scale = prior.v2_prior_scale + 0.5 * hyper.psi.squaredNorm();
  if (scale <= 0.0) {
    scale = 1e-12;
    out.degenerate = true;
  }
  StreamRng rng_v2(seed, iteration, 0, kTagGlobal);
  out.v2 = rng_v2.inv_gamma(RK / 2.0 + prior.v2_prior_shape, scale);
  StreamRng rng_delta(seed, iteration, 1, kTagGlobal);
  out.delta = rng_delta.gamma_rate(prior.nu + prior.delta_prior_shape,
                                   prior.delta_prior_rate + 1.0 / s2);
  return out;
}

Eigen::MatrixXd gibbs_iteration(SamplerState& state, const ImageCube& cube,
                                const EndmemberMatrix& endmembers,
                                const ChainConfig& config,
                                const Eigen::VectorXd& proposal_sd,
                                std::uint64_t iteration) {
  sweep_labels(state.labels, state.coeffs, state.hyper, config.order,
               config.seed, iteration, config.threads);
  Eigen::MatrixXd accepted = mh_update_coefficients(
      state.coeffs, state.labels, state.hyper, cube, endmembers, state.s2,
      proposal_sd, config.seed, iteration, config.threads);
  state.s2 = sample_noise_variance(cube, endmembers, state.coeffs,
                                   state.global.delta, config.prior.nu,
                                   config.seed, iteration, config.threads);
  sample_class_means(state.hyper, state.labels, state.coeffs, state.global.v2,
                     config.seed, iteration);
  sample_class_variances(state.hyper, state.labels, state.coeffs,
                         config.prior.gamma, config.prior.xi, config.seed,
                         iteration);
  GlobalDraw g = sample_global_hyper(state.hyper, state.s2, config.prior,
                                     config.seed, iteration);
  state.global.v2 = g.v2;
  state.global.delta = g.delta;
  state.v2_degenerate = g.degenerate;
  if (!std::isfinite(state.s2) || !std::isfinite(state.global.v2) ||
      !std::isfinite(state.global.delta) || !state.hyper.psi.allFinite() ||
      !state.hyper.sigma2.allFinite())
    throw numeric_error("non-finite draw at iteration " +
                        std::to_string(iteration) + " (hyperparameter step)");
  return accepted;
}

namespace {

SamplerState initial_state(const ImageCube& cube,
                           const EndmemberMatrix& endmembers,
                           const ChainConfig& config) {
  const int P = cube.pixels();
  const int R = endmembers.count();
  const int K = config.num_classes;

  Eigen::MatrixXd a0 = fcls_unmix_image(cube, endmembers, 1e-8,
                                        config.threads);
  SamplerState state;
  // logistic inversion; FCLS zeros lifted to 1e-3 first
  state.coeffs.coeffs = a0.cwiseMax(1e-3).array().log();

  double residual_sum = 0.0;
  for (int p = 0; p < P; ++p)
    residual_sum += (cube.data.row(p).transpose() -
                     endmembers.spectra *
                         softmax_abundances(state.coeffs.coeffs.col(p)))
                        .squaredNorm();
  state.s2 = std::max(residual_sum / (static_cast<double>(cube.bands) * P),
                      1e-12);

  state.labels.width = cube.width;
  state.labels.height = cube.height;
  state.labels.num_classes = K;
  state.labels.beta = config.beta;
  state.labels.labels.resize(P);
  for (int p = 0; p < P; ++p) {
    StreamRng rng(config.seed, 0, static_cast<std::uint64_t>(p),
                  kTagInitLabels);
    state.labels.labels[p] = 1 + static_cast<int>(rng.uniform_int(K));
  }

  state.hyper.psi = Eigen::MatrixXd::Zero(K, R);
  state.hyper.sigma2 = Eigen::MatrixXd::Ones(K, R);
  Eigen::VectorXd n_k = Eigen::VectorXd::Zero(K);
  for (int p = 0; p < P; ++p)
    n_k[state.labels.labels[p] - 1] += 1.0;
  for (int k = 0; k < K; ++k) {
    if (n_k[k] < 2.0) continue;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(R);
    Eigen::VectorXd var = Eigen::VectorXd::Zero(R);
    for (int p = 0; p < P; ++p)
      if (state.labels.labels[p] - 1 == k)
        mean += state.coeffs.coeffs.col(p);
    mean /= n_k[k];
    for (int p = 0; p < P; ++p)
      if (state.labels.labels[p] - 1 == k) {
        Eigen::VectorXd d = state.coeffs.coeffs.col(p) - mean;
        var += d.cwiseProduct(d);
      }
    var /= n_k[k];
    state.hyper.psi.row(k) = mean.transpose();
    state.hyper.sigma2.row(k) = var.cwiseMax(1e-4).transpose();
  }
  state.global.v2 = 10.0;
  state.global.delta = state.s2;
  return state;
}

}  // namespace

PosteriorSamples run_chain(const ImageCube& cube,
                           const EndmemberMatrix& endmembers,
                           const ChainConfig& config) {
  config.validate();
  cube.validate();
  endmembers.validate();
  if (cube.bands != endmembers.bands())
    throw std::invalid_argument("run_chain: cube/endmember band mismatch");

  const int P = cube.pixels();
  const int R = endmembers.count();
  const int K = config.num_classes;

  Eigen::VectorXd u = config.proposal_sd;
  if (u.size() == 0) u = Eigen::VectorXd::Constant(R, 0.8);

  SamplerState state;
  std::int64_t start_iter = 1;
  if (!config.resume_path.empty()) {
    Checkpoint ck = load_checkpoint(config.resume_path);
    if (ck.state.labels.pixels() != P ||
        ck.state.coeffs.coeffs.rows() != R ||
        ck.state.hyper.psi.rows() != K)
      throw data_error("run_chain: checkpoint dimensions do not match input");
    state = ck.state;
    u = ck.proposal_sd;
    start_iter = ck.iteration + 1;
  } else {
    state = initial_state(cube, endmembers, config);
  }

  PosteriorSamples out;
  out.width = cube.width;
  out.height = cube.height;
  out.num_classes = K;
  out.num_endmembers = R;
  out.beta = config.beta;
  out.accept_counts = Eigen::MatrixXd::Zero(R, P);
  const int n_keep = config.n_mc - config.n_burn;
  out.labels.reserve(n_keep);
  out.coeffs.reserve(n_keep);

  Eigen::VectorXd window_accepts = Eigen::VectorXd::Zero(R);
  int window_iters = 0;

  for (std::int64_t iter = start_iter; iter <= config.n_mc; ++iter) {
    Eigen::MatrixXd accepted =
        gibbs_iteration(state, cube, endmembers, config, u, iter);

    if (config.adapt && iter <= config.n_burn) {
      window_accepts += accepted.rowwise().sum();
      ++window_iters;
      if (window_iters == config.adapt_interval) {
        for (int r = 0; r < R; ++r) {
          double rate = window_accepts[r] / (window_iters * P);
          if (rate > config.target_accept_hi)
            u[r] *= 1.1;
          else if (rate < config.target_accept_lo)
            u[r] *= 0.9;
        }
        window_accepts.setZero();
        window_iters = 0;
      }
    }

    if (iter > config.n_burn) {
      std::vector<std::int32_t> z(P);
      for (int p = 0; p < P; ++p) z[p] = state.labels.labels[p];
      out.labels.push_back(std::move(z));
      out.coeffs.push_back(state.coeffs.coeffs);
      out.s2.push_back(state.s2);
      out.v2.push_back(state.global.v2);
      out.delta.push_back(state.global.delta);
      out.psi.push_back(state.hyper.psi);
      out.sigma2.push_back(state.hyper.sigma2);
      out.accept_counts += accepted;
      ++out.kept_iterations;
      if (state.v2_degenerate) ++out.v2_degenerate_count;
    }

    if (config.checkpoint_every > 0 && !config.checkpoint_path.empty() &&
        iter % config.checkpoint_every == 0)
      save_checkpoint(config.checkpoint_path, state, iter, u);
  }
  out.proposal_sd = u;
  return out;
}

LabelField estimate_map_labels(const PosteriorSamples& samples) {
  if (samples.draws() == 0)
    throw std::runtime_error("estimate_map_labels: empty chain");
  const int P = samples.width * samples.height;
  const int K = samples.num_classes;
  LabelField out;
  out.width = samples.width;
  out.height = samples.height;
  out.num_classes = K;
  out.beta = samples.beta;
  out.labels.resize(P);
  for (int p = 0; p < P; ++p) {
    std::vector<int> counts(K, 0);
    for (const auto& z : samples.labels) ++counts[z[p] - 1];
    int best = 0;
    for (int k = 1; k < K; ++k)
      if (counts[k] > counts[best]) best = k;
    out.labels[p] = best + 1;
  }
  return out;
}

AbundanceMatrix estimate_mmse_abundances(const PosteriorSamples& samples,
                                         const LabelField& map_labels) {
  if (samples.draws() == 0)
    throw std::runtime_error("estimate_mmse_abundances: empty chain");
  const int P = samples.width * samples.height;
  const int R = samples.num_endmembers;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(R, P);
  Eigen::VectorXd matched = Eigen::VectorXd::Zero(P);
  Eigen::MatrixXd acc_all = Eigen::MatrixXd::Zero(R, P);
  for (int d = 0; d < samples.draws(); ++d) {
    for (int p = 0; p < P; ++p) {
      Eigen::VectorXd a = softmax_abundances(samples.coeffs[d].col(p));
      acc_all.col(p) += a;
      if (samples.labels[d][p] == map_labels.labels[p]) {
        acc.col(p) += a;
        matched[p] += 1.0;
      }
    }
  }
  AbundanceMatrix out;
  out.values.resize(R, P);
  for (int p = 0; p < P; ++p) {
    Eigen::VectorXd a = matched[p] > 0.0
                            ? Eigen::VectorXd(acc.col(p) / matched[p])
                            : Eigen::VectorXd(acc_all.col(p) / samples.draws());
    out.values.col(p) = a / a.sum();
  }
  return out;
}

ClassPosterior class_abundance_posterior(const PosteriorSamples& samples,
                                         int k, int bins) {
  if (samples.draws() == 0)
    throw std::runtime_error("class_abundance_posterior: empty chain");
  if (k < 1 || k > samples.num_classes)
    throw std::invalid_argument("class_abundance_posterior: class out of range");
  const int P = samples.width * samples.height;
  const int R = samples.num_endmembers;
  std::vector<Eigen::VectorXd> mus;
  for (int d = 0; d < samples.draws(); ++d) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(R);
    int n = 0;
    for (int p = 0; p < P; ++p)
      if (samples.labels[d][p] == k) {
        mu += softmax_abundances(samples.coeffs[d].col(p));
        ++n;
      }
    if (n > 0) mus.push_back(mu / n);
  }
  if (mus.empty())
    throw std::runtime_error("class_abundance_posterior: class " +
                             std::to_string(k) + " never occupied");
  ClassPosterior out;
  out.draws.resize(static_cast<int>(mus.size()), R);
  for (int i = 0; i < static_cast<int>(mus.size()); ++i)
    out.draws.row(i) = mus[i].transpose();
  out.mean = out.draws.colwise().mean().transpose();
  out.bin_centers.resize(bins, R);
  out.bin_counts = Eigen::MatrixXd::Zero(bins, R);
  for (int r = 0; r < R; ++r) {
    double lo = out.draws.col(r).minCoeff();
    double hi = out.draws.col(r).maxCoeff();
    if (hi <= lo) hi = lo + 1e-12;
    double w = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b)
      out.bin_centers(b, r) = lo + (b + 0.5) * w;
    for (int i = 0; i < out.draws.rows(); ++i) {
      int b = std::min(bins - 1,
                       static_cast<int>((out.draws(i, r) - lo) / w));
      out.bin_counts(b, r) += 1.0;
    }
  }
  return out;
}

// --- checkpointing ---------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'S', 'U', 'X', 'C', 'H', 'K', '1', '\0'};

template <typename T>
void put(std::ofstream& f, T v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& f) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

void put_matrix(std::ofstream& f, const Eigen::MatrixXd& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) put<double>(f, m(i, j));
}

void get_matrix(std::ifstream& f, Eigen::MatrixXd& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = get<double>(f);
}

}  // namespace

void save_checkpoint(const std::string& path, const SamplerState& state,
                     std::int64_t iteration,
                     const Eigen::VectorXd& proposal_sd) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw data_error("save_checkpoint: cannot open " + path);
  f.write(kMagic, 8);
  put<std::uint64_t>(f, 1);  // version
  put<std::uint64_t>(f, state.labels.width);
  put<std::uint64_t>(f, state.labels.height);
  put<std::uint64_t>(f, state.labels.num_classes);
  put<std::uint64_t>(f, state.coeffs.coeffs.rows());
  put<std::int64_t>(f, iteration);
  put<double>(f, state.labels.beta);
  put<double>(f, state.s2);
  put<double>(f, state.global.v2);
  put<double>(f, state.global.delta);
  for (int z : state.labels.labels) put<std::uint32_t>(f, z);
  put_matrix(f, state.coeffs.coeffs);
  put_matrix(f, state.hyper.psi);
  put_matrix(f, state.hyper.sigma2);
  for (int r = 0; r < proposal_sd.size(); ++r) put<double>(f, proposal_sd[r]);
  if (!f) throw data_error("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw data_error("load_checkpoint: cannot open " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, kMagic, 8) != 0)
    throw data_error("load_checkpoint: bad magic in " + path);
  if (get<std::uint64_t>(f) != 1)
    throw data_error("load_checkpoint: unsupported version in " + path);
  Checkpoint ck;
  int width = static_cast<int>(get<std::uint64_t>(f));
  int height = static_cast<int>(get<std::uint64_t>(f));
  int K = static_cast<int>(get<std::uint64_t>(f));
  int R = static_cast<int>(get<std::uint64_t>(f));
  ck.iteration = get<std::int64_t>(f);
  ck.state.labels.width = width;
  ck.state.labels.height = height;
  ck.state.labels.num_classes = K;
  ck.state.labels.beta = get<double>(f);
  ck.state.s2 = get<double>(f);
  ck.state.global.v2 = get<double>(f);
  ck.state.global.delta = get<double>(f);
  const int P = width * height;
  ck.state.labels.labels.resize(P);
  for (int p = 0; p < P; ++p)
    ck.state.labels.labels[p] = static_cast<int>(get<std::uint32_t>(f));
  ck.state.coeffs.coeffs.resize(R, P);
  get_matrix(f, ck.state.coeffs.coeffs);
  ck.state.hyper.psi.resize(K, R);
  get_matrix(f, ck.state.hyper.psi);
  ck.state.hyper.sigma2.resize(K, R);
  get_matrix(f, ck.state.hyper.sigma2);
  ck.proposal_sd.resize(R);
  for (int r = 0; r < R; ++r) ck.proposal_sd[r] = get<double>(f);
  if (!f) throw data_error("load_checkpoint: truncated file " + path);
  return ck;
}

}  // namespace unmix
