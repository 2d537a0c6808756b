#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unmix/potts.hpp"
#include "unmix/types.hpp"

namespace unmix {

// Per-class logistic-coefficient moments: psi(k, r) is the class-k mean of
// coefficient r, sigma2(k, r) the matching variance (diagonal covariance).
struct ClassHyperParams {
  Eigen::MatrixXd psi;     // K x R
  Eigen::MatrixXd sigma2;  // K x R, strictly positive

  void validate() const;
};

// Priors for the top of the hierarchy. Defaults reproduce the reference
// model: nu = 1, xi = 1, gamma = 5, and Jeffreys (improper-limit) hyperpriors
// on v2 and delta. The shape/scale/rate fields generalize those hyperpriors
// to proper ones, which the joint-distribution validation needs; at the
// default zeros the conditionals reduce to IG(RK/2, sum psi'psi / 2) for v2
// and Gamma(1, rate 1/s2) for delta.
struct PriorConfig {
  double nu = 1.0;        // noise-variance prior shape
  double xi = 1.0;        // class-variance prior shape
  double gamma = 5.0;     // class-variance prior scale
  double v2_prior_shape = 0.0;
  double v2_prior_scale = 0.0;
  double delta_prior_shape = 0.0;
  double delta_prior_rate = 0.0;
};

struct GlobalHyperParams {
  double v2 = 1.0;     // variance of the logistic-mean prior
  double delta = 1.0;  // scale of the noise-variance prior

  void validate() const;
};

struct ChainConfig {
  int n_mc = 5000;
  int n_burn = 500;
  double beta = 1.1;
  int num_classes = 3;  // K
  std::uint64_t seed = 0;
  Eigen::VectorXd proposal_sd;  // per-endmember random-walk sd u_r; empty -> 0.8
  bool adapt = true;
  double target_accept_lo = 0.15;
  double target_accept_hi = 0.5;
  int adapt_interval = 50;
  int threads = 1;
  NeighborhoodOrder order = NeighborhoodOrder::First;
  PriorConfig prior;
  int checkpoint_every = 0;        // 0 disables
  std::string checkpoint_path;
  std::string resume_path;         // restart from a snapshot if nonempty

  void validate() const;
};

// Full parameter state of the chain at one iteration.
struct SamplerState {
  LabelField labels;
  LogisticState coeffs;  // R x P
  double s2 = 1.0;
  ClassHyperParams hyper;
  GlobalHyperParams global;
  bool v2_degenerate = false;  // last v2 draw hit the zero-scale guard
};

// Post-burn-in draws plus bookkeeping.
struct PosteriorSamples {
  int width = 0, height = 0;
  int num_classes = 0;  // K
  int num_endmembers = 0;  // R
  double beta = 0.0;
  std::vector<std::vector<std::int32_t>> labels;  // draws x P
  std::vector<Eigen::MatrixXd> coeffs;            // draws of R x P
  std::vector<double> s2, v2, delta;
  std::vector<Eigen::MatrixXd> psi, sigma2;       // draws of K x R
  // cumulative accepted proposals over the kept iterations, per (r, p)
  Eigen::MatrixXd accept_counts;    // R x P
  std::int64_t kept_iterations = 0;
  std::int64_t v2_degenerate_count = 0;
  Eigen::VectorXd proposal_sd;      // u_r after burn-in

  int draws() const { return static_cast<int>(s2.size()); }
  Eigen::VectorXd acceptance_rate_per_coordinate() const;
  Eigen::VectorXd acceptance_rate_per_pixel() const;
};

// --- conditional samplers -------------------------------------------------

// P(z_p = k | rest) from the Potts term and the class-conditional Gaussian
// of c_p; computed in log space.
Eigen::VectorXd label_conditional_probs(const LabelField& field, int p,
                                        const Eigen::VectorXd& c_p,
                                        const ClassHyperParams& hyper,
                                        double beta, NeighborhoodOrder order);

// One checkerboard Gibbs sweep over all labels.
void sweep_labels(LabelField& field, const LogisticState& coeffs,
                  const ClassHyperParams& hyper, NeighborhoodOrder order,
                  std::uint64_t seed, std::uint64_t iteration,
                  int threads = 1);

// Componentwise random-walk Metropolis scan over all logistic coefficients.
// Returns the R x P matrix of accepted-proposal indicators.
Eigen::MatrixXd mh_update_coefficients(LogisticState& coeffs,
                                       const LabelField& field,
                                       const ClassHyperParams& hyper,
                                       const ImageCube& cube,
                                       const EndmemberMatrix& endmembers,
                                       double s2,
                                       const Eigen::VectorXd& proposal_sd,
                                       std::uint64_t seed,
                                       std::uint64_t iteration,
                                       int threads = 1);

// s2 ~ IG(LP/2 + nu, delta + sum_p ||y_p - M a_p||^2 / 2).
double sample_noise_variance(const ImageCube& cube,
                             const EndmemberMatrix& endmembers,
                             const LogisticState& coeffs, double delta,
                             double nu, std::uint64_t seed,
                             std::uint64_t iteration, int threads = 1);

// psi(k, r) ~ N(v2 n_k cbar / (sigma2 + v2 n_k), v2 sigma2 / (sigma2 + v2 n_k));
// empty classes fall back to the N(0, v2) prior.
void sample_class_means(ClassHyperParams& hyper, const LabelField& field,
                        const LogisticState& coeffs, double v2,
                        std::uint64_t seed, std::uint64_t iteration);

// sigma2(k, r) ~ IG(n_k/2 + xi, gamma + within-class squared deviation / 2).
void sample_class_variances(ClassHyperParams& hyper, const LabelField& field,
                            const LogisticState& coeffs, double gamma_scale,
                            double xi, std::uint64_t seed,
                            std::uint64_t iteration);

struct GlobalDraw {
  double v2 = 0.0;
  double delta = 0.0;
  bool degenerate = false;  // psi'psi was zero; v2 drawn with scale 1e-12
};

GlobalDraw sample_global_hyper(const ClassHyperParams& hyper, double s2,
                               const PriorConfig& prior, std::uint64_t seed,
                               std::uint64_t iteration);

// --- chain driver and estimators ------------------------------------------

PosteriorSamples run_chain(const ImageCube& cube,
                           const EndmemberMatrix& endmembers,
                           const ChainConfig& config);

// One full Gibbs iteration over a state (labels, coefficients, s2, psi,
// sigma2, v2, delta). Exposed for the joint-distribution validation.
Eigen::MatrixXd gibbs_iteration(SamplerState& state, const ImageCube& cube,
                                const EndmemberMatrix& endmembers,
                                const ChainConfig& config,
                                const Eigen::VectorXd& proposal_sd,
                                std::uint64_t iteration);

// Per-pixel mode of the stored label draws; ties break toward the smallest
// class index.
LabelField estimate_map_labels(const PosteriorSamples& samples);

// Average softmax(c_p) over the stored draws whose label at p matches the
// MAP label; columns renormalized to sum exactly one.
AbundanceMatrix estimate_mmse_abundances(const PosteriorSamples& samples,
                                         const LabelField& map_labels);

struct ClassPosterior {
  Eigen::MatrixXd draws;        // n x R, one mu_k sample per stored draw
  Eigen::VectorXd mean;         // R
  Eigen::MatrixXd bin_centers;  // bins x R
  Eigen::MatrixXd bin_counts;   // bins x R
};

// Per-draw mean abundance of the pixels labeled k (draws where the class is
// empty are skipped).
ClassPosterior class_abundance_posterior(const PosteriorSamples& samples,
                                         int k, int bins = 30);

// --- checkpointing ---------------------------------------------------------

// Binary snapshot, magic "SUXCHK1", little-endian, matrices row-major f64.
void save_checkpoint(const std::string& path, const SamplerState& state,
                     std::int64_t iteration,
                     const Eigen::VectorXd& proposal_sd);

struct Checkpoint {
  SamplerState state;
  std::int64_t iteration = 0;
  Eigen::VectorXd proposal_sd;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace unmix
