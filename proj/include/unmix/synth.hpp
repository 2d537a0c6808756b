#pragma once

#include <cstdint>
#include <string>

#include "unmix/potts.hpp"
#include "unmix/types.hpp"

namespace unmix {

// Benchmark scene description: a Potts label map, per-class abundance
// moments, linear mixing and white Gaussian noise.
struct SceneSpec {
  int width = 25;
  int height = 25;
  int num_classes = 3;   // K
  int num_endmembers = 3;  // R
  int bands = 413;       // L, ignored when endmember_file is set
  double beta = 1.1;
  Eigen::MatrixXd class_means;  // K x R, rows on the simplex
  Eigen::MatrixXd class_vars;   // K x R, strictly positive
  double noise_variance = 0.001;
  std::uint64_t seed = 0;
  std::string endmember_file;  // CSV path; empty -> procedural spectra
  int label_sweeps = 200;

  void validate() const;

  // Table-style reference settings: 25x25, K = R = 3, beta = 1.1,
  // all variances 5e-3, noise 1e-3.
  static SceneSpec reference(std::uint64_t seed);
};

struct Scene {
  ImageCube cube;
  AbundanceMatrix truth_abundances;
  LabelField truth_labels;
  EndmemberMatrix endmembers;
  double snr_db = 0.0;  // empirical 10 log10(mean ||M a||^2 / (L s2))
};

Scene generate_scene(const SceneSpec& spec);

// Smooth nonnegative spectra: positive baseline plus 3-6 Gaussian bumps,
// peak-normalized to 1; pairwise correlation < 0.95 and cond(M'M) < 1e4
// enforced by redraw.
EndmemberMatrix procedural_endmembers(int bands, int count,
                                      std::uint64_t seed);

}  // namespace unmix
