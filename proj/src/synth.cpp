#include "unmix/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "unmix/errors.hpp"
#include "unmix/io.hpp"
#include "unmix/model.hpp"
#include "unmix/rng.hpp"

namespace unmix {

void SceneSpec::validate() const {
  if (width < 1 || height < 1)
    throw std::invalid_argument("SceneSpec: dimensions must be positive");
  if (num_classes < 1 || num_endmembers < 2)
    throw std::invalid_argument("SceneSpec: need K >= 1 and R >= 2");
  if (class_means.rows() != num_classes ||
      class_means.cols() != num_endmembers ||
      class_vars.rows() != num_classes ||
      class_vars.cols() != num_endmembers)
    throw std::invalid_argument("SceneSpec: class moment shape mismatch");
  for (int k = 0; k < num_classes; ++k) {
    if (std::abs(class_means.row(k).sum() - 1.0) > 1e-9 ||
        (class_means.row(k).array() <= 0.0).any())
      throw std::invalid_argument("SceneSpec: class_means row " +
                                  std::to_string(k) +
                                  " is not on the simplex");
  }
  if ((class_vars.array() <= 0.0).any())
    throw std::invalid_argument("SceneSpec: class_vars must be positive");
  if (!(noise_variance > 0.0))
    throw std::invalid_argument("SceneSpec: noise_variance must be positive");
  if (beta < 0.0) throw std::invalid_argument("SceneSpec: beta must be >= 0");
}

SceneSpec SceneSpec::reference(std::uint64_t seed) {
  SceneSpec spec;
  spec.seed = seed;
  spec.class_means.resize(3, 3);
  spec.class_means << 0.6, 0.3, 0.1,
                      0.3, 0.5, 0.2,
                      0.3, 0.2, 0.5;
  spec.class_vars = Eigen::MatrixXd::Constant(3, 3, 5e-3);
  return spec;
}

EndmemberMatrix procedural_endmembers(int bands, int count,
                                      std::uint64_t seed) {
  if (bands < count)
    throw std::invalid_argument("procedural_endmembers: need L >= R");
  const int max_redraws = 100;
  for (int attempt = 0; attempt < max_redraws; ++attempt) {
    // Shared baseline plus small per-endmember features, mimicking the high
    // pairwise correlation of real reflectance libraries.
    StreamRng base_rng(seed, static_cast<std::uint64_t>(attempt), 1000);
    Eigen::VectorXd base =
        Eigen::VectorXd::Constant(bands, base_rng.uniform(0.2, 0.4));
    int base_bumps = 3 + static_cast<int>(base_rng.uniform_int(3));
    for (int b = 0; b < base_bumps; ++b) {
      double center = base_rng.uniform(0.0, bands - 1.0);
      double width = base_rng.uniform(bands / 12.0, bands / 4.0);
      double amp = base_rng.uniform(0.4, 1.0);
      for (int i = 0; i < bands; ++i) {
        double t = (i - center) / width;
        base[i] += amp * std::exp(-0.5 * t * t);
      }
    }
    Eigen::MatrixXd M(bands, count);
    for (int r = 0; r < count; ++r) {
      StreamRng rng(seed, static_cast<std::uint64_t>(attempt),
                    static_cast<std::uint64_t>(r));
      Eigen::VectorXd s = base;
      int bumps = 3 + static_cast<int>(rng.uniform_int(4));
      for (int b = 0; b < bumps; ++b) {
        double center = rng.uniform(0.0, bands - 1.0);
        double width = rng.uniform(bands / 30.0, bands / 10.0);
        double amp = rng.uniform(0.06, 0.18) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        for (int i = 0; i < bands; ++i) {
          double t = (i - center) / width;
          s[i] += amp * std::exp(-0.5 * t * t);
        }
      }
      s = s.cwiseMax(0.01);
      M.col(r) = s / s.maxCoeff();
    }
    bool ok = true;
    for (int i = 0; i < count && ok; ++i)
      for (int j = i + 1; j < count && ok; ++j) {
        Eigen::VectorXd a = M.col(i).array() - M.col(i).mean();
        Eigen::VectorXd b = M.col(j).array() - M.col(j).mean();
        double corr = a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm());
        if (corr >= 0.95) ok = false;
      }
    if (ok) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(M.transpose() * M);
      double cond = svd.singularValues()(0) /
                    svd.singularValues()(svd.singularValues().size() - 1);
      if (!(cond < 1e4)) ok = false;
    }
    if (ok) {
      EndmemberMatrix out;
      out.spectra = M;
      for (int r = 0; r < count; ++r)
        out.names.push_back("endmember_" + std::to_string(r + 1));
      return out;
    }
  }
  throw numeric_error(
      "procedural_endmembers: could not satisfy correlation/conditioning "
      "bounds after 100 redraws");
}

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  Scene scene;
  if (!spec.endmember_file.empty())
    scene.endmembers = read_endmembers(spec.endmember_file);
  else
    scene.endmembers =
        procedural_endmembers(spec.bands, spec.num_endmembers, spec.seed);
  if (scene.endmembers.count() != spec.num_endmembers)
    throw data_error("generate_scene: endmember file has wrong column count");

  const int P = spec.width * spec.height;
  const int R = spec.num_endmembers;
  const int L = scene.endmembers.bands();

  scene.truth_labels =
      sample_field(spec.num_classes, spec.beta, spec.width, spec.height,
                   NeighborhoodOrder::First, spec.label_sweeps, spec.seed);

  // Gaussian draw of the first R-1 components, last one set to the residual,
  // rejected until all components lie in (0, 1).
  scene.truth_abundances.values.resize(R, P);
  long attempts = 0, accepts = 0;
  for (int p = 0; p < P; ++p) {
    const int k = scene.truth_labels.labels[p] - 1;
    StreamRng rng(spec.seed, 2, static_cast<std::uint64_t>(p));
    Eigen::VectorXd a(R);
    for (long local = 0;; ++local) {
      ++attempts;
      double sum = 0.0;
      for (int r = 0; r < R - 1; ++r) {
        a[r] = rng.normal(spec.class_means(k, r),
                          std::sqrt(spec.class_vars(k, r)));
        sum += a[r];
      }
      a[R - 1] = 1.0 - sum;
      if ((a.array() > 0.0).all() && (a.array() < 1.0).all()) {
        ++accepts;
        break;
      }
      if (attempts >= 10000 &&
          static_cast<double>(accepts) / attempts < 1e-3)
        throw numeric_error(
            "generate_scene: abundance rejection acceptance below 1e-3; "
            "moments are infeasible on the simplex");
      if (local > 1000000)
        throw numeric_error("generate_scene: abundance rejection stuck at "
                            "pixel " + std::to_string(p));
    }
    scene.truth_abundances.values.col(p) = a;
  }

  scene.cube.width = spec.width;
  scene.cube.height = spec.height;
  scene.cube.bands = L;
  scene.cube.data.resize(P, L);
  double signal_power = 0.0;
  for (int p = 0; p < P; ++p) {
    Eigen::VectorXd clean =
        scene.endmembers.spectra * scene.truth_abundances.values.col(p);
    signal_power += clean.squaredNorm();
    StreamRng rng(spec.seed, 3, static_cast<std::uint64_t>(p));
    double sd = std::sqrt(spec.noise_variance);
    for (int l = 0; l < L; ++l)
      scene.cube.data(p, l) = clean[l] + rng.normal(0.0, sd);
  }
  scene.snr_db = 10.0 * std::log10(signal_power / P /
                                   (L * spec.noise_variance));
  return scene;
}

}  // namespace unmix
