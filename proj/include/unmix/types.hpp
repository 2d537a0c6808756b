#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace unmix {

// Observed scene: P pixel spectra of L bands each. Row p of `data` is the
// spectrum of pixel p; the lattice is linearized row by row
// (p = row * width + col).
struct ImageCube {
  int width = 0;
  int height = 0;
  int bands = 0;
  Eigen::MatrixXd data;  // P x L

  int pixels() const { return width * height; }

  void validate() const {
    if (width < 1 || height < 1 || bands < 1)
      throw std::invalid_argument("ImageCube: dimensions must be positive");
    if (data.rows() != pixels() || data.cols() != bands)
      throw std::invalid_argument("ImageCube: data must be P x L");
    if (!data.allFinite())
      throw std::invalid_argument("ImageCube: non-finite reflectance value");
  }
};

// Known signature matrix M, one endmember spectrum per column.
struct EndmemberMatrix {
  Eigen::MatrixXd spectra;          // L x R
  std::vector<std::string> names;   // optional, from CSV header

  int bands() const { return static_cast<int>(spectra.rows()); }
  int count() const { return static_cast<int>(spectra.cols()); }

  void validate() const {
    if (count() < 2)
      throw std::invalid_argument("EndmemberMatrix: need at least 2 endmembers");
    if (!spectra.allFinite())
      throw std::invalid_argument("EndmemberMatrix: non-finite entry");
    for (int i = 0; i < count(); ++i)
      for (int j = i + 1; j < count(); ++j)
        if (spectra.col(i) == spectra.col(j))
          throw std::invalid_argument(
              "EndmemberMatrix: identical endmember columns " +
              std::to_string(i) + " and " + std::to_string(j));
  }
};

// Column p is the abundance vector of pixel p: strictly positive entries
// summing to one.
struct AbundanceMatrix {
  Eigen::MatrixXd values;  // R x P

  void validate() const {
    if (!values.allFinite())
      throw std::invalid_argument("AbundanceMatrix: non-finite entry");
    if ((values.array() <= 0.0).any())
      throw std::invalid_argument("AbundanceMatrix: nonpositive abundance");
    for (int p = 0; p < values.cols(); ++p)
      if (std::abs(values.col(p).sum() - 1.0) > 1e-12)
        throw std::invalid_argument("AbundanceMatrix: column " +
                                    std::to_string(p) +
                                    " does not sum to one");
  }
};

// Unconstrained coefficients; softmax of a column yields that pixel's
// abundance vector.
struct LogisticState {
  Eigen::MatrixXd coeffs;  // R x P

  void validate() const {
    if (!coeffs.allFinite())
      throw std::invalid_argument("LogisticState: non-finite coefficient");
  }
};

struct NoiseModel {
  double variance = 1.0;  // s^2, common to all pixels and bands

  void validate() const {
    if (!(variance > 0.0))
      throw std::invalid_argument("NoiseModel: variance must be positive");
  }
};

}  // namespace unmix
