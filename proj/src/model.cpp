#include "unmix/model.hpp"

#include <cmath>
#include <stdexcept>

namespace unmix {

Eigen::VectorXd softmax_abundances(const Eigen::VectorXd& coeffs) {
  if (!coeffs.allFinite())
    throw std::invalid_argument("softmax_abundances: non-finite coefficient");
  Eigen::VectorXd shifted = coeffs.array() - coeffs.maxCoeff();
  Eigen::VectorXd out = shifted.array().exp();
  out /= out.sum();
  // keep entries representable in logs
  out = out.cwiseMax(1e-300);
  return out;
}

Eigen::VectorXd forward(const EndmemberMatrix& endmembers,
                        const Eigen::VectorXd& abundances) {
  if (endmembers.spectra.cols() != abundances.size())
    throw std::invalid_argument("forward: endmember/abundance size mismatch");
  return endmembers.spectra * abundances;
}

double log_likelihood_pixel(const Eigen::VectorXd& y,
                            const Eigen::VectorXd& coeffs, double s2,
                            const EndmemberMatrix& endmembers) {
  if (!(s2 > 0.0))
    throw std::invalid_argument("log_likelihood_pixel: s2 must be positive");
  if (y.size() != endmembers.spectra.rows())
    throw std::invalid_argument("log_likelihood_pixel: band count mismatch");
  const double L = static_cast<double>(y.size());
  Eigen::VectorXd residual =
      y - endmembers.spectra * softmax_abundances(coeffs);
  return -0.5 * L * std::log(2.0 * 3.14159265358979323846 * s2) -
         residual.squaredNorm() / (2.0 * s2);
}

double log_likelihood_image(const ImageCube& cube, const LogisticState& state,
                            double s2, const EndmemberMatrix& endmembers) {
  if (cube.bands != endmembers.spectra.rows() ||
      state.coeffs.cols() != cube.pixels() ||
      state.coeffs.rows() != endmembers.spectra.cols())
    throw std::invalid_argument("log_likelihood_image: dimension mismatch");
  double total = 0.0;
  for (int p = 0; p < cube.pixels(); ++p)
    total += log_likelihood_pixel(cube.data.row(p).transpose(),
                                  state.coeffs.col(p), s2, endmembers);
  return total;
}

}  // namespace unmix
