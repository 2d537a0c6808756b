#pragma once

#include "unmix/types.hpp"

namespace unmix {

// Shift-stabilized softmax; output is strictly positive (entries floored at
// 1e-300) and sums to one.
Eigen::VectorXd softmax_abundances(const Eigen::VectorXd& coeffs);

// Noise-free forward model M * a.
Eigen::VectorXd forward(const EndmemberMatrix& endmembers,
                        const Eigen::VectorXd& abundances);

// Gaussian log-likelihood of one pixel, including the normalizing constant:
// -(L/2) ln(2 pi s2) - ||y - M softmax(c)||^2 / (2 s2).
double log_likelihood_pixel(const Eigen::VectorXd& y,
                            const Eigen::VectorXd& coeffs, double s2,
                            const EndmemberMatrix& endmembers);

// Sum of per-pixel log-likelihoods (independent noise across pixels).
double log_likelihood_image(const ImageCube& cube, const LogisticState& state,
                            double s2, const EndmemberMatrix& endmembers);

}  // namespace unmix
