#pragma once

#include "unmix/types.hpp"

namespace unmix {

// Fully constrained least squares: argmin ||y - M a||^2 subject to a >= 0
// and sum(a) = 1. The sum-to-one constraint is enforced by appending a row
// of weight `sum_weight_factor * max|M|` to the system; the solution is
// renormalized to sum exactly one on return.
Eigen::VectorXd fcls_unmix_pixel(const Eigen::VectorXd& y,
                                 const EndmemberMatrix& endmembers,
                                 double tol = 1e-10,
                                 double sum_weight_factor = 1e3);

// Per-pixel FCLS over a whole cube; columns of the result are pixels.
// Unlike the sampler's abundances, exact zeros are permitted here.
Eigen::MatrixXd fcls_unmix_image(const ImageCube& cube,
                                 const EndmemberMatrix& endmembers,
                                 double tol = 1e-10, int threads = 1);

}  // namespace unmix
