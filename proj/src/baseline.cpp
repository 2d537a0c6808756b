#include "unmix/baseline.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "unmix/errors.hpp"
#include "unmix/parallel.hpp"

namespace unmix {

namespace {

// Lawson-Hanson active-set NNLS: argmin ||A x - b|| s.t. x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     double tol, int max_iters) {
  const int n = static_cast<int>(A.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  int n_passive = 0;
  // KKT tolerance relative to the gradient scale; an absolute tolerance makes
  // rounding noise at an exact-fit optimum look like a descent direction.
  const double w_tol =
      tol * std::max(1.0, (A.transpose() * b).cwiseAbs().maxCoeff());

  auto solve_passive = [&]() {
    Eigen::MatrixXd Ap(A.rows(), n_passive);
    int j = 0;
    for (int i = 0; i < n; ++i)
      if (passive[i]) Ap.col(j++) = A.col(i);
    Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    j = 0;
    for (int i = 0; i < n; ++i)
      if (passive[i]) z[i] = zp[j++];
    return z;
  };

  for (int iter = 0; iter < max_iters; ++iter) {
    Eigen::VectorXd w = A.transpose() * (b - A * x);
    int best = -1;
    double best_w = w_tol;
    for (int i = 0; i < n; ++i)
      if (!passive[i] && w[i] > best_w) {
        best_w = w[i];
        best = i;
      }
    if (best < 0) return x;  // KKT satisfied
    passive[best] = true;
    ++n_passive;

    for (;;) {
      Eigen::VectorXd z = solve_passive();
      bool feasible = true;
      for (int i = 0; i < n; ++i)
        if (passive[i] && z[i] <= 0.0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i)
        if (passive[i] && z[i] <= 0.0)
          alpha = std::min(alpha, x[i] / (x[i] - z[i]));
      x += alpha * (z - x);
      for (int i = 0; i < n; ++i)
        if (passive[i] && x[i] <= 1e-14) {
          x[i] = 0.0;
          passive[i] = false;
          --n_passive;
        }
    }
  }
  throw numeric_error("fcls: active-set iteration limit reached");
}

}  // namespace

Eigen::VectorXd fcls_unmix_pixel(const Eigen::VectorXd& y,
                                 const EndmemberMatrix& endmembers,
                                 double tol, double sum_weight_factor) {
  const Eigen::MatrixXd& M = endmembers.spectra;
  if (y.size() != M.rows())
    throw std::invalid_argument("fcls_unmix_pixel: band count mismatch");
  if (!(tol > 0.0))
    throw std::invalid_argument("fcls_unmix_pixel: tol must be positive");
  const int R = static_cast<int>(M.cols());

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  if (svd.singularValues()(R - 1) <=
      1e-10 * svd.singularValues()(0))
    throw numeric_error("fcls: endmember matrix is rank deficient");

  const double w = sum_weight_factor * M.cwiseAbs().maxCoeff();
  Eigen::MatrixXd A(M.rows() + 1, R);
  A.topRows(M.rows()) = M;
  A.bottomRows(1).setConstant(w);
  Eigen::VectorXd b(y.size() + 1);
  b.head(y.size()) = y;
  b(y.size()) = w;

  Eigen::VectorXd a = nnls(A, b, tol, 10 * R * R);
  double s = a.sum();
  if (!(s > 0.0)) throw numeric_error("fcls: degenerate zero solution");
  return a / s;
}

Eigen::MatrixXd fcls_unmix_image(const ImageCube& cube,
                                 const EndmemberMatrix& endmembers,
                                 double tol, int threads) {
  cube.validate();
  if (cube.bands != endmembers.spectra.rows())
    throw std::invalid_argument("fcls_unmix_image: band count mismatch");
  const int P = cube.pixels();
  const int R = endmembers.count();
  Eigen::MatrixXd out(R, P);
  std::vector<std::string> failures(P);
  parallel_for(0, P, threads, [&](int p) {
    try {
      out.col(p) = fcls_unmix_pixel(cube.data.row(p).transpose(), endmembers,
                                    tol);
    } catch (const std::exception& e) {
      failures[p] = e.what();
    }
  });
  for (int p = 0; p < P; ++p)
    if (!failures[p].empty())
      throw numeric_error("fcls: pixel " + std::to_string(p) + ": " +
                          failures[p]);
  return out;
}

}  // namespace unmix
