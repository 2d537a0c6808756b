#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace unmix {

enum class NeighborhoodOrder {
  First,   // 4-neighbor
  Second,  // 8-neighbor
};

// Per-pixel class labels on a rectangular lattice, values in {1..K}.
// Convention used throughout: the field energy counts each unordered
// neighbor pair once with weight beta, so the local conditional of a label
// is proportional to exp(beta * #equal neighbors).
struct LabelField {
  int width = 0;
  int height = 0;
  int num_classes = 0;  // K
  double beta = 0.0;
  std::vector<int> labels;  // size P, values 1..K, row-major

  int pixels() const { return width * height; }
  void validate() const;
};

// Neighbor indices of pixel p under free boundary conditions. The relation
// is symmetric; off-lattice positions are omitted.
std::vector<int> neighbors(int p, int width, int height,
                           NeighborhoodOrder order);

// Local Gibbs conditional: component k proportional to
// exp(beta * #{neighbors of p with label k}). Sums to one.
Eigen::VectorXd label_prior_conditional(const LabelField& field, int p,
                                        NeighborhoodOrder order);

// Draws a field by checkerboard Gibbs sweeps from a uniform-random start.
// Deterministic given the seed, independent of thread count.
LabelField sample_field(int num_classes, double beta, int width, int height,
                        NeighborhoodOrder order, int sweeps,
                        std::uint64_t seed, int threads = 1);

// Fraction of unordered neighbor pairs with equal labels.
double homogeneity(const LabelField& field, NeighborhoodOrder order);

}  // namespace unmix
