#include "unmix/potts.hpp"

#include <cmath>
#include <stdexcept>

#include "unmix/parallel.hpp"
#include "unmix/rng.hpp"

namespace unmix {

void LabelField::validate() const {
  if (width < 1 || height < 1)
    throw std::invalid_argument("LabelField: dimensions must be positive");
  if (num_classes < 1)
    throw std::invalid_argument("LabelField: K must be at least 1");
  if (beta < 0.0) throw std::invalid_argument("LabelField: beta must be >= 0");
  if (static_cast<int>(labels.size()) != pixels())
    throw std::invalid_argument("LabelField: label count != P");
  for (int z : labels)
    if (z < 1 || z > num_classes)
      throw std::invalid_argument("LabelField: label out of {1..K}");
}

std::vector<int> neighbors(int p, int width, int height,
                           NeighborhoodOrder order) {
  const int P = width * height;
  if (p < 0 || p >= P)
    throw std::invalid_argument("neighbors: pixel index out of range");
  const int row = p / width;
  const int col = p % width;
  std::vector<int> out;
  out.reserve(order == NeighborhoodOrder::First ? 4 : 8);
  auto push = [&](int r, int c) {
    if (r >= 0 && r < height && c >= 0 && c < width) out.push_back(r * width + c);
  };
  push(row - 1, col);
  push(row + 1, col);
  push(row, col - 1);
  push(row, col + 1);
  if (order == NeighborhoodOrder::Second) {
    push(row - 1, col - 1);
    push(row - 1, col + 1);
    push(row + 1, col - 1);
    push(row + 1, col + 1);
  }
  return out;
}

Eigen::VectorXd label_prior_conditional(const LabelField& field, int p,
                                        NeighborhoodOrder order) {
  field.validate();
  const int K = field.num_classes;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(K);
  for (int q : neighbors(p, field.width, field.height, order))
    counts[field.labels[q] - 1] += 1.0;
  Eigen::VectorXd logp = field.beta * counts;
  Eigen::VectorXd probs = (logp.array() - logp.maxCoeff()).exp();
  probs /= probs.sum();
  return probs;
}

namespace {

// conditional draw without revalidating the whole field on every pixel
int draw_label(const LabelField& field, int p, NeighborhoodOrder order,
               StreamRng& rng) {
  const int K = field.num_classes;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(K);
  for (int q : neighbors(p, field.width, field.height, order))
    counts[field.labels[q] - 1] += 1.0;
  Eigen::VectorXd probs =
      (field.beta * (counts.array() - counts.maxCoeff())).exp();
  probs /= probs.sum();
  return 1 + rng.discrete(probs.data(), K);
}

}  // namespace

LabelField sample_field(int num_classes, double beta, int width, int height,
                        NeighborhoodOrder order, int sweeps,
                        std::uint64_t seed, int threads) {
  if (num_classes < 1)
    throw std::invalid_argument("sample_field: K must be at least 1");
  if (sweeps < 1) throw std::invalid_argument("sample_field: sweeps >= 1");
  LabelField field;
  field.width = width;
  field.height = height;
  field.num_classes = num_classes;
  field.beta = beta;
  field.labels.resize(width * height);
  const int P = field.pixels();
  parallel_for(0, P, threads, [&](int p) {
    StreamRng rng(seed, 0, static_cast<std::uint64_t>(p), 0);
    field.labels[p] = 1 + static_cast<int>(rng.uniform_int(num_classes));
  });
  for (int s = 0; s < sweeps; ++s) {
    for (int color = 0; color < 2; ++color) {
      parallel_for(0, P, threads, [&](int p) {
        if (((p / width) + (p % width)) % 2 != color) return;
        StreamRng rng(seed, static_cast<std::uint64_t>(2 * s + color + 1),
                      static_cast<std::uint64_t>(p), 1);
        field.labels[p] = draw_label(field, p, order, rng);
      });
    }
  }
  return field;
}

double homogeneity(const LabelField& field, NeighborhoodOrder order) {
  field.validate();
  long equal = 0;
  long total = 0;
  for (int p = 0; p < field.pixels(); ++p) {
    for (int q : neighbors(p, field.width, field.height, order)) {
      if (q <= p) continue;  // each unordered pair once
      ++total;
      if (field.labels[p] == field.labels[q]) ++equal;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(equal) / total;
}

}  // namespace unmix
