#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace unmix {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream keyed by (seed, a, b, c). Every (iteration, pixel,
// step) tuple gets an independent stream, so draws do not depend on thread
// scheduling or update order.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed, std::uint64_t a = 0,
                     std::uint64_t b = 0, std::uint64_t c = 0) {
    state_ = mix64(seed ^ 0x6a09e667f3bcc908ULL);
    state_ = mix64(state_ ^ mix64(a));
    state_ = mix64(state_ ^ mix64(b));
    state_ = mix64(state_ ^ mix64(c));
  }

  std::uint64_t next_u64() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return mix64(state_);
  }

  // uniform on the open interval (0, 1)
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // integer in [0, n)
  std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }

  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Marsaglia-Tsang; shape < 1 handled by boosting.
  double gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
      throw std::invalid_argument("gamma: shape and scale must be positive");
    if (shape < 1.0) {
      double u = uniform();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
        return d * v * scale;
    }
  }

  double gamma_rate(double shape, double rate) {
    return gamma(shape, 1.0 / rate);
  }

  // IG(shape, scale): density proportional to x^{-(shape+1)} exp(-scale/x)
  double inv_gamma(double shape, double scale) {
    return scale / gamma(shape, 1.0);
  }

  // index in [0, n) with the given (normalized) probabilities
  int discrete(const double* probs, int n) {
    double u = uniform();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += probs[i];
      if (u <= acc) return i;
    }
    return n - 1;
  }

 private:
  std::uint64_t state_;
};

}  // namespace unmix
