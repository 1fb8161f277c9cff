#ifndef ALTDESIGN_RNG_HPP
#define ALTDESIGN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "altdesign/core.hpp"

namespace altdesign {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based stream: the sequence is a pure function of
/// (root_seed, stream_index, counter), so substreams are index-addressable
/// and draws are reproducible regardless of threading.
class RandomStream {
 public:
  RandomStream(std::uint64_t root_seed, std::uint64_t stream_index = 0)
      : root_seed_(root_seed), stream_index_(stream_index) {
    key_ = detail::mix64(detail::mix64(root_seed) ^
                         (stream_index * 0xda942042e4dd58b5ULL + 0x9e3779b97f4a7c15ULL));
  }

  std::uint64_t root_seed() const { return root_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  RandomStream substream(std::uint64_t i) const {
    return RandomStream(root_seed_, detail::mix64(stream_index_ ^ detail::mix64(i + 1)));
  }

  std::uint64_t next_u64() { return detail::mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  // uniform on [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) {
    if (!(a < b)) throw domain_error("uniform: need a < b");
    return a + (b - a) * next_double();
  }

  double exponential(double rate) {
    if (rate <= 0.0) throw domain_error("exponential: rate must be positive");
    return -std::log1p(-next_double()) / rate;
  }

  double normal(double mu = 0.0, double var = 1.0) {
    if (var < 0.0) throw domain_error("normal: negative variance");
    // Box-Muller; first uniform kept away from 0
    const double u1 = 1.0 - next_double();
    const double u2 = next_double();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return mu + std::sqrt(var) * z;
  }

  // Marsaglia-Tsang; shape < 1 boosted through the U^{1/shape} identity
  double gamma(double shape) {
    if (shape <= 0.0) throw domain_error("gamma: shape must be positive");
    if (shape < 1.0) {
      const double u = 1.0 - next_double();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      const double x = normal();
      const double v0 = 1.0 + c * x;
      if (v0 <= 0.0) continue;
      const double v = v0 * v0 * v0;
      const double u = 1.0 - next_double();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
  }

  /// sigma^2 ~ IG(a/2, b/2) with density proportional to
  /// x^{-a/2-1} exp(-b/(2x)); mean b/(a-2) for a > 2.
  double inverse_gamma_halves(double a, double b) {
    if (a <= 0.0 || b <= 0.0) throw domain_error("inverse_gamma_halves: a, b must be positive");
    return 0.5 * b / gamma(0.5 * a);
  }

  Vector normal_vector(Eigen::Index n) {
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal();
    return z;
  }

  Vector multivariate_normal(const Vector& mean, const SpdFactor& cov_factor) {
    if (mean.size() != cov_factor.dim())
      throw dimension_mismatch("multivariate_normal: mean/factor size mismatch");
    return mean + cov_factor.lower * normal_vector(mean.size());
  }

 private:
  std::uint64_t root_seed_;
  std::uint64_t stream_index_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace altdesign

#endif
