#ifndef OTTAIL_RNG_HPP
#define OTTAIL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace ot {

// Counter-based generator: every draw is a pure function of (seed, stream,
// counter), so parallel consumers never share state and results do not depend
// on evaluation order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(key_ ^ mix(counter + 0x9e3779b97f4a7c15ULL));
  }

  // Uniform on (0, 1]; never returns 0, so inverse-cdf transforms stay finite.
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 1.0) * 0x1p-53;
  }

  // Uniform on [lo, hi).
  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * (static_cast<double>(bits(counter) >> 11) * 0x1p-53);
  }

  // Standard normal via Box-Muller; consumes counters base and base+1.
  double gaussian(std::uint64_t base) const {
    const double u1 = uniform(base);
    const double u2 = uniform(base + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Standard Pareto(alpha): survival r^{-alpha} on r >= 1.
  double pareto(std::uint64_t counter, double alpha) const {
    return std::pow(uniform(counter), -1.0 / alpha);
  }

  // Uniform direction on the unit sphere; consumes counters base..base+2d-1.
  void on_sphere(std::uint64_t base, std::span<double> out) const {
    double n2 = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = gaussian(base + 2 * i);
      n2 += out[i] * out[i];
    }
    if (n2 == 0.0) {  // astronomically unlikely; fall back to a fixed axis
      out[0] = 1.0;
      for (std::size_t i = 1; i < out.size(); ++i) out[i] = 0.0;
      return;
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (double& v : out) v *= inv;
  }

  // Integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t counter, std::uint64_t n) const {
    return bits(counter) % n;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

}  // namespace ot

#endif  // OTTAIL_RNG_HPP
