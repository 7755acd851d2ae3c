#pragma once
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace risbc {

/// Deterministic random stream. Gaussian variates use an explicit Box-Muller
/// transform instead of std::normal_distribution so that sequences are
/// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for a worker/trial: mixes the base seed with the
  /// stream index (splitmix64 finalizer) so that streams do not overlap.
  static Rng stream(std::uint64_t base_seed, std::uint64_t stream_index) {
    std::uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * (stream_index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    return Rng(z);
  }

  /// Uniform on [0, 1).
  double uniform() {
    return (engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; caches the second variate.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Circularly symmetric complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_normal() {
    const double s = M_SQRT1_2;
    return {s * normal(), s * normal()};
  }

  /// Unit-modulus complex number with phase uniform on [0, 2*pi).
  std::complex<double> random_phase() {
    const double theta = 2.0 * M_PI * uniform();
    return {std::cos(theta), std::sin(theta)};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace risbc
