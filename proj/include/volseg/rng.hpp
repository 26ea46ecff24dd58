#pragma once

#include <cstdint>
#include <random>

namespace volseg {

// splitmix64 finalizer. Used both as a bit mixer and to derive independent
// per-replicate seeds from (master seed, replicate index).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// Deterministic sampler. The engine is std::mt19937_64, whose output stream
// is fixed by the standard; every distribution below is implemented
// explicitly because the standard library's distribution objects are free to
// differ between implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second variate of each pair is
  // cached so consecutive calls consume the engine in a fixed pattern.
  double standard_normal();

  // Gamma(shape, 1) by Marsaglia-Tsang squeeze; shape < 1 handled by the
  // usual boosting identity.
  double gamma(double shape);

  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

  // Classic ratio construction: Z / sqrt(V / dof) with V ~ chi-square(dof).
  double student_t(double dof) {
    double z = standard_normal();
    double v = chi_square(dof);
    return z / std::sqrt(v / dof);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace volseg
