#pragma once

#include "volseg/rng.hpp"
#include "volseg/types.hpp"

#include <cstring>
#include <string>
#include <vector>

namespace helpers {

// Bitwise equality, the right notion for determinism checks.
inline bool same_bits(const volseg::Vector& a, const volseg::Vector& b) {
  return a.size() == b.size() &&
         (a.size() == 0 || std::memcmp(a.data(), b.data(),
                                       sizeof(double) * static_cast<std::size_t>(a.size())) == 0);
}

inline volseg::Vector gaussian_series(volseg::Index n, std::uint64_t seed,
                                      double sd = 1.0) {
  volseg::Rng rng(seed);
  volseg::Vector x(n);
  for (volseg::Index i = 0; i < n; ++i) x[i] = sd * rng.standard_normal();
  return x;
}

inline std::vector<volseg::Index> cps(const volseg::Segmentation& seg) {
  return seg.change_points;
}

}  // namespace helpers
