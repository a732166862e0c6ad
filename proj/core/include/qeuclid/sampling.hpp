#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qeuclid/gauss_rational.hpp"

namespace qeuclid {

// Deterministic sample points for the fast verification mode: positive
// rationals s = num/den with s != 1, drawn from a seeded generator. Positive
// s != 1 keeps every constant of the theory pole-free (h, k, omega_i, kappa,
// gamma products) and the braid spectrum nondegenerate.
inline std::vector<GaussRational> sample_points(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(2, 19);
  std::vector<GaussRational> points;
  while (static_cast<int>(points.size()) < count) {
    int num = dist(rng);
    int den = dist(rng);
    if (num == den) continue;
    GaussRational s = GaussRational::from_ratio(num, den);
    bool dup = false;
    for (const auto& p : points) dup = dup || (p == s);
    if (!dup) points.push_back(s);
  }
  return points;
}

}  // namespace qeuclid
