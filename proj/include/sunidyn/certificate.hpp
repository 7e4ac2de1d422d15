#pragma once

#include <cstdint>
#include <vector>

#include "sunidyn/space.hpp"

namespace sunidyn {

// Finite evidence of simultaneous approximation: a vector x, an index n, and
// per-operator errors distance(T_j^n x, target) together with the distance
// from x to the requested anchor. The stored errors are the ones recomputed
// by the oracle, not the constructor's intermediates.
struct ApproxCertificate {
  Element x;
  std::uint64_t n = 0;
  std::vector<double> per_op_error;
  double anchor_error = 0.0;
};

}  // namespace sunidyn
