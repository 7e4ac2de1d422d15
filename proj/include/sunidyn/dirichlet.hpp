#pragma once
// Simultaneous return times for finite sets of unimodular scalars: the
// smallest n with max_j |exp(2 pi i n angle_j) - 1| below a threshold,
// found by exhaustive scan (optionally partitioned across workers).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sunidyn/errors.hpp"

namespace sunidyn {

struct UnimodularSet {
  std::vector<double> angles;  // each in [0, 1); scalar c_j = exp(2 pi i angle_j)

  explicit UnimodularSet(std::vector<double> a);
};

// max_j |c_j^n - 1|, evaluated freshly (no caching).
double set_residual(const UnimodularSet& set, std::uint64_t n);

// Smallest n in [n_min, n_max] with residual < eps, or nullopt. The scan is
// partitioned into blocks when SUNIDYN_THREADS > 1; the result is the global
// minimum either way.
std::optional<std::uint64_t> find_return(const UnimodularSet& set, double eps,
                                         std::uint64_t n_min, std::uint64_t n_max);

struct ReturnSequence {
  std::vector<std::uint64_t> indices;  // strictly increasing
  std::vector<double> residuals;       // residual at each index
};

struct ReturnSearch {
  ReturnSequence sequence;
  bool complete = true;
  std::string diagnostic;  // set when a stage exhausted n_max
};

// One index per schedule entry, each searched strictly beyond the previous
// index. Exhaustion is reported with the partial sequence, never hidden.
// The schedule must be nonincreasing.
ReturnSearch find_return_sequence(const UnimodularSet& set,
                                  const std::vector<double>& eps_schedule,
                                  std::uint64_t n_max);

// eps_0 / 2^k with eps_0 = 0.5 (floored at 1e-18).
std::vector<double> default_eps_schedule(std::size_t stages);

// Worker cap from SUNIDYN_THREADS (default 1).
unsigned scan_thread_count();

}  // namespace sunidyn
