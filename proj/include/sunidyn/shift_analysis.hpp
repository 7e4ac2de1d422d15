#pragma once
// Decision procedures for families of backward-shift powers: the weight
// growth condition for general weighted families with strictly increasing
// powers, and the exact modulus characterization for scalar multiples of the
// unweighted shift with nondecreasing powers.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sunidyn/operators.hpp"

namespace sunidyn {

// Modulus comparisons treat |a - b| <= kModulusTol as equality.
inline constexpr double kModulusTol = 1e-12;

struct WeightedPower {
  WeightSequence weights;
  std::uint32_t r;
};

struct ShiftFamily {
  std::vector<WeightedPower> members;
  bool unweighted() const;  // every weight generator identically 1
};

// Smallest m <= m_max such that for every j in {0..k} and every member l:
//   log|a_{l,j+1} ... a_{l,j+r_l m}| > log M, and for every s < l
//   log|a_{l,j+1} ... a_{l,j+r_l m}| - log|a_{s,j+(r_l-r_s)m+1} ... a_{s,j+r_l m}| > log M.
// Requires strictly increasing powers. The quantifier over all (M, k) is not
// decidable from finite data; this is the bounded probe, and
// sweep_condition_iii runs it over a grid.
std::optional<std::uint64_t> check_condition_iii(const ShiftFamily& family, double M,
                                                 std::uint32_t k, std::uint64_t m_max);

struct ConditionSweepCell {
  double M;
  std::uint32_t k;
  std::optional<std::uint64_t> m;
};

struct ConditionSweep {
  std::vector<ConditionSweepCell> cells;
  bool all_found = true;
};

// Grid M in {10^1, ..., 10^6}, k in {0, ..., k_max}.
ConditionSweep sweep_condition_iii(const ShiftFamily& family, std::uint32_t k_max,
                                   std::uint64_t m_max);

struct Decision {
  bool value;
  std::string reason;
};

// Family lambda_l B^{r_l} with nondecreasing rs, p >= 2. True iff
//  (i)   |lambda_j| > 1 for all j,
//  (ii)  |lambda_j| < |lambda_{j+1}| whenever r_j < r_{j+1},
//  (iii) |lambda_j| = |lambda_{j+1}| whenever r_j = r_{j+1}.
Decision decide_s_unweighted(const std::vector<std::uint32_t>& rs,
                             const std::vector<cplx>& lambdas);

// True iff rs strictly increasing and 1 < |lambda_1| < ... < |lambda_p|.
Decision decide_d_unweighted(const std::vector<std::uint32_t>& rs,
                             const std::vector<cplx>& lambdas);

}  // namespace sunidyn
