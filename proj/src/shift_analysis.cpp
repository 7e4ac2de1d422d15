#include "sunidyn/shift_analysis.hpp"

#include <cmath>

namespace sunidyn {

namespace {

bool mod_equal(double a, double b) { return std::abs(a - b) <= kModulusTol; }
bool mod_less(double a, double b) { return a < b - kModulusTol; }

void validate_pair(const std::vector<std::uint32_t>& rs, const std::vector<cplx>& lambdas) {
  if (rs.size() != lambdas.size()) throw UsageError("rs and lambdas must have equal length");
  if (rs.size() < 2) throw UsageError("a family needs at least two members");
  for (std::size_t j = 0; j + 1 < rs.size(); ++j) {
    if (rs[j + 1] < rs[j]) throw UsageError("powers must be nondecreasing");
  }
  for (std::size_t j = 0; j < rs.size(); ++j) {
    if (rs[j] < 1) throw UsageError("powers must be >= 1");
    if (lambdas[j] == cplx{0.0, 0.0}) throw UsageError("scalars must be nonzero");
  }
}

}  // namespace

bool ShiftFamily::unweighted() const {
  for (const auto& m : members) {
    if (!m.weights.is_unit()) return false;
  }
  return true;
}

std::optional<std::uint64_t> check_condition_iii(const ShiftFamily& family, double M,
                                                 std::uint32_t k, std::uint64_t m_max) {
  const std::size_t p = family.members.size();
  if (p == 0) throw UsageError("family must be nonempty");
  for (std::size_t l = 0; l + 1 < p; ++l) {
    if (family.members[l + 1].r <= family.members[l].r) {
      throw UsageError("powers must be strictly increasing");
    }
  }
  if (!(M > 0.0)) throw UsageError("M must be positive");
  if (m_max < 1) throw UsageError("m_max must be >= 1");

  const double log_m = std::log(M);
  for (std::uint64_t m = 1; m <= m_max; ++m) {
    bool ok = true;
    for (std::uint64_t j = 0; j <= k && ok; ++j) {
      for (std::size_t l = 0; l < p && ok; ++l) {
        const std::uint64_t rl = family.members[l].r;
        const double grow =
            family.members[l].weights.log_window(j, j + rl * m).first;
        if (!(grow > log_m)) {
          ok = false;
          break;
        }
        for (std::size_t s = 0; s < l; ++s) {
          const std::uint64_t rs = family.members[s].r;
          const double tail = family.members[s]
                                  .weights.log_window(j + (rl - rs) * m, j + rl * m)
                                  .first;
          if (!(grow - tail > log_m)) {
            ok = false;
            break;
          }
        }
      }
    }
    if (ok) return m;
  }
  return std::nullopt;
}

ConditionSweep sweep_condition_iii(const ShiftFamily& family, std::uint32_t k_max,
                                   std::uint64_t m_max) {
  ConditionSweep out;
  for (int e = 1; e <= 6; ++e) {
    const double M = std::pow(10.0, e);
    for (std::uint32_t k = 0; k <= k_max; ++k) {
      auto m = check_condition_iii(family, M, k, m_max);
      if (!m) out.all_found = false;
      out.cells.push_back({M, k, m});
    }
  }
  return out;
}

Decision decide_s_unweighted(const std::vector<std::uint32_t>& rs,
                             const std::vector<cplx>& lambdas) {
  validate_pair(rs, lambdas);
  const std::size_t p = rs.size();
  for (std::size_t j = 0; j < p; ++j) {
    if (!mod_less(1.0, std::abs(lambdas[j]))) {
      return {false, "condition (i) fails: |lambda_" + std::to_string(j + 1) +
                         "| = " + std::to_string(std::abs(lambdas[j])) + " is not > 1"};
    }
  }
  for (std::size_t j = 0; j + 1 < p; ++j) {
    if (rs[j] < rs[j + 1] && !mod_less(std::abs(lambdas[j]), std::abs(lambdas[j + 1]))) {
      return {false, "condition (ii) fails: |lambda_" + std::to_string(j + 1) +
                         "| >= |lambda_" + std::to_string(j + 2) + "| across r_" +
                         std::to_string(j + 1) + " < r_" + std::to_string(j + 2)};
    }
  }
  for (std::size_t j = 0; j + 1 < p; ++j) {
    if (rs[j] == rs[j + 1] && !mod_equal(std::abs(lambdas[j]), std::abs(lambdas[j + 1]))) {
      return {false, "condition (iii) fails: |lambda_" + std::to_string(j + 1) +
                         "| != |lambda_" + std::to_string(j + 2) + "| with r_" +
                         std::to_string(j + 1) + " = r_" + std::to_string(j + 2)};
    }
  }
  return {true, "conditions (i)-(iii) hold"};
}

Decision decide_d_unweighted(const std::vector<std::uint32_t>& rs,
                             const std::vector<cplx>& lambdas) {
  validate_pair(rs, lambdas);
  const std::size_t p = rs.size();
  for (std::size_t j = 0; j + 1 < p; ++j) {
    if (rs[j] == rs[j + 1]) {
      return {false, "powers are not strictly increasing: r_" + std::to_string(j + 1) +
                         " = r_" + std::to_string(j + 2)};
    }
  }
  if (!mod_less(1.0, std::abs(lambdas[0]))) {
    return {false, "|lambda_1| = " + std::to_string(std::abs(lambdas[0])) + " is not > 1"};
  }
  for (std::size_t j = 0; j + 1 < p; ++j) {
    if (!mod_less(std::abs(lambdas[j]), std::abs(lambdas[j + 1]))) {
      return {false, "moduli are not strictly increasing: |lambda_" + std::to_string(j + 1) +
                         "| >= |lambda_" + std::to_string(j + 2) + "|"};
    }
  }
  return {true, "powers and moduli are strictly increasing with |lambda_1| > 1"};
}

}  // namespace sunidyn
