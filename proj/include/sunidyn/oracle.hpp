#pragma once
// Brute-force verification: exhaustive index scans, independent certificate
// re-checks, and a sampled transitivity probe. Nothing here shares
// intermediate state with the constructions it checks.

#include <cstdint>
#include <optional>
#include <vector>

#include "sunidyn/certificate.hpp"
#include "sunidyn/operators.hpp"

namespace sunidyn {

struct BestIndex {
  std::uint64_t n = 0;
  double score = 0.0;            // max over operators at n
  std::vector<double> per_op;    // per-operator distances at n
};

// argmin over 1 <= n <= N of max_j distance(T_j^n x, target); ties go to the
// smallest n.
BestIndex best_simultaneous_index(const std::vector<OperatorSpec>& family, const Element& x,
                                  const Element& target, std::uint64_t N, const Metric& metric);

struct CertificateCheck {
  bool ok = false;
  std::vector<double> errors;  // recomputed from scratch
  int offending = -1;          // first operator index over eps, -1 if none
};

CertificateCheck brute_force_certificate_check(const ApproxCertificate& cert,
                                               const std::vector<OperatorSpec>& family,
                                               const Element& target, double eps,
                                               const Metric& metric);

struct BallSpec {
  Element center;
  double radius = 1.0;
};

struct ProbeWitness {
  Element u;
  std::uint64_t n = 0;
  std::uint64_t trial = 0;
};

// Samples `trials` perturbations of U's center (finite support, norm below
// U's radius) and returns the first (u, n) with n <= N and T_j^n u inside V
// for every j. A nullopt is evidence of failure at this search extent, not a
// proof. Bit-deterministic per seed.
std::optional<ProbeWitness> transitivity_probe(const std::vector<OperatorSpec>& family,
                                               const BallSpec& U, const BallSpec& V,
                                               std::uint64_t N, std::uint64_t trials,
                                               std::uint64_t seed, const Metric& metric);

}  // namespace sunidyn
