#pragma once
// Constructive right-inverse maps for each operator family and the
// certificate builder that assembles z = anchor + R_n(target, ..., target),
// searches indices within a budget, and hands every candidate to the oracle
// for independent verification before returning it.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sunidyn/certificate.hpp"
#include "sunidyn/dirichlet.hpp"
#include "sunidyn/operators.hpp"

namespace sunidyn {

struct ShiftRk {
  CoeffVector value;
  bool zero_branch = false;  // index below the target's support length
};

// Block vector for the family lambda_l B^{r_l}: one copy of x scaled by
// lambda_t^{-n} at offset r_t * n for each representative power t (the last
// member of each run of tied powers). Requires the modulus conditions
// (|lambda| > 1, strictly increasing across power jumps, tied within runs).
// Indices below the support length return the zero vector, flagged.
ShiftRk shift_Rk(const CoeffVector& x, std::uint64_t nk_index,
                 const std::vector<std::uint32_t>& rs, const std::vector<cplx>& lambdas);

// Monomial map z^m -> sum_l (1/tau(l)) lambda_l^{-n} z^{m + r_l n} /
// ((m+1)...(m + r_l n)), extended linearly over f, with the denominator
// products accumulated in log space. tau(l) counts members sharing r_l;
// moduli must tie within each run of equal powers.
Polynomial diff_Rk(const Polynomial& f, std::uint64_t nk_index,
                   const std::vector<std::uint32_t>& rs, const std::vector<cplx>& lambdas);

// Exact construction in the exponential basis: for per-symbol targets
// v_i = sum_l c_{i,l} e_{lambda_{i,l}} returns
//   sum_i (1/tau(i)) sum_l c_{i,l} Phi_i(lambda_{i,l})^{-n} e_{lambda_{i,l}},
// where tau(i) is the size of the unimodular-multiple group of symbol i.
// Every exponent must satisfy |Phi_i| > 1 and max_j |Phi_j| <= |Phi_i|.
ExponentialSum conv_Rk(const std::vector<ExponentialSum>& targets, std::uint64_t nk_index,
                       const std::vector<ConvolutionSymbol>& symbols);

// Group indices whose symbols are unimodular multiples of one another
// (coefficientwise Phi_j = zeta * Phi_i with | |zeta| - 1 | within 1e-12).
std::vector<std::vector<std::size_t>> symbol_groups(const std::vector<ConvolutionSymbol>& symbols);

struct RegionGrid {
  double re_min, re_max;
  double im_min, im_max;
  int nx = 1, ny = 1;
};

struct RegionProbeReport {
  static constexpr double kMargin = 1e-6;
  std::vector<cplx> u0_points;                 // max_j |Phi_j| <= 1 - margin
  std::vector<std::vector<cplx>> ui_points;    // per symbol i: |Phi_i| >= 1 + margin
                                               // and dominating all |Phi_j|
};

RegionProbeReport conv_region_probe(const std::vector<ConvolutionSymbol>& symbols,
                                    const RegionGrid& grid);

struct RungePiece {
  DiskRegion region;
  Polynomial target;
  double weight = 1.0;
};

struct RungeFit {
  Polynomial fit;
  std::vector<double> sup_error;  // per piece, measured on a 4x verification grid
  double condition_estimate = 0.0;
  bool ill_conditioned = false;
};

// One polynomial least-squares fitted to all piece targets on boundary
// samples of each disk, with columns scaled by radius powers. Pieces must be
// pairwise disjoint. Ill conditioning is reported, not fatal.
RungeFit runge_fit(const std::vector<RungePiece>& pieces, int degree, int boundary_samples);

struct TranslationTarget {
  Polynomial g;
  cplx step;  // b_l, pairwise distinct and nonzero
  cplx mu;    // scalar of the representative operator with this step
};

struct TranslationResult {
  Polynomial f;
  double origin_error = 0.0;           // sup |f - h| on B(0, r)
  std::vector<double> target_errors;   // sup |mu^n f(z + n b) - g(z)| on B(0, r)
  double condition_estimate = 0.0;
  bool ill_conditioned = false;
  bool meets_eps = false;
};

// Fits one polynomial to h near the origin and to mu_l^{-n} g_l(. - n b_l) on
// the translated disks; n must already separate the disks (the thrown message
// quotes the smallest admissible n when it does not).
TranslationResult translation_construct(const Polynomial& h,
                                        const std::vector<TranslationTarget>& targets,
                                        double r, double eps, int degree, std::uint64_t n,
                                        int boundary_samples = 64);

enum class RkKind { shift, diff, conv, translation };

struct CriterionInstance {
  RkKind kind;
  std::vector<std::uint64_t> nk;  // fully evaluated candidate indices, increasing
};

struct ApproxRequest {
  std::vector<OperatorSpec> family;  // homogeneous kind
  Element target;
  Element anchor;  // same kind as target; zero element if unused
  double eps = 1e-6;
  std::uint64_t budget = 100000;  // largest candidate index
  Metric metric{};
  int fit_degree = 48;    // translation path: fit degree
  int fit_samples = 64;   // translation path: boundary samples per disk
};

struct CertificateOutcome {
  bool success = false;
  std::optional<ApproxCertificate> certificate;  // best candidate seen (also on failure)
  std::uint64_t candidates_tried = 0;            // full evaluations
  std::string diagnostic;
  std::optional<CriterionInstance> criterion;
};

// Searches candidate indices in increasing order, skipping an index only when
// an exact lower bound on its error already exceeds eps, and returns the
// first candidate whose oracle-recomputed errors and anchor distance all fall
// below eps. Budget exhaustion returns the best candidate with a diagnostic.
CertificateOutcome build_certificate(const ApproxRequest& req);

}  // namespace sunidyn
