#pragma once
// Operator descriptions and their action on space elements: weighted
// backward-shift powers on sequence vectors, differentiation powers,
// translations and convolution operators on polynomials / exponential sums.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sunidyn/space.hpp"

namespace sunidyn {

// Generator-backed weight sequence a_1, a_2, ... (1-based, every term
// nonzero, |a_n| <= bound). Backed by a generator rather than a stored list
// so that windows far beyond any fixed prefix stay cheap to query.
class WeightSequence {
 public:
  enum class Kind { constant, periodic, explicit_list };

  static WeightSequence constant(cplx c);
  static WeightSequence periodic(std::vector<cplx> pattern);
  static WeightSequence explicit_list(std::vector<cplx> head, cplx tail);

  cplx at(std::uint64_t n) const;  // a_n, n >= 1
  double bound() const { return bound_; }
  bool is_unit() const;  // identically 1

  Kind kind() const { return kind_; }
  const std::vector<cplx>& values() const { return values_; }
  cplx tail() const { return tail_; }

  // (sum of log|a_i|, sum of arg a_i) over the window i in (from, to],
  // answered in O(1) from per-kind closed forms.
  std::pair<double, double> log_window(std::uint64_t from, std::uint64_t to) const;

 private:
  WeightSequence(Kind kind, std::vector<cplx> values, cplx tail);

  Kind kind_;
  std::vector<cplx> values_;  // constant: {c}; periodic: pattern; explicit: head
  cplx tail_{1.0, 0.0};
  double bound_ = 0.0;
  std::vector<double> prefix_log_;  // over values_, prefix_log_[i] = sum of first i
  std::vector<double> prefix_arg_;
};

// Finite power-series coefficients of an entire symbol of exponential type;
// the (A, B) constants are carried as metadata.
struct ConvolutionSymbol {
  std::vector<cplx> coeffs;
  double type_A = 1.0;
  double type_B = 1.0;

  explicit ConvolutionSymbol(std::vector<cplx> c, double A = 1.0, double B = 1.0);
  cplx eval(cplx z) const;
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

struct ShiftPowerOp {
  WeightSequence weights;
  std::uint32_t r;
  cplx lambda;
};
struct DiffPowerOp {
  std::uint32_t r;
  cplx lambda;
};
struct TranslationOp {
  cplx step;
  cplx lambda;
};
struct ConvolutionOp {
  ConvolutionSymbol symbol;
};

class OperatorSpec {
 public:
  using Node = std::variant<ShiftPowerOp, DiffPowerOp, TranslationOp, ConvolutionOp>;

  static OperatorSpec shift_power(WeightSequence weights, std::uint32_t r, cplx lambda);
  static OperatorSpec diff_power(std::uint32_t r, cplx lambda);
  static OperatorSpec translation(cplx step, cplx lambda);
  static OperatorSpec convolution(ConvolutionSymbol symbol);

  const Node& node() const { return node_; }
  std::string kind_name() const;
  bool acts_on(const Element& x) const;

 private:
  explicit OperatorSpec(Node node) : node_(std::move(node)) {}
  Node node_;
};

Element apply(const OperatorSpec& op, const Element& x);

// n-fold application. Shift powers and the diagonal action of convolution
// operators on exponential sums are evaluated in closed form with moduli in
// log space, so large n neither overflows nor drifts in phase.
Element iterate(const OperatorSpec& op, const Element& x, std::uint64_t n);

std::vector<Element> orbit(const OperatorSpec& op, const Element& x, std::uint64_t N);

// sum_k P[k] * T^k x.
Element apply_operator_polynomial(const std::vector<cplx>& P, const OperatorSpec& op,
                                  const Element& x);

// Per-term polar factors of Phi(D)^n on an exponential sum: for each term
// (c, lambda) the new coefficient is c * Phi(lambda)^n, reported as
// (PolarLog of the coefficient, lambda) without exponentiating.
std::vector<std::pair<PolarLog, cplx>> convolution_power_polar(const ConvolutionSymbol& symbol,
                                                               const ExponentialSum& x,
                                                               std::uint64_t n);

}  // namespace sunidyn
