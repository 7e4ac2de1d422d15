#include "sunidyn/operators.hpp"

#include <algorithm>
#include <cmath>

namespace sunidyn {

namespace {

[[noreturn]] void kind_mismatch(const OperatorSpec& op, const Element& x) {
  throw UsageError("operator " + op.kind_name() + " cannot act on a " +
                   element_kind_name(x));
}

}  // namespace

WeightSequence::WeightSequence(Kind kind, std::vector<cplx> values, cplx tail)
    : kind_(kind), values_(std::move(values)), tail_(tail) {
  if (values_.empty()) throw UsageError("weight sequence needs at least one value");
  for (const auto& v : values_) {
    if (v == cplx{0.0, 0.0}) throw UsageError("weight sequence values must be nonzero");
  }
  if (kind_ == Kind::explicit_list && tail_ == cplx{0.0, 0.0}) {
    throw UsageError("weight sequence tail must be nonzero");
  }
  bound_ = 0.0;
  for (const auto& v : values_) bound_ = std::max(bound_, std::abs(v));
  if (kind_ == Kind::explicit_list) bound_ = std::max(bound_, std::abs(tail_));

  prefix_log_.assign(values_.size() + 1, 0.0);
  prefix_arg_.assign(values_.size() + 1, 0.0);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    prefix_log_[i + 1] = prefix_log_[i] + std::log(std::abs(values_[i]));
    prefix_arg_[i + 1] = prefix_arg_[i] + std::arg(values_[i]);
  }
}

WeightSequence WeightSequence::constant(cplx c) {
  return WeightSequence(Kind::constant, {c}, c);
}

WeightSequence WeightSequence::periodic(std::vector<cplx> pattern) {
  return WeightSequence(Kind::periodic, std::move(pattern), {1.0, 0.0});
}

WeightSequence WeightSequence::explicit_list(std::vector<cplx> head, cplx tail) {
  return WeightSequence(Kind::explicit_list, std::move(head), tail);
}

cplx WeightSequence::at(std::uint64_t n) const {
  if (n == 0) throw UsageError("weights are indexed from 1");
  switch (kind_) {
    case Kind::constant: return values_[0];
    case Kind::periodic: return values_[(n - 1) % values_.size()];
    case Kind::explicit_list:
      return n <= values_.size() ? values_[n - 1] : tail_;
  }
  return tail_;
}

bool WeightSequence::is_unit() const {
  const cplx one{1.0, 0.0};
  for (const auto& v : values_) {
    if (v != one) return false;
  }
  return kind_ == Kind::explicit_list ? tail_ == one : true;
}

std::pair<double, double> WeightSequence::log_window(std::uint64_t from,
                                                     std::uint64_t to) const {
  // prefix P(i) = sum over indices 1..i; window (from, to] = P(to) - P(from).
  auto prefix = [&](std::uint64_t i) -> std::pair<double, double> {
    switch (kind_) {
      case Kind::constant:
        return {static_cast<double>(i) * prefix_log_[1],
                static_cast<double>(i) * prefix_arg_[1]};
      case Kind::periodic: {
        const std::uint64_t T = values_.size();
        const double cycles = static_cast<double>(i / T);
        const std::uint64_t rem = i % T;
        return {cycles * prefix_log_[T] + prefix_log_[rem],
                cycles * prefix_arg_[T] + prefix_arg_[rem]};
      }
      case Kind::explicit_list: {
        const std::uint64_t H = values_.size();
        if (i <= H) return {prefix_log_[i], prefix_arg_[i]};
        const double extra = static_cast<double>(i - H);
        return {prefix_log_[H] + extra * std::log(std::abs(tail_)),
                prefix_arg_[H] + extra * std::arg(tail_)};
      }
    }
    return {0.0, 0.0};
  };
  auto [l1, a1] = prefix(to);
  auto [l0, a0] = prefix(from);
  return {l1 - l0, a1 - a0};
}

ConvolutionSymbol::ConvolutionSymbol(std::vector<cplx> c, double A, double B)
    : coeffs(std::move(c)), type_A(A), type_B(B) {
  if (coeffs.empty()) throw UsageError("convolution symbol needs at least one coefficient");
}

cplx ConvolutionSymbol::eval(cplx z) const {
  cplx acc{};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

OperatorSpec OperatorSpec::shift_power(WeightSequence weights, std::uint32_t r, cplx lambda) {
  if (r < 1) throw UsageError("shift power r must be >= 1");
  if (lambda == cplx{0.0, 0.0}) throw UsageError("operator scalar must be nonzero");
  return OperatorSpec(ShiftPowerOp{std::move(weights), r, lambda});
}

OperatorSpec OperatorSpec::diff_power(std::uint32_t r, cplx lambda) {
  if (r < 1) throw UsageError("differentiation power r must be >= 1");
  if (lambda == cplx{0.0, 0.0}) throw UsageError("operator scalar must be nonzero");
  return OperatorSpec(DiffPowerOp{r, lambda});
}

OperatorSpec OperatorSpec::translation(cplx step, cplx lambda) {
  if (step == cplx{0.0, 0.0}) throw UsageError("translation step must be nonzero");
  if (lambda == cplx{0.0, 0.0}) throw UsageError("operator scalar must be nonzero");
  return OperatorSpec(TranslationOp{step, lambda});
}

OperatorSpec OperatorSpec::convolution(ConvolutionSymbol symbol) {
  return OperatorSpec(ConvolutionOp{std::move(symbol)});
}

std::string OperatorSpec::kind_name() const {
  switch (node_.index()) {
    case 0: return "shift_power";
    case 1: return "diff_power";
    case 2: return "translation";
    default: return "convolution";
  }
}

bool OperatorSpec::acts_on(const Element& x) const {
  if (std::holds_alternative<ShiftPowerOp>(node_)) {
    return std::holds_alternative<CoeffVector>(x);
  }
  if (std::holds_alternative<TranslationOp>(node_)) {
    return std::holds_alternative<Polynomial>(x);
  }
  return std::holds_alternative<Polynomial>(x) || std::holds_alternative<ExponentialSum>(x);
}

namespace {

// lambda^n * (product of weights over (m, m+r*n]) as a polar-log factor.
PolarLog shift_factor(const ShiftPowerOp& op, std::uint64_t n, std::uint64_t m) {
  const std::uint64_t width = static_cast<std::uint64_t>(op.r) * n;
  auto [wlog, warg] = op.weights.log_window(m, m + width);
  const PolarLog lam = polar_log_pow(op.lambda, n);
  return {lam.log_mod + wlog, reduce_angle(lam.arg + warg)};
}

CoeffVector shift_iterate(const ShiftPowerOp& op, const CoeffVector& x, std::uint64_t n) {
  const std::uint64_t drop = static_cast<std::uint64_t>(op.r) * n;
  if (drop >= x.support_len()) return CoeffVector{};
  std::vector<cplx> out(x.support_len() - drop);
  for (std::uint64_t m = 0; m < out.size(); ++m) {
    out[m] = scale_polar(x.at(m + drop), shift_factor(op, n, m));
  }
  return CoeffVector(std::move(out));
}

Polynomial diff_iterate(const DiffPowerOp& op, const Polynomial& f, std::uint64_t n) {
  const std::uint64_t drop = static_cast<std::uint64_t>(op.r) * n;
  if (f.is_zero() || drop > static_cast<std::uint64_t>(f.degree())) {
    return Polynomial({}, f.degree_cap());
  }
  const PolarLog lam = polar_log_pow(op.lambda, n);
  std::vector<cplx> out(static_cast<std::size_t>(f.degree()) + 1 - drop);
  for (std::size_t m = 0; m < out.size(); ++m) {
    // (m + drop)! / m! in log space
    const double lfac = std::lgamma(static_cast<double>(m + drop) + 1.0) -
                        std::lgamma(static_cast<double>(m) + 1.0);
    out[m] = scale_polar(f.coeff(static_cast<int>(m + drop)),
                         {lam.log_mod + lfac, lam.arg});
  }
  return Polynomial(std::move(out), f.degree_cap());
}

ExponentialSum diff_iterate_sum(const DiffPowerOp& op, const ExponentialSum& x,
                                std::uint64_t n) {
  std::vector<ExpTerm> terms;
  terms.reserve(x.terms().size());
  const PolarLog lam = polar_log_pow(op.lambda, n);
  for (const auto& t : x.terms()) {
    const PolarLog expo = polar_log_pow(t.exponent, static_cast<std::uint64_t>(op.r) * n);
    terms.push_back({scale_polar(t.coeff, {lam.log_mod + expo.log_mod,
                                           lam.arg + expo.arg}),
                     t.exponent});
  }
  return ExponentialSum(std::move(terms));
}

Polynomial translation_iterate(const TranslationOp& op, const Polynomial& f,
                               std::uint64_t n) {
  const cplx total = static_cast<double>(n) * op.step;
  const PolarLog lam = polar_log_pow(op.lambda, n);
  Polynomial shifted = f.translated(total);
  std::vector<cplx> out = shifted.coeffs();
  for (auto& c : out) c = scale_polar(c, lam);
  return Polynomial(std::move(out), f.degree_cap());
}

// Finite sum of symbol coefficients against derivatives; only coeffs[0..deg f]
// can contribute.
Polynomial convolution_apply_poly(const ConvolutionOp& op, const Polynomial& f) {
  Polynomial acc({}, f.degree_cap());
  Polynomial der = f;
  const int top = std::min(op.symbol.degree(), std::max(f.degree(), 0));
  for (int k = 0; k <= top; ++k) {
    if (k > 0) der = der.derivative();
    if (der.is_zero()) break;
    acc = acc + op.symbol.coeffs[static_cast<std::size_t>(k)] * der;
  }
  return acc;
}

ExponentialSum convolution_iterate_sum(const ConvolutionOp& op, const ExponentialSum& x,
                                       std::uint64_t n) {
  std::vector<ExpTerm> terms;
  terms.reserve(x.terms().size());
  for (const auto& [factor, expo] : convolution_power_polar(op.symbol, x, n)) {
    terms.push_back({from_polar_log(factor), expo});
  }
  return ExponentialSum(std::move(terms));
}

}  // namespace

std::vector<std::pair<PolarLog, cplx>> convolution_power_polar(const ConvolutionSymbol& symbol,
                                                               const ExponentialSum& x,
                                                               std::uint64_t n) {
  std::vector<std::pair<PolarLog, cplx>> out;
  out.reserve(x.terms().size());
  for (const auto& t : x.terms()) {
    const PolarLog eig = polar_log_pow(symbol.eval(t.exponent), n);
    const PolarLog c = polar_log(t.coeff);
    out.push_back({{c.log_mod + eig.log_mod, reduce_angle(c.arg + eig.arg)}, t.exponent});
  }
  return out;
}

Element iterate(const OperatorSpec& op, const Element& x, std::uint64_t n) {
  if (!op.acts_on(x)) kind_mismatch(op, x);
  if (n == 0) return x;
  return std::visit(
      [&](const auto& node) -> Element {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ShiftPowerOp>) {
          return shift_iterate(node, std::get<CoeffVector>(x), n);
        } else if constexpr (std::is_same_v<T, DiffPowerOp>) {
          if (const auto* p = std::get_if<Polynomial>(&x)) return diff_iterate(node, *p, n);
          return diff_iterate_sum(node, std::get<ExponentialSum>(x), n);
        } else if constexpr (std::is_same_v<T, TranslationOp>) {
          return translation_iterate(node, std::get<Polynomial>(x), n);
        } else {
          if (const auto* p = std::get_if<Polynomial>(&x)) {
            Polynomial acc = *p;
            for (std::uint64_t i = 0; i < n; ++i) acc = convolution_apply_poly(node, acc);
            return acc;
          }
          return convolution_iterate_sum(node, std::get<ExponentialSum>(x), n);
        }
      },
      op.node());
}

Element apply(const OperatorSpec& op, const Element& x) { return iterate(op, x, 1); }

std::vector<Element> orbit(const OperatorSpec& op, const Element& x, std::uint64_t N) {
  if (N < 1) throw UsageError("orbit length must be positive");
  std::vector<Element> out;
  out.reserve(N);
  // Convolution on polynomials has no closed-form power; advance incrementally
  // (the n-th entry is still exactly iterate(op, x, n)).
  const bool incremental = std::holds_alternative<ConvolutionOp>(op.node()) &&
                           std::holds_alternative<Polynomial>(x);
  if (incremental) {
    Element cur = x;
    for (std::uint64_t n = 1; n <= N; ++n) {
      cur = apply(op, cur);
      out.push_back(cur);
    }
  } else {
    for (std::uint64_t n = 1; n <= N; ++n) out.push_back(iterate(op, x, n));
  }
  return out;
}

Element apply_operator_polynomial(const std::vector<cplx>& P, const OperatorSpec& op,
                                  const Element& x) {
  if (P.empty()) throw UsageError("operator polynomial must have at least one coefficient");
  if (!op.acts_on(x)) kind_mismatch(op, x);
  Element acc = zero_like(x);
  for (std::size_t k = 0; k < P.size(); ++k) {
    if (P[k] == cplx{0.0, 0.0}) continue;
    Element term = iterate(op, x, k);
    acc = std::visit(
        [&](const auto& a) -> Element {
          using T = std::decay_t<decltype(a)>;
          return a + P[k] * std::get<T>(term);
        },
        acc);
  }
  return acc;
}

}  // namespace sunidyn
