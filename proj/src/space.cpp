#include "sunidyn/space.hpp"

#include <algorithm>
#include <cmath>

namespace sunidyn {

namespace {

void trim_trailing_zeros(std::vector<cplx>& v) {
  while (!v.empty() && v.back() == cplx{0.0, 0.0}) v.pop_back();
}

}  // namespace

SpaceSpec SpaceSpec::c0() { return {SpaceKind::c0, 0.0}; }

SpaceSpec SpaceSpec::ellq(double q) {
  if (!(q >= 1.0)) throw UsageError("ell_q space requires q >= 1");
  return {SpaceKind::ellq, q};
}

CoeffVector::CoeffVector(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  trim_trailing_zeros(coeffs_);
}

CoeffVector CoeffVector::basis(std::size_t n) {
  std::vector<cplx> c(n + 1, cplx{});
  c[n] = {1.0, 0.0};
  return CoeffVector(std::move(c));
}

CoeffVector operator+(const CoeffVector& a, const CoeffVector& b) {
  std::vector<cplx> out(std::max(a.coeffs_.size(), b.coeffs_.size()), cplx{});
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) + b.at(i);
  return CoeffVector(std::move(out));
}

CoeffVector operator-(const CoeffVector& a, const CoeffVector& b) {
  return a + cplx{-1.0, 0.0} * b;
}

CoeffVector operator*(cplx s, const CoeffVector& a) {
  std::vector<cplx> out = a.coeffs_;
  for (auto& c : out) c *= s;
  return CoeffVector(std::move(out));
}

Polynomial::Polynomial(std::vector<cplx> coeffs, int degree_cap)
    : coeffs_(std::move(coeffs)), degree_cap_(degree_cap) {
  if (degree_cap_ < 1) throw UsageError("degree cap must be positive");
  trim_trailing_zeros(coeffs_);
  if (degree() > degree_cap_) {
    throw CapacityError("polynomial degree " + std::to_string(degree()) +
                        " exceeds cap " + std::to_string(degree_cap_));
  }
}

Polynomial Polynomial::monomial(int m, cplx c, int degree_cap) {
  if (m < 0) throw UsageError("monomial degree must be nonnegative");
  std::vector<cplx> v(static_cast<std::size_t>(m) + 1, cplx{});
  v[static_cast<std::size_t>(m)] = c;
  return Polynomial(std::move(v), degree_cap);
}

cplx Polynomial::eval(cplx z) const {
  cplx acc{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial({}, degree_cap_);
  std::vector<cplx> out(coeffs_.size() - 1);
  for (std::size_t m = 0; m + 1 < coeffs_.size(); ++m) {
    out[m] = static_cast<double>(m + 1) * coeffs_[m + 1];
  }
  return Polynomial(std::move(out), degree_cap_);
}

Polynomial Polynomial::translated(cplx a) const {
  if (coeffs_.empty()) return *this;
  const int d = degree();
  std::vector<cplx> out(coeffs_.size(), cplx{});
  for (int j = 0; j <= d; ++j) {
    // c_j (z+a)^j contributes c_j * C(j,m) a^{j-m} to coefficient m.
    cplx term = coeffs_[static_cast<std::size_t>(j)];  // C(j,j) a^0
    out[static_cast<std::size_t>(j)] += term;
    for (int m = j - 1; m >= 0; --m) {
      term *= a * (static_cast<double>(m + 1) / static_cast<double>(j - m));
      out[static_cast<std::size_t>(m)] += term;
    }
  }
  return Polynomial(std::move(out), degree_cap_);
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<cplx> out(std::max(a.coeffs_.size(), b.coeffs_.size()), cplx{});
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
  }
  return Polynomial(std::move(out), std::max(a.degree_cap_, b.degree_cap_));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  return a + cplx{-1.0, 0.0} * b;
}

Polynomial operator*(cplx s, const Polynomial& a) {
  std::vector<cplx> out = a.coeffs_;
  for (auto& c : out) c *= s;
  return Polynomial(std::move(out), a.degree_cap_);
}

ExponentialSum::ExponentialSum(std::vector<ExpTerm> terms) {
  std::sort(terms.begin(), terms.end(), [](const ExpTerm& a, const ExpTerm& b) {
    if (a.exponent.real() != b.exponent.real()) return a.exponent.real() < b.exponent.real();
    return a.exponent.imag() < b.exponent.imag();
  });
  for (const auto& t : terms) {
    if (!terms_.empty() && terms_.back().exponent == t.exponent) {
      terms_.back().coeff += t.coeff;
    } else {
      terms_.push_back(t);
    }
  }
  std::erase_if(terms_, [](const ExpTerm& t) { return t.coeff == cplx{0.0, 0.0}; });
}

cplx ExponentialSum::eval(cplx z) const {
  cplx acc{};
  for (const auto& t : terms_) acc += t.coeff * std::exp(t.exponent * z);
  return acc;
}

ExponentialSum operator+(const ExponentialSum& a, const ExponentialSum& b) {
  std::vector<ExpTerm> terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return ExponentialSum(std::move(terms));
}

ExponentialSum operator-(const ExponentialSum& a, const ExponentialSum& b) {
  return a + cplx{-1.0, 0.0} * b;
}

ExponentialSum operator*(cplx s, const ExponentialSum& a) {
  std::vector<ExpTerm> terms = a.terms_;
  for (auto& t : terms) t.coeff *= s;
  return ExponentialSum(std::move(terms));
}

DiskRegion::DiskRegion(cplx c, double r) : center(c), radius(r) {
  if (!(r > 0.0)) throw UsageError("disk radius must be positive");
}

double seq_norm(const CoeffVector& x, const SpaceSpec& space) {
  if (space.kind == SpaceKind::c0) {
    double sup = 0.0;
    for (const auto& c : x.coeffs()) sup = std::max(sup, std::abs(c));
    return sup;
  }
  if (!(space.q >= 1.0)) throw UsageError("ell_q space requires q >= 1");
  if (space.q == 2.0) {
    double s = 0.0;
    for (const auto& c : x.coeffs()) s += std::norm(c);
    return std::sqrt(s);
  }
  double s = 0.0;
  for (const auto& c : x.coeffs()) s += std::pow(std::abs(c), space.q);
  return std::pow(s, 1.0 / space.q);
}

double poly_sup_norm(const Polynomial& f, const DiskRegion& disk, int samples) {
  if (samples < 8) throw UsageError("poly_sup_norm needs at least 8 boundary samples");
  double sup = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double ang = kTwoPi * static_cast<double>(k) / static_cast<double>(samples);
    const cplx z = disk.center + disk.radius * std::polar(1.0, ang);
    sup = std::max(sup, std::abs(f.eval(z)));
  }
  return sup;
}

cplx exp_sum_eval(const ExponentialSum& s, cplx z) { return s.eval(z); }

double ExpTruncation::error_bound(double radius) const {
  double bound = 0.0;
  for (const auto& [cm, lm] : term_mods) {
    if (cm == 0.0 || lm * radius == 0.0) continue;
    const double x = lm * radius;
    const double log_term = static_cast<double>(degree + 1) * std::log(x) -
                            std::lgamma(static_cast<double>(degree + 2)) + x;
    bound += cm * std::exp(log_term);
  }
  return bound;
}

ExpTruncation exp_sum_truncate(const ExponentialSum& s, int degree, int degree_cap) {
  if (degree < 1) throw UsageError("truncation degree must be positive");
  if (degree > degree_cap) {
    throw CapacityError("truncation degree " + std::to_string(degree) +
                        " exceeds cap " + std::to_string(degree_cap));
  }
  std::vector<cplx> coeffs(static_cast<std::size_t>(degree) + 1, cplx{});
  ExpTruncation out;
  for (const auto& t : s.terms()) {
    cplx term = t.coeff;  // c * lambda^m / m!, built incrementally
    coeffs[0] += term;
    for (int m = 1; m <= degree; ++m) {
      term *= t.exponent / static_cast<double>(m);
      coeffs[static_cast<std::size_t>(m)] += term;
    }
    out.term_mods.emplace_back(std::abs(t.coeff), std::abs(t.exponent));
  }
  out.poly = Polynomial(std::move(coeffs), degree_cap);
  out.degree = degree;
  return out;
}

double element_norm(const Element& a, const Metric& m) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CoeffVector>) {
          return seq_norm(v, m.space);
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          return poly_sup_norm(v, m.disk, m.samples);
        } else {
          const ExpTruncation tr = exp_sum_truncate(v, m.trunc_degree);
          const double reach = std::abs(m.disk.center) + m.disk.radius;
          return poly_sup_norm(tr.poly, m.disk, m.samples) + tr.error_bound(reach);
        }
      },
      a);
}

double distance(const Element& a, const Element& b, const Metric& m) {
  if (a.index() != b.index()) {
    throw UsageError("distance requires elements of the same kind, got " +
                     element_kind_name(a) + " and " + element_kind_name(b));
  }
  return std::visit(
      [&](const auto& va) -> double {
        using T = std::decay_t<decltype(va)>;
        return element_norm(Element{va - std::get<T>(b)}, m);
      },
      a);
}

std::string element_kind_name(const Element& e) {
  switch (e.index()) {
    case 0: return "coeff_vector";
    case 1: return "polynomial";
    default: return "exp_sum";
  }
}

Element zero_like(const Element& e) {
  return std::visit([](const auto& v) -> Element { return std::decay_t<decltype(v)>{}; }, e);
}

}  // namespace sunidyn
