#pragma once
// Value types for the ambient spaces: finitely supported sequence vectors,
// complex polynomials with a configurable degree cap, finite exponential
// sums, and the norms used as distance surrogates on each of them.

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sunidyn/errors.hpp"
#include "sunidyn/numeric.hpp"

namespace sunidyn {

enum class SpaceKind { c0, ellq };

struct SpaceSpec {
  SpaceKind kind = SpaceKind::ellq;
  double q = 2.0;  // only meaningful for ellq

  static SpaceSpec c0();
  static SpaceSpec ellq(double q);  // requires q >= 1
};

// Finitely supported sequence (x_0, x_1, ...); zeros beyond the stored list
// are implicit and trailing zeros are trimmed on construction.
class CoeffVector {
 public:
  CoeffVector() = default;
  explicit CoeffVector(std::vector<cplx> coeffs);
  static CoeffVector basis(std::size_t n);  // e_n

  const std::vector<cplx>& coeffs() const { return coeffs_; }
  std::size_t support_len() const { return coeffs_.size(); }
  cplx at(std::size_t n) const { return n < coeffs_.size() ? coeffs_[n] : cplx{}; }
  bool is_zero() const { return coeffs_.empty(); }

  friend CoeffVector operator+(const CoeffVector& a, const CoeffVector& b);
  friend CoeffVector operator-(const CoeffVector& a, const CoeffVector& b);
  friend CoeffVector operator*(cplx s, const CoeffVector& a);

 private:
  std::vector<cplx> coeffs_;
};

// Complex polynomial sum coeff[m] * z^m. The degree cap bounds every
// construction that grows the degree; exceeding it raises CapacityError.
class Polynomial {
 public:
  static constexpr int kDefaultDegreeCap = 512;

  Polynomial() = default;
  explicit Polynomial(std::vector<cplx> coeffs, int degree_cap = kDefaultDegreeCap);
  static Polynomial monomial(int m, cplx c = {1.0, 0.0}, int degree_cap = kDefaultDegreeCap);

  const std::vector<cplx>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }  // -1 == zero
  int degree_cap() const { return degree_cap_; }
  cplx coeff(int m) const {
    return (m >= 0 && m < static_cast<int>(coeffs_.size())) ? coeffs_[m] : cplx{};
  }
  bool is_zero() const { return coeffs_.empty(); }

  cplx eval(cplx z) const;
  Polynomial derivative() const;
  // f(z + a), expanded back into monomial coefficients.
  Polynomial translated(cplx a) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(cplx s, const Polynomial& a);

 private:
  std::vector<cplx> coeffs_;
  int degree_cap_ = kDefaultDegreeCap;
};

struct ExpTerm {
  cplx coeff;
  cplx exponent;
};

// Finite sum of c * exp(lambda * z); equal exponents are merged and the term
// list kept in a canonical order.
class ExponentialSum {
 public:
  ExponentialSum() = default;
  explicit ExponentialSum(std::vector<ExpTerm> terms);

  const std::vector<ExpTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  cplx eval(cplx z) const;

  friend ExponentialSum operator+(const ExponentialSum& a, const ExponentialSum& b);
  friend ExponentialSum operator-(const ExponentialSum& a, const ExponentialSum& b);
  friend ExponentialSum operator*(cplx s, const ExponentialSum& a);

 private:
  std::vector<ExpTerm> terms_;
};

struct DiskRegion {
  cplx center;
  double radius;
  DiskRegion(cplx c, double r);  // requires r > 0
};

double seq_norm(const CoeffVector& x, const SpaceSpec& space);

// Max of |f| over `samples` equispaced points on the boundary circle; the
// maximum principle makes boundary sampling the right surrogate. samples >= 8.
double poly_sup_norm(const Polynomial& f, const DiskRegion& disk, int samples);

cplx exp_sum_eval(const ExponentialSum& s, cplx z);

struct ExpTruncation {
  Polynomial poly;
  int degree = 0;
  // (|c_l|, |lambda_l|) pairs retained so the Taylor remainder can be bounded
  // on any disk radius after the fact.
  std::vector<std::pair<double, double>> term_mods;

  // Bound on |sum - poly| for |z| <= radius:
  //   sum_l |c_l| (|lambda_l| R)^{d+1} / (d+1)! * e^{|lambda_l| R}.
  double error_bound(double radius) const;
};

ExpTruncation exp_sum_truncate(const ExponentialSum& s, int degree,
                               int degree_cap = Polynomial::kDefaultDegreeCap);

using Element = std::variant<CoeffVector, Polynomial, ExponentialSum>;

// One consistent metric surrogate per element kind: sequence norm for
// vectors, disk sup norm for polynomials, truncation + disk sup norm for
// exponential sums (the truncation bound is added to the reported value).
struct Metric {
  SpaceSpec space{};
  DiskRegion disk{cplx{0.0, 0.0}, 1.0};
  int samples = 256;
  int trunc_degree = 64;
};

double element_norm(const Element& a, const Metric& m);
double distance(const Element& a, const Element& b, const Metric& m);

std::string element_kind_name(const Element& e);
Element zero_like(const Element& e);

}  // namespace sunidyn
