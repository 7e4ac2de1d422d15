#include "sunidyn/numeric.hpp"

#include <limits>

namespace sunidyn {

PolarLog polar_log(cplx z) {
  if (z == cplx{0.0, 0.0}) {
    return {-std::numeric_limits<double>::infinity(), 0.0};
  }
  return {std::log(std::abs(z)), std::arg(z)};
}

cplx from_polar_log(const PolarLog& p) {
  if (std::isinf(p.log_mod) && p.log_mod < 0) return {0.0, 0.0};
  return std::polar(std::exp(p.log_mod), p.arg);
}

PolarLog polar_log_pow(cplx z, std::uint64_t n) {
  if (n == 0) return {0.0, 0.0};
  PolarLog base = polar_log(z);
  if (std::isinf(base.log_mod)) return base;
  const double nn = static_cast<double>(n);
  return {nn * base.log_mod, reduce_angle(nn * base.arg)};
}

cplx polar_pow(cplx z, std::uint64_t n) { return from_polar_log(polar_log_pow(z, n)); }

cplx scale_polar(cplx v, const PolarLog& f) {
  if (v == cplx{0.0, 0.0}) return v;
  if (std::isinf(f.log_mod) && f.log_mod < 0) return {0.0, 0.0};
  PolarLog pv = polar_log(v);
  return std::polar(std::exp(pv.log_mod + f.log_mod), pv.arg + f.arg);
}

double reduce_angle(double a) { return std::remainder(a, kTwoPi); }

double frac_mul(double n, double x) {
  const double hi = n * x;
  const double lo = std::fma(n, x, -hi);  // exact residue of the product
  double f = std::fmod(hi, 1.0) + lo;
  f -= std::floor(f);
  if (f >= 1.0) f = 0.0;
  return f;
}

double unimodular_residual(std::uint64_t n, double angle) {
  const double f = frac_mul(static_cast<double>(n), angle);
  const double d = f <= 0.5 ? f : 1.0 - f;
  return 2.0 * std::sin(std::numbers::pi * d);
}

std::uint64_t SplitMix64::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::next_symmetric() { return 2.0 * next_unit() - 1.0; }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL));
  return g.next();
}

}  // namespace sunidyn
