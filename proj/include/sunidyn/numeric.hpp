#pragma once
// Numeric helpers shared across modules: polar-form powers (so |z| > 1 raised
// to large exponents neither overflows nor loses its phase), accurate
// fractional parts for unit-circle scans, and a tiny deterministic RNG.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace sunidyn {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// value = exp(log_mod) * e^{i*arg}; log_mod = -inf encodes zero.
struct PolarLog {
  double log_mod = 0.0;
  double arg = 0.0;
};

PolarLog polar_log(cplx z);
cplx from_polar_log(const PolarLog& p);

// z^n with the modulus in log space and the argument reduced mod 2*pi.
PolarLog polar_log_pow(cplx z, std::uint64_t n);
cplx polar_pow(cplx z, std::uint64_t n);

// v * exp(f.log_mod) * e^{i*f.arg}, combined in log space so that factors of
// opposite magnitude cancel before exponentiation.
cplx scale_polar(cplx v, const PolarLog& f);

// Reduce an angle into (-pi, pi].
double reduce_angle(double a);

// frac(n * x) in [0,1), with the product split exactly via fma so that the
// result reflects the stored double x even when n is in the millions.
double frac_mul(double n, double x);

// |e^{2 pi i n theta} - 1|, computed as 2*sin(pi * frac-distance).
double unimodular_residual(std::uint64_t n, double angle);

// splitmix64: stable across platforms, used wherever determinism per seed is
// part of the contract.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double next_unit();       // [0, 1)
  double next_symmetric();  // [-1, 1)

 private:
  std::uint64_t state_;
};

// Derive an independent stream seed from (seed, stream index).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace sunidyn
