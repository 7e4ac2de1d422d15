#include "sunidyn/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace sunidyn {

namespace {

void validate_family(const std::vector<OperatorSpec>& family, const Element& x) {
  if (family.empty()) throw UsageError("family must be nonempty");
  for (const auto& op : family) {
    if (!op.acts_on(x)) {
      throw UsageError("operator " + op.kind_name() + " cannot act on a " +
                       element_kind_name(x));
    }
  }
}

// Random finite-support perturbation of the ball center with norm strictly
// inside `radius` under the configured metric.
Element sample_in_ball(const BallSpec& ball, const Metric& metric, SplitMix64& rng) {
  const double shrink = 0.98 * rng.next_unit();
  Element pert = std::visit(
      [&](const auto& center) -> Element {
        using T = std::decay_t<decltype(center)>;
        if constexpr (std::is_same_v<T, CoeffVector>) {
          const std::size_t len = center.support_len() + 4;
          std::vector<cplx> c(len);
          for (auto& v : c) v = {rng.next_symmetric(), rng.next_symmetric()};
          return CoeffVector(std::move(c));
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          std::vector<cplx> c(9);
          for (auto& v : c) v = {rng.next_symmetric(), rng.next_symmetric()};
          return Polynomial(std::move(c), center.degree_cap());
        } else {
          std::vector<ExpTerm> terms;
          for (const auto& t : center.terms()) {
            terms.push_back({cplx{rng.next_symmetric(), rng.next_symmetric()}, t.exponent});
          }
          terms.push_back({cplx{rng.next_symmetric(), rng.next_symmetric()}, cplx{}});
          return ExponentialSum(std::move(terms));
        }
      },
      ball.center);
  const double norm = element_norm(pert, metric);
  const cplx scale = norm > 0.0 ? cplx{ball.radius * shrink / norm, 0.0} : cplx{};
  return std::visit(
      [&](const auto& center) -> Element {
        using T = std::decay_t<decltype(center)>;
        return center + scale * std::get<T>(pert);
      },
      ball.center);
}

}  // namespace

BestIndex best_simultaneous_index(const std::vector<OperatorSpec>& family, const Element& x,
                                  const Element& target, std::uint64_t N,
                                  const Metric& metric) {
  validate_family(family, x);
  if (N < 1) throw UsageError("N must be >= 1");
  BestIndex best;
  for (std::uint64_t n = 1; n <= N; ++n) {
    std::vector<double> per_op;
    per_op.reserve(family.size());
    double score = 0.0;
    for (const auto& op : family) {
      per_op.push_back(distance(iterate(op, x, n), target, metric));
      score = std::max(score, per_op.back());
    }
    if (best.per_op.empty() || score < best.score) {
      best = {n, score, std::move(per_op)};
    }
  }
  return best;
}

CertificateCheck brute_force_certificate_check(const ApproxCertificate& cert,
                                               const std::vector<OperatorSpec>& family,
                                               const Element& target, double eps,
                                               const Metric& metric) {
  validate_family(family, cert.x);
  CertificateCheck out;
  out.ok = true;
  for (std::size_t j = 0; j < family.size(); ++j) {
    out.errors.push_back(distance(iterate(family[j], cert.x, cert.n), target, metric));
    if (!(out.errors.back() < eps) && out.ok) {
      out.ok = false;
      out.offending = static_cast<int>(j);
    }
  }
  return out;
}

std::optional<ProbeWitness> transitivity_probe(const std::vector<OperatorSpec>& family,
                                               const BallSpec& U, const BallSpec& V,
                                               std::uint64_t N, std::uint64_t trials,
                                               std::uint64_t seed, const Metric& metric) {
  validate_family(family, U.center);
  if (trials < 1) throw UsageError("trials must be >= 1");
  if (!(U.radius > 0.0) || !(V.radius > 0.0)) throw UsageError("ball radii must be positive");
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    SplitMix64 rng(mix_seed(seed, trial));
    const Element u = sample_in_ball(U, metric, rng);
    for (std::uint64_t n = 1; n <= N; ++n) {
      bool inside = true;
      for (const auto& op : family) {
        if (!(distance(iterate(op, u, n), V.center, metric) < V.radius)) {
          inside = false;
          break;
        }
      }
      if (inside) return ProbeWitness{u, n, trial};
    }
  }
  return std::nullopt;
}

}  // namespace sunidyn
