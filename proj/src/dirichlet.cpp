#include "sunidyn/dirichlet.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "sunidyn/numeric.hpp"

namespace sunidyn {

UnimodularSet::UnimodularSet(std::vector<double> a) : angles(std::move(a)) {
  if (angles.empty()) throw UsageError("unimodular set must be nonempty");
  for (double t : angles) {
    if (!(t >= 0.0 && t < 1.0)) {
      throw UsageError("angles must lie in [0, 1)");
    }
  }
}

double set_residual(const UnimodularSet& set, std::uint64_t n) {
  double worst = 0.0;
  for (double t : set.angles) worst = std::max(worst, unimodular_residual(n, t));
  return worst;
}

unsigned scan_thread_count() {
  const char* env = std::getenv("SUNIDYN_THREADS");
  if (!env) return 1;
  const long v = std::atol(env);
  if (v <= 1) return 1;
  return static_cast<unsigned>(std::min<long>(v, 256));
}

namespace {

std::optional<std::uint64_t> scan_block(const UnimodularSet& set, double eps,
                                        std::uint64_t lo, std::uint64_t hi) {
  for (std::uint64_t n = lo; n <= hi; ++n) {
    if (set_residual(set, n) < eps) return n;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::uint64_t> find_return(const UnimodularSet& set, double eps,
                                         std::uint64_t n_min, std::uint64_t n_max) {
  if (!(eps > 0.0)) throw UsageError("eps must be positive");
  if (n_min < 1 || n_min > n_max) throw UsageError("need 1 <= n_min <= n_max");

  const unsigned workers = scan_thread_count();
  if (workers <= 1) return scan_block(set, eps, n_min, n_max);

  // Blocks processed in order; within a block each worker takes a stripe and
  // reports its smallest hit, so the global minimum is unchanged.
  constexpr std::uint64_t kBlock = 1 << 16;
  for (std::uint64_t lo = n_min; lo <= n_max; lo += kBlock) {
    const std::uint64_t hi = std::min(n_max, lo + kBlock - 1);
    const std::uint64_t len = hi - lo + 1;
    const std::uint64_t stripe = (len + workers - 1) / workers;
    std::vector<std::optional<std::uint64_t>> hits(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t a = lo + static_cast<std::uint64_t>(w) * stripe;
      if (a > hi) break;
      const std::uint64_t b = std::min(hi, a + stripe - 1);
      pool.emplace_back([&, w, a, b] { hits[w] = scan_block(set, eps, a, b); });
    }
    for (auto& t : pool) t.join();
    std::optional<std::uint64_t> best;
    for (const auto& h : hits) {
      if (h && (!best || *h < *best)) best = h;
    }
    if (best) return best;
  }
  return std::nullopt;
}

ReturnSearch find_return_sequence(const UnimodularSet& set,
                                  const std::vector<double>& eps_schedule,
                                  std::uint64_t n_max) {
  if (eps_schedule.empty()) throw UsageError("eps schedule must be nonempty");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    if (!(eps_schedule[k] > 0.0)) throw UsageError("eps schedule entries must be positive");
    if (k > 0 && eps_schedule[k] > eps_schedule[k - 1]) {
      throw UsageError("eps schedule must be nonincreasing");
    }
  }
  ReturnSearch out;
  std::uint64_t from = 1;
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    if (from > n_max) {
      out.complete = false;
      out.diagnostic = "stage " + std::to_string(k) + " starts beyond n_max " +
                       std::to_string(n_max);
      return out;
    }
    const auto hit = find_return(set, eps_schedule[k], from, n_max);
    if (!hit) {
      out.complete = false;
      out.diagnostic = "stage " + std::to_string(k) + " (eps " +
                       std::to_string(eps_schedule[k]) + ") exhausted n_max " +
                       std::to_string(n_max);
      return out;
    }
    out.sequence.indices.push_back(*hit);
    out.sequence.residuals.push_back(set_residual(set, *hit));
    from = *hit + 1;
  }
  return out;
}

std::vector<double> default_eps_schedule(std::size_t stages) {
  std::vector<double> s(stages);
  double eps = 0.5;
  for (std::size_t k = 0; k < stages; ++k) {
    s[k] = std::max(eps, 1e-18);
    eps *= 0.5;
  }
  return s;
}

}  // namespace sunidyn
