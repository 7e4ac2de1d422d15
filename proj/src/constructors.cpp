#include "sunidyn/constructors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "sunidyn/oracle.hpp"
#include "sunidyn/shift_analysis.hpp"

namespace sunidyn {

namespace {

void validate_pairs(const std::vector<std::uint32_t>& rs, const std::vector<cplx>& lambdas) {
  if (rs.empty() || rs.size() != lambdas.size()) {
    throw UsageError("rs and lambdas must be nonempty and of equal length");
  }
  for (std::size_t j = 0; j < rs.size(); ++j) {
    if (rs[j] < 1) throw UsageError("powers must be >= 1");
    if (lambdas[j] == cplx{0.0, 0.0}) throw UsageError("scalars must be nonzero");
  }
}

// Modulus conditions behind the block construction, stated for any p >= 1:
// all moduli > 1, strictly increasing across power jumps, tied within runs.
void validate_modulus_conditions(const std::vector<std::uint32_t>& rs,
                                 const std::vector<cplx>& lambdas) {
  validate_pairs(rs, lambdas);
  for (std::size_t j = 0; j + 1 < rs.size(); ++j) {
    if (rs[j + 1] < rs[j]) throw UsageError("powers must be nondecreasing");
  }
  if (rs.size() >= 2) {
    Decision d = decide_s_unweighted(rs, lambdas);
    if (!d.value) throw UsageError("family is not constructible: " + d.reason);
    return;
  }
  if (!(std::abs(lambdas[0]) > 1.0 + kModulusTol)) {
    throw UsageError("family is not constructible: |lambda| must exceed 1");
  }
}

// Last index of each run of tied powers (requires nondecreasing rs).
std::vector<std::size_t> block_representatives(const std::vector<std::uint32_t>& rs) {
  std::vector<std::size_t> reps;
  for (std::size_t j = 0; j < rs.size(); ++j) {
    if (j + 1 == rs.size() || rs[j + 1] != rs[j]) reps.push_back(j);
  }
  return reps;
}

double angle_of_ratio(cplx num, cplx den) {
  double a = std::arg(num / den) / kTwoPi;
  a -= std::floor(a);
  if (a >= 1.0) a = 0.0;
  return a;
}

}  // namespace

ShiftRk shift_Rk(const CoeffVector& x, std::uint64_t nk_index,
                 const std::vector<std::uint32_t>& rs, const std::vector<cplx>& lambdas) {
  validate_modulus_conditions(rs, lambdas);
  if (nk_index < 1) throw UsageError("index must be >= 1");
  ShiftRk out;
  const std::size_t N = x.support_len();
  if (N == 0) return out;
  if (nk_index < N) {
    out.zero_branch = true;
    return out;
  }
  const auto reps = block_representatives(rs);
  const std::uint64_t top_offset = static_cast<std::uint64_t>(rs[reps.back()]) * nk_index;
  std::vector<cplx> v(top_offset + N, cplx{});
  for (std::size_t t : reps) {
    PolarLog inv = polar_log_pow(lambdas[t], nk_index);
    inv = {-inv.log_mod, -inv.arg};
    const std::uint64_t offset = static_cast<std::uint64_t>(rs[t]) * nk_index;
    for (std::size_t nu = 0; nu < N; ++nu) {
      v[offset + nu] = scale_polar(x.at(nu), inv);
    }
  }
  out.value = CoeffVector(std::move(v));
  return out;
}

Polynomial diff_Rk(const Polynomial& f, std::uint64_t nk_index,
                   const std::vector<std::uint32_t>& rs, const std::vector<cplx>& lambdas) {
  validate_pairs(rs, lambdas);
  if (nk_index < 1) throw UsageError("index must be >= 1");
  const std::size_t p = rs.size();
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      if (rs[i] == rs[j] &&
          std::abs(std::abs(lambdas[i]) - std::abs(lambdas[j])) > kModulusTol) {
        throw UsageError("tied powers require equal scalar moduli (members " +
                         std::to_string(i + 1) + " and " + std::to_string(j + 1) + ")");
      }
    }
  }
  if (f.is_zero()) return Polynomial({}, f.degree_cap());

  std::vector<double> tau(p, 0.0);
  for (std::size_t l = 0; l < p; ++l) {
    for (std::size_t i = 0; i < p; ++i) {
      if (rs[i] == rs[l]) tau[l] += 1.0;
    }
  }
  const std::uint32_t r_max = *std::max_element(rs.begin(), rs.end());
  const std::uint64_t out_deg =
      static_cast<std::uint64_t>(f.degree()) + static_cast<std::uint64_t>(r_max) * nk_index;
  if (out_deg > static_cast<std::uint64_t>(f.degree_cap())) {
    throw CapacityError("construction needs degree " + std::to_string(out_deg) +
                        " but the cap is " + std::to_string(f.degree_cap()));
  }

  std::vector<cplx> out(out_deg + 1, cplx{});
  for (int m = 0; m <= f.degree(); ++m) {
    const cplx cm = f.coeff(m);
    if (cm == cplx{0.0, 0.0}) continue;
    for (std::size_t l = 0; l < p; ++l) {
      const std::uint64_t width = static_cast<std::uint64_t>(rs[l]) * nk_index;
      // (m+1)(m+2)...(m+width) in log space
      const double lfac = std::lgamma(static_cast<double>(m) + static_cast<double>(width) + 1.0) -
                          std::lgamma(static_cast<double>(m) + 1.0);
      PolarLog lam = polar_log_pow(lambdas[l], nk_index);
      out[static_cast<std::size_t>(m) + width] +=
          scale_polar(cm / tau[l], {-lam.log_mod - lfac, -lam.arg});
    }
  }
  return Polynomial(std::move(out), f.degree_cap());
}

namespace {

// zeta with other = zeta * base coefficientwise and |zeta| = 1, if any.
std::optional<cplx> unimodular_ratio(const ConvolutionSymbol& base,
                                     const ConvolutionSymbol& other) {
  const std::size_t len = std::max(base.coeffs.size(), other.coeffs.size());
  auto coeff = [](const ConvolutionSymbol& s, std::size_t k) {
    return k < s.coeffs.size() ? s.coeffs[k] : cplx{};
  };
  cplx zeta{};
  bool found = false;
  for (std::size_t k = 0; k < len; ++k) {
    const cplx a = coeff(base, k);
    const cplx b = coeff(other, k);
    if (!found) {
      if (std::abs(a) <= kModulusTol && std::abs(b) <= kModulusTol) continue;
      if (std::abs(a) <= kModulusTol || std::abs(b) <= kModulusTol) return std::nullopt;
      zeta = b / a;
      if (std::abs(std::abs(zeta) - 1.0) > kModulusTol) return std::nullopt;
      found = true;
    } else if (std::abs(b - zeta * a) > kModulusTol * std::max(1.0, std::abs(a))) {
      return std::nullopt;
    }
  }
  if (!found) return std::nullopt;
  return zeta;
}

}  // namespace

std::vector<std::vector<std::size_t>> symbol_groups(
    const std::vector<ConvolutionSymbol>& symbols) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    bool placed = false;
    for (auto& g : groups) {
      if (unimodular_ratio(symbols[g.front()], symbols[i])) {
        g.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({i});
  }
  return groups;
}

ExponentialSum conv_Rk(const std::vector<ExponentialSum>& targets, std::uint64_t nk_index,
                       const std::vector<ConvolutionSymbol>& symbols) {
  if (symbols.empty() || targets.size() != symbols.size()) {
    throw UsageError("need one target per symbol");
  }
  if (nk_index < 1) throw UsageError("index must be >= 1");
  const auto groups = symbol_groups(symbols);
  std::vector<double> tau(symbols.size(), 1.0);
  for (const auto& g : groups) {
    for (std::size_t i : g) tau[i] = static_cast<double>(g.size());
  }
  // Region membership: the term's exponent must make symbol i dominant with
  // modulus above 1.
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    for (std::size_t l = 0; l < targets[i].terms().size(); ++l) {
      const cplx lam = targets[i].terms()[l].exponent;
      const double own = std::abs(symbols[i].eval(lam));
      if (!(own > 1.0)) {
        throw UsageError("target term (" + std::to_string(i + 1) + "," +
                         std::to_string(l + 1) + ") has |Phi_i| = " + std::to_string(own) +
                         " <= 1");
      }
      for (std::size_t j = 0; j < symbols.size(); ++j) {
        if (std::abs(symbols[j].eval(lam)) > own + kModulusTol) {
          throw UsageError("target term (" + std::to_string(i + 1) + "," +
                           std::to_string(l + 1) + ") is dominated by symbol " +
                           std::to_string(j + 1));
        }
      }
    }
  }
  std::vector<ExpTerm> terms;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    for (const auto& t : targets[i].terms()) {
      PolarLog eig = polar_log_pow(symbols[i].eval(t.exponent), nk_index);
      terms.push_back({scale_polar(t.coeff / tau[i], {-eig.log_mod, -eig.arg}), t.exponent});
    }
  }
  return ExponentialSum(std::move(terms));
}

RegionProbeReport conv_region_probe(const std::vector<ConvolutionSymbol>& symbols,
                                    const RegionGrid& grid) {
  if (symbols.empty()) throw UsageError("need at least one symbol");
  if (grid.nx < 1 || grid.ny < 1 || grid.re_min > grid.re_max || grid.im_min > grid.im_max) {
    throw UsageError("grid must be nonempty");
  }
  RegionProbeReport out;
  out.ui_points.resize(symbols.size());
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double im = grid.ny == 1 ? grid.im_min
                                   : grid.im_min + (grid.im_max - grid.im_min) *
                                                       static_cast<double>(iy) /
                                                       static_cast<double>(grid.ny - 1);
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double re = grid.nx == 1 ? grid.re_min
                                     : grid.re_min + (grid.re_max - grid.re_min) *
                                                         static_cast<double>(ix) /
                                                         static_cast<double>(grid.nx - 1);
      const cplx lam{re, im};
      double top = 0.0;
      std::vector<double> mods(symbols.size());
      for (std::size_t j = 0; j < symbols.size(); ++j) {
        mods[j] = std::abs(symbols[j].eval(lam));
        top = std::max(top, mods[j]);
      }
      if (top <= 1.0 - RegionProbeReport::kMargin) {
        out.u0_points.push_back(lam);
        continue;
      }
      for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (mods[i] >= 1.0 + RegionProbeReport::kMargin && mods[i] >= top - kModulusTol) {
          out.ui_points[i].push_back(lam);
        }
      }
    }
  }
  return out;
}

RungeFit runge_fit(const std::vector<RungePiece>& pieces, int degree, int boundary_samples) {
  if (pieces.empty()) throw UsageError("need at least one piece");
  if (boundary_samples < 8) throw UsageError("need at least 8 boundary samples");
  if (degree < 0) throw UsageError("degree must be nonnegative");
  int cap = Polynomial::kDefaultDegreeCap;
  for (const auto& p : pieces) cap = std::max(cap, p.target.degree_cap());
  if (degree > cap) {
    throw CapacityError("fit degree " + std::to_string(degree) + " exceeds cap " +
                        std::to_string(cap));
  }
  for (const auto& p : pieces) {
    if (!(p.weight > 0.0)) throw UsageError("piece weights must be positive");
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      const double gap = std::abs(pieces[i].region.center - pieces[j].region.center);
      if (!(gap > pieces[i].region.radius + pieces[j].region.radius)) {
        throw UsageError("pieces " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                         " overlap");
      }
    }
  }

  double reach = 0.0;
  for (const auto& p : pieces) {
    reach = std::max(reach, std::abs(p.region.center) + p.region.radius);
  }
  if (reach <= 0.0) reach = 1.0;

  const int cols = degree + 1;
  const int rows = static_cast<int>(pieces.size()) * boundary_samples;
  Eigen::MatrixXcd A(rows, cols);
  Eigen::VectorXcd b(rows);
  int row = 0;
  for (const auto& piece : pieces) {
    for (int k = 0; k < boundary_samples; ++k) {
      const double ang = kTwoPi * static_cast<double>(k) / static_cast<double>(boundary_samples);
      const cplx z = piece.region.center + piece.region.radius * std::polar(1.0, ang);
      const cplx zr = z / reach;  // column m holds (z / reach)^m
      cplx pw{1.0, 0.0};
      for (int m = 0; m < cols; ++m) {
        A(row, m) = piece.weight * pw;
        pw *= zr;
      }
      b(row) = piece.weight * piece.target.eval(z);
      ++row;
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
  const Eigen::VectorXcd scaled = qr.solve(b);

  RungeFit out;
  const auto& R = qr.matrixR();
  const double d0 = std::abs(R(0, 0));
  const double dn = std::abs(R(cols - 1, cols - 1));
  out.condition_estimate = dn > 0.0 ? d0 / dn : std::numeric_limits<double>::infinity();
  out.ill_conditioned = !(out.condition_estimate < 1e12);

  std::vector<cplx> coeffs(static_cast<std::size_t>(cols));
  double scale = 1.0;
  for (int m = 0; m < cols; ++m) {
    coeffs[static_cast<std::size_t>(m)] = scaled(m) / scale;
    scale *= reach;
  }
  out.fit = Polynomial(std::move(coeffs), cap);

  const int fine = 4 * boundary_samples;
  for (const auto& piece : pieces) {
    double sup = 0.0;
    for (int k = 0; k < fine; ++k) {
      const double ang = kTwoPi * static_cast<double>(k) / static_cast<double>(fine);
      const cplx z = piece.region.center + piece.region.radius * std::polar(1.0, ang);
      sup = std::max(sup, std::abs(out.fit.eval(z) - piece.target.eval(z)));
    }
    out.sup_error.push_back(sup);
  }
  return out;
}

TranslationResult translation_construct(const Polynomial& h,
                                        const std::vector<TranslationTarget>& targets,
                                        double r, double eps, int degree, std::uint64_t n,
                                        int boundary_samples) {
  if (targets.empty()) throw UsageError("need at least one translation target");
  if (!(r > 0.0)) throw UsageError("radius must be positive");
  if (!(eps > 0.0)) throw UsageError("eps must be positive");
  if (n < 1) throw UsageError("index must be >= 1");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i].step == cplx{0.0, 0.0}) throw UsageError("translation steps must be nonzero");
    if (targets[i].mu == cplx{0.0, 0.0}) throw UsageError("scalars must be nonzero");
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      if (targets[i].step == targets[j].step) {
        throw UsageError("translation steps must be pairwise distinct");
      }
    }
  }

  // Disk separation threshold: 2r over the smallest step gap plus 2r over the
  // smallest step modulus.
  double worst_pair = 0.0;
  double worst_origin = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    worst_origin = std::max(worst_origin, 2.0 * r / std::abs(targets[i].step));
    for (std::size_t j = 0; j < targets.size(); ++j) {
      if (i == j) continue;
      worst_pair =
          std::max(worst_pair, 2.0 * r / std::abs(targets[i].step - targets[j].step));
    }
  }
  const double required = worst_pair + worst_origin;
  if (!(static_cast<double>(n) > required)) {
    throw UsageError("index " + std::to_string(n) + " does not separate the disks; need n >= " +
                     std::to_string(static_cast<std::uint64_t>(std::floor(required)) + 1));
  }

  std::vector<RungePiece> pieces;
  pieces.push_back({DiskRegion{cplx{0.0, 0.0}, r}, h, 1.0});
  std::vector<PolarLog> mu_pows;
  for (const auto& t : targets) {
    const PolarLog mu_n = polar_log_pow(t.mu, n);
    mu_pows.push_back(mu_n);
    const cplx offset = static_cast<double>(n) * t.step;
    Polynomial moved = t.g.translated(-offset);
    std::vector<cplx> coeffs = moved.coeffs();
    for (auto& c : coeffs) c = scale_polar(c, {-mu_n.log_mod, -mu_n.arg});
    // Residual tolerance on this disk scales with |mu|^n; weight the rows
    // accordingly (clamped so the system stays solvable in doubles).
    const double weight = 1.0 + std::exp(std::min(mu_n.log_mod, std::log(1e8)));
    pieces.push_back({DiskRegion{offset, r}, Polynomial(std::move(coeffs), moved.degree_cap()),
                      weight});
  }

  RungeFit fit = runge_fit(pieces, degree, boundary_samples);

  TranslationResult out;
  out.f = fit.fit;
  out.condition_estimate = fit.condition_estimate;
  out.ill_conditioned = fit.ill_conditioned;
  out.origin_error = fit.sup_error[0];
  const int fine = 4 * boundary_samples;
  for (std::size_t l = 0; l < targets.size(); ++l) {
    double sup = 0.0;
    for (int k = 0; k < fine; ++k) {
      const double ang = kTwoPi * static_cast<double>(k) / static_cast<double>(fine);
      const cplx z = r * std::polar(1.0, ang);
      const cplx moved = out.f.eval(z + static_cast<double>(n) * targets[l].step);
      sup = std::max(sup, std::abs(scale_polar(moved, mu_pows[l]) - targets[l].g.eval(z)));
    }
    out.target_errors.push_back(sup);
  }
  out.meets_eps = out.origin_error < eps;
  for (double e : out.target_errors) out.meets_eps = out.meets_eps && e < eps;
  return out;
}

namespace {

// Candidate indices: consecutive integers when no phase ratios are in play,
// otherwise successive returns of the ratio set under a tightening threshold
// (floored near the request eps so near-returns stay reachable).
struct CandidateStream {
  std::vector<double> angles;
  double eps_floor = 1e-18;
  double eps_k = 0.5;
  std::uint64_t start = 1;
  std::uint64_t prev = 0;

  std::optional<std::uint64_t> next(std::uint64_t budget) {
    const std::uint64_t from = std::max(start, prev + 1);
    if (from > budget) return std::nullopt;
    if (angles.empty()) {
      prev = from;
      return from;
    }
    UnimodularSet set(angles);
    const auto hit = find_return(set, std::max(eps_k, eps_floor), from, budget);
    eps_k *= 0.5;
    if (!hit) return std::nullopt;
    prev = *hit;
    return *hit;
  }
};

void push_angle(std::vector<double>& angles, cplx num, cplx den) {
  const double a = angle_of_ratio(num, den);
  if (a != 0.0) angles.push_back(a);
}

void finish_angles(std::vector<double>& angles) {
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-15; }),
               angles.end());
}

struct Evaluation {
  ApproxCertificate cert;
  bool ok = false;
  double worst = 0.0;
};

Evaluation evaluate_candidate(const ApproxRequest& req, const Element& z, std::uint64_t n) {
  Evaluation ev;
  const auto check = brute_force_certificate_check(ApproxCertificate{z, n, {}, 0.0},
                                                   req.family, req.target, req.eps, req.metric);
  const double anchor_err = distance(z, req.anchor, req.metric);
  ev.cert = ApproxCertificate{z, n, check.errors, anchor_err};
  ev.ok = check.ok && anchor_err < req.eps;
  ev.worst = anchor_err;
  for (double e : check.errors) ev.worst = std::max(ev.worst, e);
  return ev;
}

struct SearchState {
  CertificateOutcome out;
  bool record(const Evaluation& ev, std::uint64_t n) {
    out.candidates_tried += 1;
    out.criterion->nk.push_back(n);
    if (!out.certificate || ev.worst < best_worst) {
      out.certificate = ev.cert;
      best_worst = ev.worst;
    }
    if (ev.ok) {
      out.success = true;
      out.certificate = ev.cert;
    }
    return ev.ok;
  }
  void exhausted(std::uint64_t budget) {
    out.diagnostic = "budget " + std::to_string(budget) + " exhausted after " +
                     std::to_string(out.candidates_tried) + " constructed candidates";
    if (out.certificate) {
      out.diagnostic += "; best worst-case error " + std::to_string(best_worst) + " at n=" +
                        std::to_string(out.certificate->n);
    }
  }
  double best_worst = 0.0;
};

CertificateOutcome build_shift(const ApproxRequest& req) {
  std::vector<std::uint32_t> rs;
  std::vector<cplx> lambdas;
  for (const auto& op : req.family) {
    const auto& node = std::get<ShiftPowerOp>(op.node());
    if (!node.weights.is_unit()) {
      throw UsageError(
          "certificates are constructed for scalar multiples of the unweighted shift; "
          "weighted families are handled by the decision procedures");
    }
    rs.push_back(node.r);
    lambdas.push_back(node.lambda);
  }
  std::vector<std::size_t> order(rs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rs[a] != rs[b]) return rs[a] < rs[b];
    return std::abs(lambdas[a]) < std::abs(lambdas[b]);
  });
  std::vector<std::uint32_t> rs_sorted;
  std::vector<cplx> lam_sorted;
  for (std::size_t i : order) {
    rs_sorted.push_back(rs[i]);
    lam_sorted.push_back(lambdas[i]);
  }
  validate_modulus_conditions(rs_sorted, lam_sorted);

  const auto& target = std::get<CoeffVector>(req.target);
  const std::size_t N = target.support_len();
  double x_max = 0.0;
  for (const auto& c : target.coeffs()) x_max = std::max(x_max, std::abs(c));

  const auto reps = block_representatives(rs_sorted);
  double min_rep_mod = std::numeric_limits<double>::infinity();
  std::vector<double> angles;
  {
    std::size_t block_start = 0;
    for (std::size_t t : reps) {
      min_rep_mod = std::min(min_rep_mod, std::abs(lam_sorted[t]));
      for (std::size_t j = block_start; j <= t; ++j) {
        push_angle(angles, lam_sorted[j], lam_sorted[t]);
      }
      block_start = t + 1;
    }
  }
  finish_angles(angles);

  SearchState st;
  st.out.criterion = CriterionInstance{RkKind::shift, {}};
  CandidateStream stream{angles, std::max(1e-18, req.eps * 1e-4)};
  while (auto n = stream.next(req.budget)) {
    if (*n < N) continue;
    // Exact lower bound on the anchor distance: the largest block coordinate.
    if (x_max > 0.0 && x_max * std::exp(-static_cast<double>(*n) * std::log(min_rep_mod)) >=
                           req.eps) {
      continue;
    }
    const ShiftRk rk = shift_Rk(target, *n, rs_sorted, lam_sorted);
    const Element z = std::get<CoeffVector>(req.anchor) + rk.value;
    if (st.record(evaluate_candidate(req, z, *n), *n)) return st.out;
  }
  st.exhausted(req.budget);
  return st.out;
}

CertificateOutcome build_diff(const ApproxRequest& req) {
  std::vector<std::uint32_t> rs;
  std::vector<cplx> lambdas;
  for (const auto& op : req.family) {
    const auto& node = std::get<DiffPowerOp>(op.node());
    rs.push_back(node.r);
    lambdas.push_back(node.lambda);
  }
  const auto& target = std::get<Polynomial>(req.target);
  const auto& anchor = std::get<Polynomial>(req.anchor);

  std::vector<double> angles;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    for (std::size_t j = i + 1; j < rs.size(); ++j) {
      if (rs[i] == rs[j]) push_angle(angles, lambdas[i], lambdas[j]);
    }
  }
  finish_angles(angles);

  SearchState st;
  st.out.criterion = CriterionInstance{RkKind::diff, {}};
  CandidateStream stream{angles, std::max(1e-18, req.eps * 1e-4)};
  while (auto n = stream.next(req.budget)) {
    Polynomial rk;
    try {
      rk = diff_Rk(target, *n, rs, lambdas);
    } catch (const CapacityError& e) {
      st.exhausted(req.budget);
      st.out.diagnostic = std::string(e.what()) + "; " + st.out.diagnostic;
      return st.out;
    }
    const Element z = anchor + rk;
    if (st.record(evaluate_candidate(req, z, *n), *n)) return st.out;
  }
  st.exhausted(req.budget);
  return st.out;
}

CertificateOutcome build_conv(const ApproxRequest& req) {
  std::vector<ConvolutionSymbol> symbols;
  for (const auto& op : req.family) {
    symbols.push_back(std::get<ConvolutionOp>(op.node()).symbol);
  }
  const auto& target = std::get<ExponentialSum>(req.target);
  const auto& anchor = std::get<ExponentialSum>(req.anchor);
  for (const auto& t : anchor.terms()) {
    for (std::size_t j = 0; j < symbols.size(); ++j) {
      if (!(std::abs(symbols[j].eval(t.exponent)) < 1.0)) {
        throw UsageError("anchor exponent must keep every |Phi_j| below 1");
      }
    }
  }

  const auto groups = symbol_groups(symbols);
  std::vector<double> angles;
  for (const auto& g : groups) {
    for (std::size_t a = 0; a < g.size(); ++a) {
      for (std::size_t b = a + 1; b < g.size(); ++b) {
        const auto zeta = unimodular_ratio(symbols[g[a]], symbols[g[b]]);
        if (zeta) push_angle(angles, *zeta, cplx{1.0, 0.0});
      }
    }
  }
  finish_angles(angles);

  const std::vector<ExponentialSum> diagonal(symbols.size(), target);
  SearchState st;
  st.out.criterion = CriterionInstance{RkKind::conv, {}};
  CandidateStream stream{angles, std::max(1e-18, req.eps * 1e-4)};
  while (auto n = stream.next(req.budget)) {
    const Element z = anchor + conv_Rk(diagonal, *n, symbols);
    if (st.record(evaluate_candidate(req, z, *n), *n)) return st.out;
  }
  st.exhausted(req.budget);
  return st.out;
}

CertificateOutcome build_translation(const ApproxRequest& req) {
  if (req.metric.disk.center != cplx{0.0, 0.0}) {
    throw UsageError("translation constructions require the metric disk centered at 0");
  }
  std::vector<cplx> steps;
  std::vector<cplx> lambdas;
  for (const auto& op : req.family) {
    const auto& node = std::get<TranslationOp>(op.node());
    steps.push_back(node.step);
    lambdas.push_back(node.lambda);
  }
  // Representative per distinct step; tied steps need tied moduli.
  std::vector<std::size_t> rep_of(steps.size());
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    bool found = false;
    for (std::size_t t : reps) {
      if (steps[t] == steps[i]) {
        if (std::abs(std::abs(lambdas[t]) - std::abs(lambdas[i])) > kModulusTol) {
          throw UsageError("operators sharing a step must have equal scalar moduli");
        }
        rep_of[i] = t;
        found = true;
        break;
      }
    }
    if (!found) {
      reps.push_back(i);
      rep_of[i] = i;
    }
  }

  std::vector<double> angles;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    push_angle(angles, lambdas[i], lambdas[rep_of[i]]);
  }
  finish_angles(angles);

  const auto& target = std::get<Polynomial>(req.target);
  const auto& anchor = std::get<Polynomial>(req.anchor);
  const double r = req.metric.disk.radius;

  std::vector<TranslationTarget> tts;
  for (std::size_t t : reps) tts.push_back({target, steps[t], lambdas[t]});

  double worst_pair = 0.0, worst_origin = 0.0;
  for (std::size_t a = 0; a < reps.size(); ++a) {
    worst_origin = std::max(worst_origin, 2.0 * r / std::abs(steps[reps[a]]));
    for (std::size_t b = 0; b < reps.size(); ++b) {
      if (a == b) continue;
      worst_pair = std::max(worst_pair,
                            2.0 * r / std::abs(steps[reps[a]] - steps[reps[b]]));
    }
  }
  const std::uint64_t n_start =
      static_cast<std::uint64_t>(std::floor(worst_pair + worst_origin)) + 1;

  SearchState st;
  st.out.criterion = CriterionInstance{RkKind::translation, {}};
  CandidateStream stream{angles, std::max(1e-18, req.eps * 1e-4)};
  stream.start = n_start;
  while (auto n = stream.next(req.budget)) {
    const TranslationResult tr =
        translation_construct(anchor, tts, r, req.eps, req.fit_degree, *n, req.fit_samples);
    const Element z = tr.f;
    if (st.record(evaluate_candidate(req, z, *n), *n)) return st.out;
  }
  st.exhausted(req.budget);
  return st.out;
}

}  // namespace

CertificateOutcome build_certificate(const ApproxRequest& req) {
  if (req.family.empty()) throw UsageError("family must be nonempty");
  if (!(req.eps > 0.0)) throw UsageError("eps must be positive");
  if (req.budget < 1) throw UsageError("budget must be >= 1");
  const std::size_t kind = req.family.front().node().index();
  for (const auto& op : req.family) {
    if (op.node().index() != kind) {
      throw UsageError("family must be homogeneous in operator kind");
    }
    if (!op.acts_on(req.target)) {
      throw UsageError("operator " + op.kind_name() + " cannot act on a " +
                       element_kind_name(req.target));
    }
  }
  if (req.target.index() != req.anchor.index()) {
    throw UsageError("target and anchor must have the same kind");
  }
  switch (kind) {
    case 0: return build_shift(req);
    case 1: return build_diff(req);
    case 2: return build_translation(req);
    default: return build_conv(req);
  }
}

}  // namespace sunidyn
