#include "sunidyn/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace sunidyn {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw UsageError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw UsageError("unknown key \"" + key + "\" in " + where);
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw UsageError(where + " is missing \"" + key + "\"");
  return *it;
}

double get_double(const json& j, const std::string& where) {
  if (!j.is_number()) throw UsageError(where + " must be a number");
  return j.get<double>();
}

std::uint64_t get_u64(const json& j, const std::string& where) {
  if (!j.is_number_integer() || (j.is_number_integer() && j.get<double>() < 0)) {
    throw UsageError(where + " must be a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw UsageError(where + " must be an integer");
  return j.get<int>();
}

}  // namespace

json complex_to_json(cplx z) {
  if (z == cplx{0.0, 0.0}) return json{{"re", 0.0}, {"im", 0.0}};
  return json{{"mod_log", std::log(std::abs(z))}, {"arg", std::arg(z)}};
}

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_object()) throw UsageError("complex value must be a number or object");
  if (j.contains("re") || j.contains("im")) {
    check_keys(j, {"re", "im"}, "complex value");
    const double re = j.contains("re") ? get_double(j["re"], "re") : 0.0;
    const double im = j.contains("im") ? get_double(j["im"], "im") : 0.0;
    return {re, im};
  }
  check_keys(j, {"mod_log", "arg"}, "complex value");
  const double ml = get_double(require(j, "mod_log", "complex value"), "mod_log");
  const double ar = j.contains("arg") ? get_double(j["arg"], "arg") : 0.0;
  return std::polar(std::exp(ml), ar);
}

namespace {

std::vector<cplx> complex_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw UsageError(where + " must be an array");
  std::vector<cplx> out;
  for (const auto& v : j) out.push_back(complex_from_json(v));
  return out;
}

json complex_list_json(const std::vector<cplx>& v) {
  json out = json::array();
  for (const auto& c : v) out.push_back(complex_to_json(c));
  return out;
}

}  // namespace

json element_to_json(const Element& e) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CoeffVector>) {
          return json{{"kind", "coeff_vector"}, {"coeffs", complex_list_json(v.coeffs())}};
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          return json{{"kind", "polynomial"},
                      {"coeffs", complex_list_json(v.coeffs())},
                      {"degree_cap", v.degree_cap()}};
        } else {
          json terms = json::array();
          for (const auto& t : v.terms()) {
            terms.push_back(json{{"coeff", complex_to_json(t.coeff)},
                                 {"exponent", complex_to_json(t.exponent)}});
          }
          return json{{"kind", "exp_sum"}, {"terms", terms}};
        }
      },
      e);
}

Element element_from_json(const json& j, int degree_cap) {
  if (!j.is_object()) throw UsageError("element must be an object");
  const std::string kind = require(j, "kind", "element").get<std::string>();
  if (kind == "coeff_vector") {
    check_keys(j, {"kind", "coeffs"}, "coeff_vector element");
    return CoeffVector(complex_list(require(j, "coeffs", "element"), "coeffs"));
  }
  if (kind == "polynomial") {
    check_keys(j, {"kind", "coeffs", "degree_cap"}, "polynomial element");
    int cap = degree_cap;
    if (j.contains("degree_cap")) cap = get_int(j["degree_cap"], "degree_cap");
    return Polynomial(complex_list(require(j, "coeffs", "element"), "coeffs"), cap);
  }
  if (kind == "exp_sum") {
    check_keys(j, {"kind", "terms"}, "exp_sum element");
    const json& terms = require(j, "terms", "element");
    if (!terms.is_array()) throw UsageError("terms must be an array");
    std::vector<ExpTerm> out;
    for (const auto& t : terms) {
      check_keys(t, {"coeff", "exponent"}, "exp_sum term");
      out.push_back({complex_from_json(require(t, "coeff", "term")),
                     complex_from_json(require(t, "exponent", "term"))});
    }
    return ExponentialSum(std::move(out));
  }
  throw UsageError("unknown element kind \"" + kind + "\"");
}

namespace {

WeightSequence weights_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("weights must be an object");
  const std::string kind = require(j, "kind", "weights").get<std::string>();
  if (kind == "constant") {
    check_keys(j, {"kind", "value"}, "constant weights");
    return WeightSequence::constant(complex_from_json(require(j, "value", "weights")));
  }
  if (kind == "periodic") {
    check_keys(j, {"kind", "values"}, "periodic weights");
    return WeightSequence::periodic(complex_list(require(j, "values", "weights"), "values"));
  }
  if (kind == "explicit") {
    check_keys(j, {"kind", "values", "tail"}, "explicit weights");
    return WeightSequence::explicit_list(
        complex_list(require(j, "values", "weights"), "values"),
        complex_from_json(require(j, "tail", "weights")));
  }
  throw UsageError("unknown weights kind \"" + kind + "\"");
}

json weights_to_json(const WeightSequence& w) {
  switch (w.kind()) {
    case WeightSequence::Kind::constant:
      return json{{"kind", "constant"}, {"value", complex_to_json(w.values()[0])}};
    case WeightSequence::Kind::periodic:
      return json{{"kind", "periodic"}, {"values", complex_list_json(w.values())}};
    default:
      return json{{"kind", "explicit"},
                  {"values", complex_list_json(w.values())},
                  {"tail", complex_to_json(w.tail())}};
  }
}

}  // namespace

json operator_to_json(const OperatorSpec& op) {
  return std::visit(
      [](const auto& node) -> json {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ShiftPowerOp>) {
          return json{{"kind", "shift_power"},
                      {"weights", weights_to_json(node.weights)},
                      {"r", node.r},
                      {"lambda", complex_to_json(node.lambda)}};
        } else if constexpr (std::is_same_v<T, DiffPowerOp>) {
          return json{{"kind", "diff_power"}, {"r", node.r},
                      {"lambda", complex_to_json(node.lambda)}};
        } else if constexpr (std::is_same_v<T, TranslationOp>) {
          return json{{"kind", "translation"},
                      {"step", complex_to_json(node.step)},
                      {"lambda", complex_to_json(node.lambda)}};
        } else {
          json out{{"kind", "convolution"}, {"coeffs", complex_list_json(node.symbol.coeffs)}};
          out["type_constants"] = json{{"A", node.symbol.type_A}, {"B", node.symbol.type_B}};
          return out;
        }
      },
      op.node());
}

OperatorSpec operator_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("operator must be an object");
  const std::string kind = require(j, "kind", "operator").get<std::string>();
  if (kind == "shift_power") {
    check_keys(j, {"kind", "weights", "r", "lambda"}, "shift_power operator");
    return OperatorSpec::shift_power(
        weights_from_json(require(j, "weights", "operator")),
        static_cast<std::uint32_t>(get_u64(require(j, "r", "operator"), "r")),
        complex_from_json(require(j, "lambda", "operator")));
  }
  if (kind == "diff_power") {
    check_keys(j, {"kind", "r", "lambda"}, "diff_power operator");
    return OperatorSpec::diff_power(
        static_cast<std::uint32_t>(get_u64(require(j, "r", "operator"), "r")),
        complex_from_json(require(j, "lambda", "operator")));
  }
  if (kind == "translation") {
    check_keys(j, {"kind", "step", "lambda"}, "translation operator");
    return OperatorSpec::translation(complex_from_json(require(j, "step", "operator")),
                                     complex_from_json(require(j, "lambda", "operator")));
  }
  if (kind == "convolution") {
    check_keys(j, {"kind", "coeffs", "type_constants"}, "convolution operator");
    double A = 1.0, B = 1.0;
    if (j.contains("type_constants")) {
      const json& tc = j["type_constants"];
      check_keys(tc, {"A", "B"}, "type_constants");
      if (tc.contains("A")) A = get_double(tc["A"], "A");
      if (tc.contains("B")) B = get_double(tc["B"], "B");
      if (!(A > 0.0) || B < 0.0) throw UsageError("type constants need A > 0, B >= 0");
    }
    return OperatorSpec::convolution(
        ConvolutionSymbol(complex_list(require(j, "coeffs", "operator"), "coeffs"), A, B));
  }
  throw UsageError("unknown operator kind \"" + kind + "\"");
}

Metric metric_from_json(const json& j) {
  Metric m;
  if (j.is_null()) return m;
  check_keys(j, {"space", "disk", "samples", "trunc_degree"}, "metric");
  if (j.contains("space")) {
    const json& s = j["space"];
    check_keys(s, {"kind", "q"}, "space");
    const std::string kind = require(s, "kind", "space").get<std::string>();
    if (kind == "c0") {
      m.space = SpaceSpec::c0();
    } else if (kind == "ellq") {
      m.space = SpaceSpec::ellq(s.contains("q") ? get_double(s["q"], "q") : 2.0);
    } else {
      throw UsageError("unknown space kind \"" + kind + "\"");
    }
  }
  if (j.contains("disk")) {
    const json& d = j["disk"];
    check_keys(d, {"center", "radius"}, "disk");
    m.disk = DiskRegion(complex_from_json(require(d, "center", "disk")),
                        get_double(require(d, "radius", "disk"), "radius"));
  }
  if (j.contains("samples")) {
    m.samples = get_int(j["samples"], "samples");
    if (m.samples < 8) throw UsageError("metric samples must be >= 8");
  }
  if (j.contains("trunc_degree")) {
    m.trunc_degree = get_int(j["trunc_degree"], "trunc_degree");
    if (m.trunc_degree < 1) throw UsageError("trunc_degree must be >= 1");
  }
  return m;
}

namespace {

std::vector<OperatorSpec> family_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw UsageError("family must be a nonempty array");
  std::vector<OperatorSpec> out;
  for (const auto& o : j) out.push_back(operator_from_json(o));
  return out;
}

json run_decide(const json& cfg) {
  check_keys(cfg, {"command", "seed", "rs", "lambdas", "weighted"}, "decide config");
  json results;
  if (cfg.contains("weighted")) {
    const json& w = cfg["weighted"];
    check_keys(w, {"members", "M", "k", "m_max", "sweep"}, "weighted");
    const json& members_json = require(w, "members", "weighted");
    if (!members_json.is_array() || members_json.empty()) {
      throw UsageError("weighted members must be a nonempty array");
    }
    ShiftFamily family;
    for (const auto& mj : members_json) {
      check_keys(mj, {"r", "weights"}, "weighted member");
      family.members.push_back(
          {weights_from_json(require(mj, "weights", "member")),
           static_cast<std::uint32_t>(get_u64(require(mj, "r", "member"), "r"))});
    }
    const std::uint64_t m_max = get_u64(require(w, "m_max", "weighted"), "m_max");
    if (w.contains("sweep")) {
      const json& sw = w["sweep"];
      check_keys(sw, {"k_max"}, "sweep");
      const auto k_max =
          static_cast<std::uint32_t>(get_u64(require(sw, "k_max", "sweep"), "k_max"));
      const ConditionSweep sweep = sweep_condition_iii(family, k_max, m_max);
      json cells = json::array();
      for (const auto& c : sweep.cells) {
        cells.push_back(json{{"M", c.M},
                             {"k", c.k},
                             {"m", c.m ? json(*c.m) : json(nullptr)}});
      }
      results["sweep"] = json{{"cells", cells}, {"all_found", sweep.all_found}};
    } else {
      const double M = get_double(require(w, "M", "weighted"), "M");
      const auto k = static_cast<std::uint32_t>(get_u64(require(w, "k", "weighted"), "k"));
      const auto m = check_condition_iii(family, M, k, m_max);
      results["condition"] = json{{"M", M}, {"k", k}, {"m", m ? json(*m) : json(nullptr)}};
    }
    return results;
  }
  std::vector<std::uint32_t> rs;
  for (const auto& v : require(cfg, "rs", "decide config")) {
    rs.push_back(static_cast<std::uint32_t>(get_u64(v, "rs entry")));
  }
  const std::vector<cplx> lambdas =
      complex_list(require(cfg, "lambdas", "decide config"), "lambdas");
  const Decision s = decide_s_unweighted(rs, lambdas);
  const Decision d = decide_d_unweighted(rs, lambdas);
  results["s"] = json{{"value", s.value}, {"reason", s.reason}};
  results["d"] = json{{"value", d.value}, {"reason", d.reason}};
  return results;
}

json run_dirichlet(const json& cfg, int& exit_code) {
  check_keys(cfg, {"command", "seed", "angles", "n_max", "n_min", "eps", "eps_schedule",
                   "stages"},
             "dirichlet config");
  std::vector<double> angles;
  for (const auto& v : require(cfg, "angles", "dirichlet config")) {
    angles.push_back(get_double(v, "angle"));
  }
  UnimodularSet set(angles);
  const std::uint64_t n_max = get_u64(require(cfg, "n_max", "dirichlet config"), "n_max");
  const int modes = static_cast<int>(cfg.contains("eps")) +
                    static_cast<int>(cfg.contains("eps_schedule")) +
                    static_cast<int>(cfg.contains("stages"));
  if (modes != 1) {
    throw UsageError("dirichlet config needs exactly one of eps, eps_schedule, stages");
  }
  json results;
  if (cfg.contains("eps")) {
    const double eps = get_double(cfg["eps"], "eps");
    const std::uint64_t n_min = cfg.contains("n_min") ? get_u64(cfg["n_min"], "n_min") : 1;
    const auto n = find_return(set, eps, n_min, n_max);
    results["mode"] = "single";
    results["n"] = n ? json(*n) : json(nullptr);
    results["residual"] = n ? json(set_residual(set, *n)) : json(nullptr);
    return results;
  }
  std::vector<double> schedule;
  if (cfg.contains("eps_schedule")) {
    for (const auto& v : cfg["eps_schedule"]) schedule.push_back(get_double(v, "eps entry"));
  } else {
    schedule = default_eps_schedule(get_u64(cfg["stages"], "stages"));
  }
  const ReturnSearch rs = find_return_sequence(set, schedule, n_max);
  results["mode"] = "sequence";
  results["indices"] = rs.sequence.indices;
  results["residuals"] = rs.sequence.residuals;
  results["complete"] = rs.complete;
  results["diagnostic"] = rs.diagnostic;
  if (!rs.complete) exit_code = 3;
  return results;
}

json certificate_to_json(const ApproxCertificate& cert) {
  return json{{"x", element_to_json(cert.x)},
              {"n", cert.n},
              {"per_op_error", cert.per_op_error},
              {"anchor_error", cert.anchor_error}};
}

json run_construct(const json& cfg, int& exit_code) {
  check_keys(cfg, {"command", "seed", "family", "target", "anchor", "eps", "budget",
                   "metric", "degree_cap", "fit_degree", "fit_samples"},
             "construct config");
  ApproxRequest req;
  req.family = family_from_json(require(cfg, "family", "construct config"));
  const int cap = cfg.contains("degree_cap") ? get_int(cfg["degree_cap"], "degree_cap")
                                             : Polynomial::kDefaultDegreeCap;
  req.target = element_from_json(require(cfg, "target", "construct config"), cap);
  req.anchor = cfg.contains("anchor") ? element_from_json(cfg["anchor"], cap)
                                      : zero_like(req.target);
  req.eps = get_double(require(cfg, "eps", "construct config"), "eps");
  req.budget = get_u64(require(cfg, "budget", "construct config"), "budget");
  if (cfg.contains("metric")) req.metric = metric_from_json(cfg["metric"]);
  if (cfg.contains("fit_degree")) req.fit_degree = get_int(cfg["fit_degree"], "fit_degree");
  if (cfg.contains("fit_samples")) req.fit_samples = get_int(cfg["fit_samples"], "fit_samples");

  const CertificateOutcome outcome = build_certificate(req);
  json results;
  results["success"] = outcome.success;
  results["candidates_tried"] = outcome.candidates_tried;
  results["diagnostic"] = outcome.diagnostic;
  results["certificate"] =
      outcome.certificate ? certificate_to_json(*outcome.certificate) : json(nullptr);
  if (outcome.criterion) {
    const char* names[] = {"shift", "diff", "conv", "translation"};
    results["criterion"] = json{{"kind", names[static_cast<int>(outcome.criterion->kind)]},
                                {"nk", outcome.criterion->nk}};
  }
  if (!outcome.success) exit_code = 3;
  return results;
}

json run_orbit(const json& cfg) {
  check_keys(cfg, {"command", "seed", "family", "x", "target", "N", "metric", "trace_csv"},
             "orbit config");
  const auto family = family_from_json(require(cfg, "family", "orbit config"));
  const Element x = element_from_json(require(cfg, "x", "orbit config"));
  const Element target = element_from_json(require(cfg, "target", "orbit config"));
  const std::uint64_t N = get_u64(require(cfg, "N", "orbit config"), "N");
  const Metric metric = cfg.contains("metric") ? metric_from_json(cfg["metric"]) : Metric{};

  const BestIndex best = best_simultaneous_index(family, x, target, N, metric);
  if (cfg.contains("trace_csv")) {
    const std::string path = cfg["trace_csv"].get<std::string>();
    std::ofstream csv(path);
    if (!csv) throw UsageError("cannot open trace file " + path);
    csv << "n,operator_index,distance_to_target\n";
    char buf[64];
    for (std::uint64_t n = 1; n <= N; ++n) {
      for (std::size_t j = 0; j < family.size(); ++j) {
        const double d = distance(iterate(family[j], x, n), target, metric);
        std::snprintf(buf, sizeof buf, "%.17g", d);
        csv << n << ',' << j << ',' << buf << '\n';
      }
    }
  }
  return json{{"best_n", best.n}, {"score", best.score}, {"per_op", best.per_op}};
}

json run_probe(const json& cfg, std::uint64_t seed) {
  check_keys(cfg, {"command", "seed", "family", "U", "V", "N", "trials", "metric"},
             "probe config");
  const auto family = family_from_json(require(cfg, "family", "probe config"));
  auto ball = [](const json& j, const char* name) {
    check_keys(j, {"center", "radius"}, name);
    return BallSpec{element_from_json(require(j, "center", name)),
                    get_double(require(j, "radius", name), "radius")};
  };
  const BallSpec U = ball(require(cfg, "U", "probe config"), "U");
  const BallSpec V = ball(require(cfg, "V", "probe config"), "V");
  const std::uint64_t N = get_u64(require(cfg, "N", "probe config"), "N");
  const std::uint64_t trials = get_u64(require(cfg, "trials", "probe config"), "trials");
  const Metric metric = cfg.contains("metric") ? metric_from_json(cfg["metric"]) : Metric{};

  const auto witness = transitivity_probe(family, U, V, N, trials, seed, metric);
  json results;
  results["N"] = N;
  results["trials"] = trials;
  results["witness"] = witness ? json{{"n", witness->n},
                                      {"trial", witness->trial},
                                      {"u", element_to_json(witness->u)}}
                               : json(nullptr);
  return results;
}

RunResult run_single(json cfg, std::optional<std::uint64_t> seed_override) {
  if (!cfg.is_object()) throw UsageError("config must be an object");
  const std::string command = require(cfg, "command", "config").get<std::string>();
  if (seed_override) cfg["seed"] = *seed_override;
  std::uint64_t seed = 0;
  if (cfg.contains("seed")) seed = get_u64(cfg["seed"], "seed");

  const auto t0 = std::chrono::steady_clock::now();
  int exit_code = 0;
  json results;
  if (command == "decide") {
    results = run_decide(cfg);
  } else if (command == "dirichlet") {
    results = run_dirichlet(cfg, exit_code);
  } else if (command == "construct") {
    results = run_construct(cfg, exit_code);
  } else if (command == "orbit") {
    results = run_orbit(cfg);
  } else if (command == "probe") {
    results = run_probe(cfg, seed);
  } else {
    throw UsageError("unknown command \"" + command + "\"");
  }
  const auto t1 = std::chrono::steady_clock::now();
  const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

  json report;
  report["artifact"] = json{{"name", kArtifactName}, {"version", kArtifactVersion}};
  report["config"] = cfg;
  report["results"] = results;
  report["timings"] = json{{"total_ms", ms}};
  return {report, exit_code};
}

}  // namespace

RunResult run_config(const json& config, std::optional<std::uint64_t> seed_override) {
  if (config.is_array()) {
    json reports = json::array();
    int code = 0;
    for (const auto& entry : config) {
      RunResult r = run_single(entry, seed_override);
      reports.push_back(std::move(r.report));
      code = std::max(code, r.exit_code);
    }
    return {reports, code};
  }
  return run_single(config, seed_override);
}

RunResult run_config_text(const std::string& text, std::optional<std::uint64_t> seed_override) {
  json config;
  try {
    config = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("malformed JSON: ") + e.what());
  }
  return run_config(config, seed_override);
}

}  // namespace sunidyn
