#pragma once

/// Problem-configuration files: a flat, sectioned `key = value` text format
/// from which complete IVP/BVP problem objects are built.
///
/// Format rules (also documented in the README):
///
///   - Line-oriented.  `#` starts a comment (outside quoted strings);
///     blank lines are ignored.
///   - `[section]` lines open one of: problem, psi, constants, functions,
///     overrides, solver, hypothesis.
///   - `key = value` lines assign within the current section.  Keys may not
///     repeat within a section.
///   - Values in [functions] must be double-quoted expression strings in the
///     expression language of expr.hpp (variables t, y[, x | q]).
///   - All other values are scalars: either a plain floating-point literal
///     or an unquoted constant expression ("7/97", "2*pi"), evaluated once
///     at parse time.
///
/// Section contract:
///
///   [problem]    kind = ivp | bvp; mu, nu, T (all required)
///   [psi]        kind = identity | log_shift | power | exponential
///                (default identity); params: c (log_shift, power),
///                p (power), lambda (exponential)
///   [constants]  ivp: y0 (required), k (default 1)
///                bvp: a, b, y0 (all required)
///   [functions]  ivp: u(t,y), w(t,y), v(t,y,q)
///                bvp: u1,w1,v1,u2,w2,v2, each over (t,y,x)
///   [overrides]  ivp: u_at_origin — the nonzero limit of u at t = 0+.
///                Required when xi < 1; when xi = 1 it may be omitted and
///                is then evaluated as u(0, y0).
///                bvp: u1_at_origin, u2_at_origin (optional; used only
///                when xi < 1, replacing the first-node proxy)
///   [solver]     N (segments, default 512), r (mesh grading, default
///                resolves the weight singularity), tol, max_iter,
///                relaxation — all optional
///   [hypothesis] optional; when present, all keys for the kind are
///                required: ivp — sigma, delta, g_norm, y0_over_u0;
///                bvp — sigma1, sigma2, delta1, delta2, g1_norm, g2_norm,
///                omega1_abs, omega2_abs.  Scalars only: sampled estimates
///                from estimate_lipschitz / estimate_bound_g are heuristic
///                lower bounds, so they are never read from a file that
///                claims to assert a hypothesis.
///
/// Every diagnostic names the offending location as `section.key` (or a
/// line number for syntax errors) inside a ConfigError.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "psihilfer/errors.hpp"
#include "psihilfer/existence.hpp"
#include "psihilfer/expr.hpp"
#include "psihilfer/frac_order.hpp"
#include "psihilfer/hybrid_bvp.hpp"
#include "psihilfer/hybrid_ivp.hpp"
#include "psihilfer/mesh.hpp"
#include "psihilfer/psi_function.hpp"

namespace psihilfer {

/// Which of the two problem classes a configuration describes.
enum class ProblemKind { ivp, bvp };

inline const char* to_string(ProblemKind kind) {
  return kind == ProblemKind::ivp ? "ivp" : "bvp";
}

/// Declarative choice of the monotone substitution function.
struct PsiConfig {
  std::string kind = "identity";
  std::optional<double> c;       ///< shift for log_shift / power
  std::optional<double> p;       ///< exponent for power
  std::optional<double> lambda;  ///< rate for exponential
};

/// Mesh and iteration knobs; absent values resolve to library defaults.
struct SolverSettings {
  std::optional<int> segments;     ///< default 512
  std::optional<double> grading;   ///< default default_grading(xi)
  double tol = 1e-10;
  int max_iter = 200;
  double relaxation = 0.5;
};

/// Parsed problem description: everything a solver run needs, declaratively.
struct ProblemConfig {
  ProblemKind kind = ProblemKind::ivp;
  double mu = 0.0;
  double nu = 0.0;
  double T = 1.0;
  PsiConfig psi;
  double y0 = 0.0;
  double k = 1.0;  ///< ivp coupling gain
  double a = 0.0;  ///< bvp boundary weight at 0
  double b = 0.0;  ///< bvp boundary weight at T
  std::map<std::string, Expression> functions;
  std::optional<double> u_at_origin;
  std::optional<double> u1_at_origin;
  std::optional<double> u2_at_origin;
  SolverSettings solver;
  bool has_hypothesis = false;
  std::map<std::string, double> hypothesis;
};

namespace config_detail {

[[noreturn]] inline void fail(const std::string& where,
                              const std::string& what) {
  throw ConfigError(where + ": " + what);
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

/// One raw assignment, before typed extraction.
struct RawValue {
  std::string text;
  bool quoted = false;
  int line = 0;
};

using RawSection = std::map<std::string, RawValue>;
using RawConfig = std::map<std::string, RawSection>;

/// Split source text into sections of key/value assignments, handling
/// comments, quoting, and duplicate detection.  Purely lexical.
inline RawConfig lex_config(std::string_view text) {
  static const char* kSections[] = {"problem",   "psi",    "constants",
                                    "functions", "overrides", "solver",
                                    "hypothesis"};
  RawConfig raw;
  std::string section;
  int line_no = 0;
  std::istringstream stream{std::string(text)};
  for (std::string line; std::getline(stream, line);) {
    ++line_no;
    const std::string where = "config line " + std::to_string(line_no);

    // Strip the comment, respecting a quoted region.
    bool in_quote = false;
    std::size_t cut = line.size();
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quote = !in_quote;
      if (line[i] == '#' && !in_quote) {
        cut = i;
        break;
      }
    }
    if (in_quote) fail(where, "unterminated quoted string");
    const std::string body = trim(std::string_view(line).substr(0, cut));
    if (body.empty()) continue;

    if (body.front() == '[') {
      if (body.back() != ']') fail(where, "malformed section header");
      const std::string name = trim(body.substr(1, body.size() - 2));
      bool known = false;
      for (const char* s : kSections) known = known || name == s;
      if (!known) fail(where, "unknown section [" + name + "]");
      if (raw.count(name)) fail(where, "duplicate section [" + name + "]");
      raw[name];
      section = name;
      continue;
    }

    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      fail(where, "expected 'key = value' or '[section]'");
    }
    if (section.empty()) fail(where, "assignment before any [section]");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) fail(where, "empty key");
    if (value.empty()) fail(where, "empty value for key '" + key + "'");

    RawValue rv{.text = value, .quoted = false, .line = line_no};
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') {
        fail(where, "quoted value must end with '\"'");
      }
      rv.text = value.substr(1, value.size() - 2);
      rv.quoted = true;
    }
    if (!raw[section].emplace(key, std::move(rv)).second) {
      fail(where, "duplicate key '" + section + "." + key + "'");
    }
  }
  return raw;
}

/// Typed view over one section that errors on unknown leftover keys.
class SectionReader {
 public:
  SectionReader(const RawConfig& raw, std::string name)
      : name_(std::move(name)) {
    auto it = raw.find(name_);
    if (it != raw.end()) {
      section_ = &it->second;
      present_ = true;
    }
  }

  bool present() const noexcept { return present_; }

  const RawValue* find(const std::string& key) {
    if (!section_) return nullptr;
    auto it = section_->find(key);
    if (it == section_->end()) return nullptr;
    consumed_.push_back(key);
    return &it->second;
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

  /// Scalar: plain literal or constant expression, evaluated now.
  std::optional<double> scalar(const std::string& key) {
    const RawValue* rv = find(key);
    if (!rv) return std::nullopt;
    if (rv->quoted) {
      fail(path(key), "expected an unquoted scalar value");
    }
    const char* begin = rv->text.c_str();
    char* end = nullptr;
    const double direct = std::strtod(begin, &end);
    if (end == begin + rv->text.size()) {
      if (!std::isfinite(direct)) fail(path(key), "value must be finite");
      return direct;
    }
    try {
      const double value = Expression::parse(rv->text).eval(Bindings{});
      if (!std::isfinite(value)) fail(path(key), "value must be finite");
      return value;
    } catch (const ParseError& e) {
      fail(path(key), std::string("not a scalar: ") + e.what());
    } catch (const EvalError& e) {
      fail(path(key), std::string("not a constant expression: ") + e.what());
    }
  }

  double require_scalar(const std::string& key) {
    auto v = scalar(key);
    if (!v) fail(path(key), "required key missing");
    return *v;
  }

  std::optional<int> integer(const std::string& key) {
    auto v = scalar(key);
    if (!v) return std::nullopt;
    const double rounded = std::nearbyint(*v);
    if (rounded != *v || std::fabs(*v) > 1e9) {
      fail(path(key), "expected an integer");
    }
    return static_cast<int>(rounded);
  }

  std::optional<std::string> word(const std::string& key) {
    const RawValue* rv = find(key);
    if (!rv) return std::nullopt;
    return rv->text;
  }

  /// Quoted expression string, parsed now so errors carry the key path.
  std::optional<Expression> expression(const std::string& key) {
    const RawValue* rv = find(key);
    if (!rv) return std::nullopt;
    if (!rv->quoted) {
      fail(path(key), "expression values must be double-quoted");
    }
    try {
      return Expression::parse(rv->text);
    } catch (const ParseError& e) {
      fail(path(key), std::string("bad expression: ") + e.what());
    }
  }

  Expression require_expression(const std::string& key) {
    auto e = expression(key);
    if (!e) fail(path(key), "required key missing");
    return std::move(*e);
  }

  /// Call once all expected keys were read; flags typos loudly.
  void finish() const {
    if (!section_) return;
    for (const auto& [key, value] : *section_) {
      bool used = false;
      for (const auto& c : consumed_) used = used || c == key;
      if (!used) fail(name_ + "." + key, "unknown key");
    }
  }

 private:
  std::string name_;
  const RawSection* section_ = nullptr;
  bool present_ = false;
  std::vector<std::string> consumed_;
};

}  // namespace config_detail

/// Parse configuration text into a validated ProblemConfig.  Expressions are
/// parsed (not evaluated); scalar constraints that need the assembled
/// FracOrder are deferred to the build_* functions below.
inline ProblemConfig parse_problem_config(std::string_view text) {
  using config_detail::SectionReader;
  const auto raw = config_detail::lex_config(text);
  ProblemConfig cfg;

  SectionReader problem(raw, "problem");
  if (!problem.present()) {
    config_detail::fail("problem", "section [problem] is required");
  }
  const auto kind = problem.word("kind");
  if (!kind) config_detail::fail("problem.kind", "required key missing");
  if (*kind == "ivp") {
    cfg.kind = ProblemKind::ivp;
  } else if (*kind == "bvp") {
    cfg.kind = ProblemKind::bvp;
  } else {
    config_detail::fail("problem.kind",
                        "must be 'ivp' or 'bvp', got '" + *kind + "'");
  }
  cfg.mu = problem.require_scalar("mu");
  cfg.nu = problem.require_scalar("nu");
  cfg.T = problem.require_scalar("T");
  if (!(cfg.T > 0.0)) config_detail::fail("problem.T", "must be positive");
  problem.finish();

  SectionReader psi(raw, "psi");
  if (psi.present()) {
    cfg.psi.kind = psi.word("kind").value_or("identity");
    cfg.psi.c = psi.scalar("c");
    cfg.psi.p = psi.scalar("p");
    cfg.psi.lambda = psi.scalar("lambda");
    psi.finish();
  }

  SectionReader constants(raw, "constants");
  if (!constants.present()) {
    config_detail::fail("constants", "section [constants] is required");
  }
  cfg.y0 = constants.require_scalar("y0");
  if (cfg.kind == ProblemKind::ivp) {
    cfg.k = constants.scalar("k").value_or(1.0);
  } else {
    cfg.a = constants.require_scalar("a");
    cfg.b = constants.require_scalar("b");
  }
  constants.finish();

  SectionReader functions(raw, "functions");
  if (!functions.present()) {
    config_detail::fail("functions", "section [functions] is required");
  }
  const auto take = [&](const char* name) {
    cfg.functions.emplace(name, functions.require_expression(name));
  };
  if (cfg.kind == ProblemKind::ivp) {
    take("u");
    take("w");
    take("v");
  } else {
    take("u1");
    take("w1");
    take("v1");
    take("u2");
    take("w2");
    take("v2");
  }
  functions.finish();

  SectionReader overrides(raw, "overrides");
  if (overrides.present()) {
    if (cfg.kind == ProblemKind::ivp) {
      cfg.u_at_origin = overrides.scalar("u_at_origin");
    } else {
      cfg.u1_at_origin = overrides.scalar("u1_at_origin");
      cfg.u2_at_origin = overrides.scalar("u2_at_origin");
    }
    overrides.finish();
  }

  SectionReader solver(raw, "solver");
  if (solver.present()) {
    cfg.solver.segments = solver.integer("N");
    cfg.solver.grading = solver.scalar("r");
    cfg.solver.tol = solver.scalar("tol").value_or(cfg.solver.tol);
    cfg.solver.max_iter =
        solver.integer("max_iter").value_or(cfg.solver.max_iter);
    cfg.solver.relaxation =
        solver.scalar("relaxation").value_or(cfg.solver.relaxation);
    solver.finish();
  }

  SectionReader hypothesis(raw, "hypothesis");
  if (hypothesis.present()) {
    cfg.has_hypothesis = true;
    const char* const ivp_keys[] = {"sigma", "delta", "g_norm", "y0_over_u0"};
    const char* const bvp_keys[] = {"sigma1",  "sigma2",  "delta1",
                                    "delta2",  "g1_norm", "g2_norm",
                                    "omega1_abs", "omega2_abs"};
    if (cfg.kind == ProblemKind::ivp) {
      for (const char* key : ivp_keys) {
        cfg.hypothesis[key] = hypothesis.require_scalar(key);
      }
    } else {
      for (const char* key : bvp_keys) {
        cfg.hypothesis[key] = hypothesis.require_scalar(key);
      }
    }
    hypothesis.finish();
  }

  return cfg;
}

/// Read and parse a configuration file.
inline ProblemConfig load_problem_config(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw ConfigError("not a readable config file: " + path);
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_problem_config(buffer.str());
}

/// Instantiate the configured substitution function.
inline PsiPtr build_psi(const PsiConfig& cfg) {
  const auto want = [&](const std::optional<double>& v, const char* key) {
    if (!v) {
      config_detail::fail(std::string("psi.") + key,
                          "required for kind = " + cfg.kind);
    }
    return *v;
  };
  const auto reject = [&](const std::optional<double>& v, const char* key) {
    if (v) {
      config_detail::fail(std::string("psi.") + key,
                          "not a parameter of kind = " + cfg.kind);
    }
  };
  try {
    if (cfg.kind == "identity") {
      reject(cfg.c, "c");
      reject(cfg.p, "p");
      reject(cfg.lambda, "lambda");
      return make_psi(PsiFunction::identity());
    }
    if (cfg.kind == "log_shift") {
      reject(cfg.p, "p");
      reject(cfg.lambda, "lambda");
      return make_psi(PsiFunction::log_shift(want(cfg.c, "c")));
    }
    if (cfg.kind == "power") {
      reject(cfg.lambda, "lambda");
      return make_psi(PsiFunction::power(want(cfg.c, "c"), want(cfg.p, "p")));
    }
    if (cfg.kind == "exponential") {
      reject(cfg.c, "c");
      reject(cfg.p, "p");
      return make_psi(PsiFunction::exponential(want(cfg.lambda, "lambda")));
    }
  } catch (const InvalidArgument& e) {
    config_detail::fail("psi", e.what());
  }
  config_detail::fail("psi.kind", "unknown kind '" + cfg.kind + "'");
}

/// Assemble the fractional order, rephrasing violations as config errors.
inline FracOrder build_order(const ProblemConfig& cfg) {
  try {
    return FracOrder(cfg.mu, cfg.nu);
  } catch (const InvalidArgument& e) {
    config_detail::fail("problem.mu/nu", e.what());
  }
}

/// Build the computation mesh, resolving defaulted solver settings.
inline MeshPtr build_mesh(const ProblemConfig& cfg) {
  const FracOrder order = build_order(cfg);
  const int segments = cfg.solver.segments.value_or(512);
  const double grading =
      cfg.solver.grading.value_or(default_grading(order.xi()));
  try {
    return make_mesh(cfg.T, segments, grading);
  } catch (const InvalidArgument& e) {
    config_detail::fail("solver", e.what());
  }
}

/// Solver knobs for the given mesh.
inline SolverConfig build_solver_config(const ProblemConfig& cfg,
                                        MeshPtr mesh) {
  return SolverConfig{.mesh = std::move(mesh),
                      .tol = cfg.solver.tol,
                      .max_iter = cfg.solver.max_iter,
                      .relaxation = cfg.solver.relaxation};
}

namespace config_detail {

inline std::function<double(double, double)> bind_ty(const Expression& e) {
  return [e](double t, double y) {
    return e.eval(Bindings{.t = t, .y = y});
  };
}

inline std::function<double(double, double, double)> bind_tyq(
    const Expression& e) {
  return [e](double t, double y, double q) {
    return e.eval(Bindings{.t = t, .y = y, .q = q});
  };
}

inline std::function<double(double, double, double)> bind_tyx(
    const Expression& e) {
  return [e](double t, double y, double x) {
    return e.eval(Bindings{.t = t, .y = y, .x = x});
  };
}

}  // namespace config_detail

/// Compile an IVP problem object from a parsed configuration.  When xi = 1
/// and no override is given, the origin multiplier is evaluated as u(0, y0)
/// (for admissible iterates the weighted value at 0 is y0); a zero there is
/// a degenerate multiplier at t = 0, reported as such.
inline HybridIvpProblem build_ivp_problem(const ProblemConfig& cfg) {
  if (cfg.kind != ProblemKind::ivp) {
    config_detail::fail("problem.kind", "expected an ivp configuration");
  }
  const FracOrder order = build_order(cfg);
  HybridIvpProblem problem{
      .u = config_detail::bind_ty(cfg.functions.at("u")),
      .w = config_detail::bind_ty(cfg.functions.at("w")),
      .v = config_detail::bind_tyq(cfg.functions.at("v")),
      .k = cfg.k,
      .y0 = cfg.y0,
      .order = order,
      .psi = build_psi(cfg.psi),
      .T = cfg.T,
      .u_at_origin = 0.0};
  if (cfg.u_at_origin) {
    problem.u_at_origin = *cfg.u_at_origin;
  } else if (order.xi() == 1.0) {
    const double at_origin = problem.u(0.0, cfg.y0);
    if (!std::isfinite(at_origin) || at_origin == 0.0) {
      throw DegenerateMultiplier(
          "config: multiplier u evaluates to zero or a non-finite value at "
          "the origin (t = 0, y = y0)",
          0.0);
    }
    problem.u_at_origin = at_origin;
  } else {
    config_detail::fail("overrides.u_at_origin",
                        "required when xi < 1 (the origin limit of u cannot "
                        "be sampled from the weighted iterate)");
  }
  return problem;
}

/// Compile a BVP problem object from a parsed configuration.
inline HybridBvpProblem build_bvp_problem(const ProblemConfig& cfg) {
  if (cfg.kind != ProblemKind::bvp) {
    config_detail::fail("problem.kind", "expected a bvp configuration");
  }
  return HybridBvpProblem{
      .u1 = config_detail::bind_tyx(cfg.functions.at("u1")),
      .u2 = config_detail::bind_tyx(cfg.functions.at("u2")),
      .w1 = config_detail::bind_tyx(cfg.functions.at("w1")),
      .w2 = config_detail::bind_tyx(cfg.functions.at("w2")),
      .v1 = config_detail::bind_tyx(cfg.functions.at("v1")),
      .v2 = config_detail::bind_tyx(cfg.functions.at("v2")),
      .a = cfg.a,
      .b = cfg.b,
      .y0 = cfg.y0,
      .order = build_order(cfg),
      .psi = build_psi(cfg.psi),
      .T = cfg.T,
      .u1_at_origin = cfg.u1_at_origin,
      .u2_at_origin = cfg.u2_at_origin};
}

/// Hypothesis scalars for the IVP smallness condition.
inline IvpHypothesisData build_ivp_hypothesis(const ProblemConfig& cfg) {
  if (cfg.kind != ProblemKind::ivp) {
    config_detail::fail("problem.kind", "expected an ivp configuration");
  }
  if (!cfg.has_hypothesis) {
    config_detail::fail("hypothesis", "section [hypothesis] is required");
  }
  return IvpHypothesisData{.sigma = cfg.hypothesis.at("sigma"),
                           .delta = cfg.hypothesis.at("delta"),
                           .g_norm = cfg.hypothesis.at("g_norm"),
                           .y0_over_u0 = cfg.hypothesis.at("y0_over_u0"),
                           .order = build_order(cfg),
                           .psi = build_psi(cfg.psi),
                           .T = cfg.T};
}

/// Hypothesis scalars for the BVP smallness condition.
inline BvpHypothesisData build_bvp_hypothesis(const ProblemConfig& cfg) {
  if (cfg.kind != ProblemKind::bvp) {
    config_detail::fail("problem.kind", "expected a bvp configuration");
  }
  if (!cfg.has_hypothesis) {
    config_detail::fail("hypothesis", "section [hypothesis] is required");
  }
  return BvpHypothesisData{.sigma1 = cfg.hypothesis.at("sigma1"),
                           .sigma2 = cfg.hypothesis.at("sigma2"),
                           .delta1 = cfg.hypothesis.at("delta1"),
                           .delta2 = cfg.hypothesis.at("delta2"),
                           .g1_norm = cfg.hypothesis.at("g1_norm"),
                           .g2_norm = cfg.hypothesis.at("g2_norm"),
                           .omega1_abs = cfg.hypothesis.at("omega1_abs"),
                           .omega2_abs = cfg.hypothesis.at("omega2_abs"),
                           .order = build_order(cfg),
                           .psi = build_psi(cfg.psi),
                           .T = cfg.T};
}

}  // namespace psihilfer
