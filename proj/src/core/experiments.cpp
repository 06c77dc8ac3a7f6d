#include "wienerlab/experiments.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wienerlab/bmo.hpp"
#include "wienerlab/bsde.hpp"
#include "wienerlab/chaos.hpp"
#include "wienerlab/malliavin.hpp"

namespace wlab {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(std::size_t v) { return std::to_string(v); }
std::string flag(bool v) { return v ? "true" : "false"; }

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

double combined(const Estimate& a, const Estimate& b) { return std::hypot(a.std_error, b.std_error); }

// --- config reading ------------------------------------------------------------

struct ParseContext {
  struct Entry {
    YAML::Node node;
    std::string path;
    std::set<std::string> used;
  };
  std::vector<std::shared_ptr<Entry>> entries;

  void check() const {
    std::vector<std::string> unknown;
    for (const auto& e : entries)
      for (const auto& kv : e->node) {
        const auto key = kv.first.as<std::string>();
        if (!e->used.count(key)) unknown.push_back(e->path + key);
      }
    if (!unknown.empty()) fail(ErrorCode::config, "unknown config keys: " + join(unknown, ", "));
  }
};

template <class T>
std::string type_name() {
  if constexpr (std::is_same_v<T, std::string>) return "a string";
  else if constexpr (std::is_same_v<T, bool>) return "a boolean";
  else if constexpr (std::is_floating_point_v<T>) return "a number";
  else if constexpr (std::is_integral_v<T>) return "an integer";
  else return "a list";
}

class Reader {
 public:
  Reader(ParseContext& ctx, YAML::Node node, std::string path) : ctx_(&ctx) {
    if (!node || node.IsNull()) node = YAML::Node(YAML::NodeType::Map);
    if (!node.IsMap()) fail(ErrorCode::config, "'" + trim(path) + "' must be a mapping");
    entry_ = std::make_shared<ParseContext::Entry>(ParseContext::Entry{node, std::move(path), {}});
    ctx.entries.push_back(entry_);
  }

  bool has(const std::string& key) const { return static_cast<bool>(lookup(key)); }
  std::string where(const std::string& key) const { return entry_->path + key; }

  template <class T>
  T get(const std::string& key, T fallback) {
    auto v = opt<T>(key);
    return v ? *v : fallback;
  }

  template <class T>
  T req(const std::string& key) {
    auto v = opt<T>(key);
    if (!v) fail(ErrorCode::config, "missing required key '" + where(key) + "'");
    return *v;
  }

  template <class T>
  std::optional<T> opt(const std::string& key) {
    entry_->used.insert(key);
    const YAML::Node n = lookup(key);
    if (!n) return std::nullopt;
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(ErrorCode::config, "'" + where(key) + "' must be " + type_name<T>());
    }
  }

  Reader child(const std::string& key) {
    entry_->used.insert(key);
    return Reader(*ctx_, lookup(key), where(key) + ".");
  }

  std::vector<Reader> list(const std::string& key) {
    entry_->used.insert(key);
    std::vector<Reader> out;
    const YAML::Node n = lookup(key);
    if (!n) return out;
    if (!n.IsSequence()) fail(ErrorCode::config, "'" + where(key) + "' must be a list");
    for (std::size_t i = 0; i < n.size(); ++i)
      out.emplace_back(*ctx_, n[i], where(key) + "[" + std::to_string(i) + "].");
    return out;
  }

  YAML::Node raw(const std::string& key) {
    entry_->used.insert(key);
    return lookup(key);
  }

 private:
  // Indexing a mutable node would insert the key, so search instead.
  YAML::Node lookup(const std::string& key) const {
    for (const auto& kv : entry_->node)
      if (kv.first.as<std::string>() == key) return kv.second;
    return YAML::Node(YAML::NodeType::Undefined);
  }
  static std::string trim(const std::string& path) {
    return path.empty() ? "<root>" : path.substr(0, path.size() - 1);
  }
  ParseContext* ctx_;
  std::shared_ptr<ParseContext::Entry> entry_;
};

Json yaml_to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Map: {
      Json j = Json::object();
      for (const auto& kv : n) j[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return j;
    }
    case YAML::NodeType::Sequence: {
      Json j = Json::array();
      for (const auto& v : n) j.push_back(yaml_to_json(v));
      return j;
    }
    case YAML::NodeType::Scalar: {
      const std::string s = n.Scalar();
      if (n.Tag() == "!") return s;  // quoted
      long long i = 0;
      auto [pi, ei] = std::from_chars(s.data(), s.data() + s.size(), i);
      if (ei == std::errc() && pi == s.data() + s.size()) return i;
      double d = 0.0;
      auto [pd, ed] = std::from_chars(s.data(), s.data() + s.size(), d);
      if (ed == std::errc() && pd == s.data() + s.size()) return d;
      if (s == "true") return true;
      if (s == "false") return false;
      return s;
    }
    default:
      return nullptr;
  }
}

// --- catalog -----------------------------------------------------------------

struct CatalogEntry {
  std::string params;
  std::string description;
};

const std::map<std::string, CatalogEntry>& functional_catalog() {
  static const std::map<std::string, CatalogEntry> c = {
      {"bv-indicator", {"base: functional, threshold = 0", "indicator of [threshold, inf) applied to base"}},
      {"constant", {"value = 1", "deterministic constant"}},
      {"counterexample-series",
       {"terms = l_max, l_max = 6", "sum_l l cos(W_{s_l}) (W_{t_l} - W_{s_l}) with t_l - s_l = T 4^-l"}},
      {"linear-terminal", {"dim = 1", "W_T (first coordinate)"}},
      {"ou-terminal",
       {"kappa = 1, sigma = 1, x0 = 0, g = identity | square | sin | tanh",
        "g(X_T) for the Euler Ornstein-Uhlenbeck scheme, with tangent Malliavin derivative"}},
      {"poly-increments",
       {"blocks: [[a, b], ...], monomials: [{coef, powers: [...]}, ...]",
        "polynomial in disjoint block increments W_b - W_a"}},
      {"square-terminal", {"dim = 1", "W_T^2"}},
  };
  return c;
}

const std::map<std::string, CatalogEntry>& phi_catalog() {
  static const std::map<std::string, CatalogEntry> c = {
      {"anisotropic",
       {"terms: [{r_end = T, theta = 0.5, q = 2}, ...]",
        "weighted L_q(dt / (r - t)) norm of F(chi_(t, r]) (r - t)^(-theta/2)"}},
      {"isotropic-unit", {"q = 2, step = 0.125", "(int_0^1 F(phi_r)^q dr)^(1/q) with constant profiles phi_r = r"}},
      {"mehler-kernel",
       {"theta = 0.5, q = 2, step = 0.125",
        "isotropic functional with K(r) = 2r/(1-r^2) (ln 1/(1-r^2))^(-1-theta q/2)"}},
      {"phi2", {"depth = 6", "sup over dyadic (s,t] of F(chi_(s,t]) / sqrt(t - s)"}},
      {"sup-interval", {"r = 2, depth = 6", "sup over dyadic (s,t] of F(chi_(s,t]) / (t - s)^(1/r)"}},
  };
  return c;
}

struct KindEntry {
  std::string keys;
  std::string params;
};

const std::map<std::string, KindEntry>& kind_catalog() {
  static const std::map<std::string, KindEntry> c = {
      {"besov-norm", {"grid, mc, functional, phi", "p = 2, expect, rel_tol = 0.03"}},
      {"bmo-sweep", {"", "etas = [0.5, 1], ps = [2, 4], slices = [1, 2, 4], processes: [...]"}},
      {"bsde-oracle", {"grid", "presets = [heat, linear-oracle, quadratic-cole-hopf], doubling = true"}},
      {"bsde-stability",
       {"grid, mc", "preset = ou-lipschitz, p = 2, t = 0, a = 0.5, hs = [...], max_spread = 5"}},
      {"bsde-variation",
       {"grid, mc", "preset = linear-terminal, p = 2, s = 0.25, hs = [...], expect_slope, slope_tol = 0.02"}},
      {"bv-embedding", {"grid, mc", "preset = bv-terminal, qs = [2, 4], hs = [...], slope_rel_tol = 0.15, p = 2"}},
      {"chaos-check", {"grid, mc, functional", "intervals = [[a, b], ...], expect = [...]"}},
      {"counterexample", {"mc", "l_max = 12, p = 2, T = 1"}},
      {"p0", {"", "lz = 1, s_inf = [...], expect = [...], tol = 1e-9"}},
      {"phi2-equivalence", {"grid, mc, functionals", "ps = [2, 4], depth = 6, ratio_min = 0.1, ratio_max = 10"}},
      {"rh-bound", {"grid", "kappas = [...], beta = 2, slices = [1, 4]"}},
      {"sandwich", {"grid, mc, functionals", "p = 2, a = 0, hs = [...], exact: {name: value}"}},
      {"weaker-bmo", {"", "eta = 0.6, alpha = 0.25, beta = 0.7, n_max = 12"}},
  };
  return c;
}

ScalarMap g_map(const std::string& g, bool derivative) {
  if (g == "identity") return derivative ? ScalarMap([](double) { return 1.0; }) : ScalarMap([](double x) { return x; });
  if (g == "square")
    return derivative ? ScalarMap([](double x) { return 2.0 * x; }) : ScalarMap([](double x) { return x * x; });
  if (g == "sin")
    return derivative ? ScalarMap([](double x) { return std::cos(x); }) : ScalarMap([](double x) { return std::sin(x); });
  if (g == "tanh")
    return derivative ? ScalarMap([](double x) { const double c = std::cosh(x); return 1.0 / (c * c); })
                      : ScalarMap([](double x) { return std::tanh(x); });
  fail(ErrorCode::config, "unknown terminal map '" + g + "' (identity, square, sin, tanh)");
}

FunctionalPtr functional_from(Reader& r, const std::string& name, const GridPtr& grid) {
  if (!functional_catalog().count(name)) fail(ErrorCode::config, "unknown functional '" + name + "'");
  if (name == "linear-terminal") return linear_terminal(grid, r.get<std::size_t>("dim", 1));
  if (name == "square-terminal") return square_terminal(grid, r.get<std::size_t>("dim", 1));
  if (name == "constant") return constant_functional(grid, r.get("value", 1.0));
  if (name == "ou-terminal") {
    const auto g = r.get<std::string>("g", "identity");
    return diffusion_terminal(grid, ou_spec(r.get("kappa", 1.0), r.get("sigma", 1.0), r.get("x0", 0.0),
                                            g_map(g, false), g_map(g, true)));
  }
  if (name == "counterexample-series") {
    const auto l_max = r.get<unsigned>("l_max", 6);
    return counterexample_series(grid, r.get<unsigned>("terms", l_max), l_max);
  }
  if (name == "bv-indicator") {
    auto base = r.child("base");
    const auto base_name = base.get<std::string>("name", "linear-terminal");
    return bv_indicator(functional_from(base, base_name, grid), r.get("threshold", 0.0));
  }
  // poly-increments
  std::vector<BlockSpec> blocks;
  for (const auto& b : r.req<std::vector<std::vector<double>>>("blocks")) {
    require(b.size() == 2 || b.size() == 3, ErrorCode::config, "blocks entries are [a, b] or [a, b, coord]");
    blocks.push_back({b[0], b[1], b.size() == 3 ? static_cast<std::size_t>(b[2]) : 0});
  }
  std::vector<Monomial> monos;
  for (auto& m : r.list("monomials")) monos.push_back({m.req<double>("coef"), m.req<std::vector<unsigned>>("powers")});
  return poly_increments(grid, std::move(blocks), std::move(monos), r.get<std::size_t>("dim", 1));
}

FunctionalPtr functional_from(Reader& r, const GridPtr& grid) {
  return functional_from(r, r.req<std::string>("name"), grid);
}

PhiPtr phi_from(Reader& r, const std::string& name, const GridPtr& grid) {
  if (!phi_catalog().count(name)) fail(ErrorCode::config, "unknown Phi variant '" + name + "'");
  if (name == "phi2") return phi2(grid, r.get<unsigned>("depth", 6));
  if (name == "sup-interval")
    return sup_interval_phi(grid, r.get("r", 2.0), dyadic_intervals(*grid, r.get<unsigned>("depth", 6)));
  if (name == "isotropic-unit") return isotropic_phi(grid, unit_kernel(), r.get("q", 2.0), r.get("step", 0.125));
  if (name == "mehler-kernel") {
    const double q = r.get("q", 2.0);
    return isotropic_phi(grid, mehler_kernel(r.get("theta", 0.5), q), q, r.get("step", 0.125));
  }
  std::vector<AnisotropicTerm> terms;
  for (auto& t : r.list("terms"))
    terms.push_back({t.get("r_end", grid->horizon()), t.get("theta", 0.5), t.get("q", 2.0)});
  if (terms.empty()) terms.push_back({grid->horizon(), 0.5, 2.0});
  return anisotropic_phi(grid, std::move(terms));
}

// --- experiment kinds ----------------------------------------------------------

using Runner = std::function<void(ExperimentReport&)>;

struct Env {
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

GridPtr read_grid(Reader& root, std::size_t default_cells = 64) {
  auto g = root.child("grid");
  const double T = g.get("T", 1.0);
  const auto M = g.get<std::size_t>("M", default_cells);
  return make_uniform_grid(T, M);
}

McConfig read_mc(Reader& root, const Env& env, std::size_t default_inner = 0) {
  auto m = root.child("mc");
  McConfig c;
  c.n_samples = m.get<std::size_t>("n", 100000);
  c.n_batches = m.get<std::size_t>("batches", 20);
  c.n_inner = m.get<std::size_t>("n_inner", default_inner);
  c.seed = env.seed;
  c.threads = env.threads;
  c.validate();
  return c;
}

std::vector<FunctionalPtr> read_functionals(Reader& root, const GridPtr& grid) {
  std::vector<FunctionalPtr> out;
  if (root.has("functional")) {
    auto f = root.child("functional");
    out.push_back(functional_from(f, grid));
  }
  for (auto& f : root.list("functionals")) out.push_back(functional_from(f, grid));
  require(!out.empty(), ErrorCode::config, "no functional given ('functional' or 'functionals')");
  return out;
}

void add_check(ExperimentReport& rep, std::string record, bool pass, std::string detail) {
  rep.checks.push_back({std::move(record), pass, std::move(detail)});
}

void add_row(ExperimentReport& rep, std::vector<std::string> row) {
  require(row.size() == rep.columns.size(), ErrorCode::invalid_argument, "CSV row width mismatch");
  rep.rows.push_back(std::move(row));
}

Estimate exact(double v) { return {v, 0.0, 0}; }

std::string interval_name(double a, double b) { return "(" + num(a) + ", " + num(b) + "]"; }

Runner besov_norm_kind(Reader& root, const Env& env) {
  const auto grid = read_grid(root);
  const auto cfg = read_mc(root, env);
  auto fr = root.child("functional");
  const auto xi = functional_from(fr, grid);
  auto pr = root.child("phi");
  const auto phi = phi_from(pr, pr.req<std::string>("name"), grid);
  auto params = root.child("params");
  const double p = params.get("p", 2.0);
  const auto expect = params.opt<double>("expect");
  const double rel_tol = params.get("rel_tol", 0.03);
  return [=](ExperimentReport& rep) {
    rep.columns = {"profile", "F", "stderr", "n"};
    const auto tab = tabulate(*xi, *phi, p, cfg);
    const auto res = reduce_tabulation(*phi, tab);
    for (std::size_t j = 0; j < res.curve.size(); ++j)
      add_row(rep, {phi->label(j), num(res.curve[j].value), num(res.curve[j].std_error), num(res.curve[j].n)});
    const auto full = besov_norm(*xi, p, *phi, cfg);
    rep.estimates.push_back({"seminorm", res.value});
    rep.estimates.push_back({"besov_norm", full});
    add_check(rep, "seminorm", std::isfinite(res.value.value), "value " + num(res.value.value));
    if (expect)
      add_check(rep, "seminorm vs expected", std::abs(res.value.value - *expect) <= rel_tol * std::abs(*expect),
                num(res.value.value) + " vs " + num(*expect) + " (relative tolerance " + num(rel_tol) + ")");
  };
}

Runner sandwich_kind(Reader& root, const Env& env) {
  const auto grid = read_grid(root, 32);
  const auto cfg = read_mc(root, env, 1);
  const auto fs = read_functionals(root, grid);
  auto params = root.child("params");
  const double p = params.get("p", 2.0);
  const double a = params.get("a", 0.0);
  const auto hs = params.get<std::vector<double>>("hs", {0.25});
  std::map<std::string, double> exact_ratio;
  if (const auto ex = params.raw("exact")) {
    require(ex.IsMap(), ErrorCode::config, "'params.exact' must map functional names to ratios");
    for (const auto& kv : ex) exact_ratio[kv.first.as<std::string>()] = kv.second.as<double>();
  }
  return [=](ExperimentReport& rep) {
    rep.columns = {"functional", "a", "b", "residual", "residual_se", "decoupled", "decoupled_se",
                   "ratio", "ratio_se", "within_bounds"};
    for (const auto& xi : fs)
      for (double h : hs) {
        const double b = a + h;
        const auto r = sandwich_check(*xi, a, b, p, cfg);
        add_row(rep, {xi->name(), num(a), num(b), num(r.residual.value), num(r.residual.std_error),
                      num(r.decoupled.value), num(r.decoupled.std_error), num(r.ratio.value),
                      num(r.ratio.std_error), flag(r.within_bounds)});
        const std::string rec = xi->name() + " " + interval_name(a, b);
        rep.estimates.push_back({rec + " ratio", r.ratio});
        add_check(rep, rec, r.within_bounds, "ratio " + num(r.ratio.value) + " in [0.5, 1] up to 3 stderr");
        if (auto it = exact_ratio.find(xi->name()); it != exact_ratio.end())
          add_check(rep, rec + " exact", std::abs(r.ratio.value - it->second) <= 3.0 * r.ratio.std_error,
                    num(r.ratio.value) + " vs " + num(it->second) + " within 3 stderr " + num(r.ratio.std_error));
      }
  };
}

Runner phi2_kind(Reader& root, const Env& env) {
  const auto grid = read_grid(root);
  const auto cfg = read_mc(root, env);
  const auto fs = read_functionals(root, grid);
  auto params = root.child("params");
  const auto ps = params.get<std::vector<double>>("ps", {2.0, 4.0});
  const auto depth = params.get<unsigned>("depth", 6);
  const double lo = params.get("ratio_min", 0.1), hi = params.get("ratio_max", 10.0);
  return [=](ExperimentReport& rep) {
    rep.columns = {"functional", "p", "lip", "lip_se", "lips", "lips_se", "phi2", "phi2_se", "ratio", "ratio_se"};
    for (const auto& xi : fs)
      for (double p : ps) {
        const auto m = malliavin_seminorms(*xi, p, cfg, depth);
        add_row(rep, {xi->name(), num(p), num(m.lip.value), num(m.lip.std_error), num(m.lips.value),
                      num(m.lips.std_error), num(m.phi2.value), num(m.phi2.std_error), num(m.ratio.value),
                      num(m.ratio.std_error)});
        const std::string rec = xi->name() + " p=" + num(p);
        rep.estimates.push_back({rec + " ratio", m.ratio});
        add_check(rep, rec, m.ratio_defined && m.ratio.value >= lo && m.ratio.value <= hi,
                  "phi2 / lips = " + num(m.ratio.value) + " in [" + num(lo) + ", " + num(hi) + "]");
        if (p == 2.0)
          add_check(rep, rec + " lip = lips", std::abs(m.lip.value - m.lips.value) <= 3.0 * combined(m.lip, m.lips),
                    num(m.lip.value) + " vs " + num(m.lips.value));
      }
  };
}

Runner counterexample_kind(Reader& root, const Env& env) {
  const auto cfg = read_mc(root, env);
  auto params = root.child("params");
  const auto l_max = params.get<unsigned>("l_max", 12);
  const double p = params.get("p", 2.0);
  const double T = params.get("T", 1.0);
  return [=](ExperimentReport& rep) {
    rep.columns = {"L", "lower", "lower_se", "direct", "direct_se", "xi_norm", "xi_norm_se",
                   "square_function", "square_function_se"};
    const auto r = counterexample_growth(l_max, p, cfg, T);
    for (const auto& row : r.rows)
      add_row(rep, {num(std::size_t(row.L)), num(row.lower.value), num(row.lower.std_error), num(row.direct.value),
                    num(row.direct.std_error), num(row.xi_norm.value), num(row.xi_norm.std_error),
                    num(row.square_function.value), num(row.square_function.std_error)});
    rep.estimates.push_back({"kappa_hat", {r.kappa_hat, 0.0, cfg.n_samples}});
    rep.estimates.push_back({"slope", {r.slope, 0.0, cfg.n_samples}});
    add_check(rep, "slope", r.slope_in_range, num(r.slope) + " in [kappa/2, 2 kappa], kappa = " + num(r.kappa_hat));
    add_check(rep, "xi_L norms", r.norms_bounded, "max_L ||xi_L|| below twice ||xi_4||");
    add_check(rep, "lower bounds", r.lower_bounds_hold, "lower >= kappa L / 2 for every L");
  };
}

Runner chaos_kind(Reader& root, const Env& env) {
  const auto grid = read_grid(root, 4);
  const auto cfg = read_mc(root, env, 1);
  auto fr = root.child("functional");
  const auto xi = functional_from(fr, grid);
  auto params = root.child("params");
  const auto intervals = params.get<std::vector<std::vector<double>>>("intervals", {{0.0, 0.25}});
  const auto expect = params.get<std::vector<double>>("expect", {});
  require(expect.empty() || expect.size() == intervals.size(), ErrorCode::config,
          "'params.expect' needs one value per interval");
  for (const auto& iv : intervals) require(iv.size() == 2, ErrorCode::config, "intervals are [a, b] pairs");
  return [=](ExperimentReport& rep) {
    rep.columns = {"a", "b", "exact", "mc", "mc_se", "bdg_integral", "bdg_relative_error"};
    const auto ex = expand_library(*xi);
    const auto d12 = d12_norm(ex);
    rep.estimates.push_back({"mean", exact(ex.mean())});
    rep.estimates.push_back({"variance", exact(ex.variance())});
    rep.estimates.push_back({"d12_norm", exact(d12.norm)});
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      const double a = intervals[i][0], b = intervals[i][1];
      const double res = conditional_residual_exact(ex, a, b);
      const auto mc = cond_exp_residual(*xi, a, b, 2.0, cfg);
      const auto bdg = bdg_chaos_check(ex, a, b);
      add_row(rep, {num(a), num(b), num(res), num(mc.value), num(mc.std_error), num(bdg.integral),
                    num(bdg.relative_error)});
      const std::string rec = interval_name(a, b);
      rep.estimates.push_back({rec + " residual", exact(res)});
      rep.estimates.push_back({rec + " residual mc", mc});
      add_check(rep, "bdg " + rec, bdg.equal, "relative error " + num(bdg.relative_error));
      add_check(rep, "mc " + rec, std::abs(mc.value - res) <= 3.0 * mc.std_error,
                num(mc.value) + " vs exact " + num(res) + " within 3 stderr " + num(mc.std_error));
      if (!expect.empty())
        add_check(rep, "exact " + rec, std::abs(res - expect[i]) <= 1e-12 * std::max(1.0, std::abs(expect[i])),
                  num(res) + " vs " + num(expect[i]));
    }
  };
}

struct NamedProcess {
  std::string name;
  StepProcess z;
};

std::vector<NamedProcess> read_processes(Reader& params) {
  std::vector<NamedProcess> out;
  for (auto& pr : params.list("processes")) {
    const auto kind = pr.req<std::string>("kind");
    const double T = pr.get("T", 1.0);
    if (kind == "deterministic") {
      const auto values = pr.req<std::vector<double>>("values");
      require(!values.empty(), ErrorCode::config, "deterministic process needs values");
      out.push_back({pr.get<std::string>("name", "deterministic"),
                     StepProcess::deterministic(make_uniform_grid(T, values.size()), values)});
    } else if (kind == "tree") {
      std::vector<std::vector<StepProcess::Node>> levels;
      for (const auto& lv : pr.req<std::vector<std::vector<std::vector<double>>>>("levels")) {
        levels.emplace_back();
        for (const auto& nd : lv) {
          require(nd.size() == 3, ErrorCode::config, "tree nodes are [parent, prob, value]");
          levels.back().push_back({static_cast<std::size_t>(nd[0]), nd[1], nd[2]});
        }
      }
      const auto cells = levels.size();
      out.push_back({pr.get<std::string>("name", "tree"), StepProcess::tree(make_uniform_grid(T, cells), levels)});
    } else if (kind == "random-binary-trees") {
      const auto count = pr.get<std::size_t>("count", 50);
      const auto depth = pr.get<std::size_t>("depth", 3);
      const auto seed = pr.get<std::uint64_t>("seed", 1);
      const double vmax = pr.get("max_value", 2.0);
      require(depth >= 1 && depth <= 12, ErrorCode::config, "random tree depth must be in 1..12");
      std::mt19937_64 gen(seed);
      auto uni = [&gen]() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
      for (std::size_t c = 0; c < count; ++c) {
        std::vector<std::vector<StepProcess::Node>> levels{{{0, 1.0, vmax * uni()}}};
        for (std::size_t k = 1; k < depth; ++k) {
          std::vector<StepProcess::Node> lv;
          for (std::size_t parent = 0; parent < levels.back().size(); ++parent) {
            const double q = 0.05 + 0.9 * uni();
            lv.push_back({parent, q, vmax * uni()});
            lv.push_back({parent, 1.0 - q, vmax * uni()});
          }
          levels.push_back(std::move(lv));
        }
        out.push_back({"random-" + std::to_string(c), StepProcess::tree(make_uniform_grid(T, depth), levels)});
      }
    } else {
      fail(ErrorCode::config, "unknown process kind '" + kind + "' (deterministic, tree, random-binary-trees)");
    }
  }
  require(!out.empty(), ErrorCode::config, "'params.processes' is empty");
  return out;
}

Runner bmo_sweep_kind(Reader& root, const Env&) {
  auto params = root.child("params");
  const auto etas = params.get<std::vector<double>>("etas", {0.5, 1.0});
  const auto ps = params.get<std::vector<double>>("ps", {2.0, 4.0});
  const auto slices = params.get<std::vector<std::size_t>>("slices", {1, 2, 4});
  const auto procs = read_processes(params);
  return [=](ExperimentReport& rep) {
    rep.columns = {"process", "eta", "p", "n_slices", "bmo", "sliceable_upper", "fefferman_lhs",
                   "fefferman_rhs", "holds"};
    std::size_t held = 0, total = 0;
    for (const auto& pr : procs)
      for (double eta : etas) {
        const double bmo = bmo_s2eta_norm(pr.z, eta);
        for (double p : ps) {
          const auto f = fefferman_check(pr.z, eta, p);
          for (std::size_t n : slices) {
            const bool divisible = pr.z.cells() % n == 0;
            const double sl = divisible ? sliceable_upper(pr.z, eta, n) : NAN;
            add_row(rep, {pr.name, num(eta), num(p), num(n), num(bmo), num(sl), num(f.lhs), num(f.rhs),
                          flag(f.holds)});
            if (divisible && p == ps.front())
              add_check(rep, pr.name + " eta=" + num(eta) + " N=" + num(n) + " sliceable",
                        sl <= bmo * (1.0 + 1e-12), num(sl) + " <= " + num(bmo));
          }
          ++total;
          held += f.holds;
          if (!f.holds)
            add_check(rep, pr.name + " eta=" + num(eta) + " p=" + num(p) + " fefferman", false,
                      "lhs " + num(f.lhs) + " > rhs " + num(f.rhs));
        }
      }
    rep.estimates.push_back({"fefferman_held", exact(static_cast<double>(held))});
    add_check(rep, "fefferman", held == total, num(held) + " of " + num(total) + " cases hold");
  };
}

Runner rh_bound_kind(Reader& root, const Env&) {
  const auto grid = read_grid(root);
  auto params = root.child("params");
  const auto kappas = params.get<std::vector<double>>("kappas", {0.01, 0.04});
  const double beta = params.get("beta", 2.0);
  const auto slices = params.get<std::vector<std::size_t>>("slices", {1, 4});
  return [=](ExperimentReport& rep) {
    rep.columns = {"kappa", "n_slices", "sliceable", "phi_beta", "bound", "exact", "holds"};
    const double phi_b = kazamaki_phi(beta);
    rep.estimates.push_back({"kazamaki_phi", exact(phi_b)});
    for (double kappa : kappas)
      for (std::size_t n : slices) {
        const auto z = StepProcess::deterministic(grid, std::vector<double>(grid->cells(), kappa));
        const double sl = sliceable_upper(z, 1.0, n);
        const auto bound = rh_bound(sl, n, beta);
        const double ex = deterministic_rh_constant(kappa, grid->horizon(), beta);
        const std::string rec = "kappa=" + num(kappa) + " N=" + num(n);
        bool holds = false;
        if (sl < phi_b) {
          holds = bound && ex <= *bound;
          add_check(rep, rec, holds, "exact " + num(ex) + " <= bound " + (bound ? num(*bound) : "none"));
          if (bound) rep.estimates.push_back({rec + " bound", exact(*bound)});
        } else {
          bool psi_rejects = false;
          try {
            kazamaki_psi(sl, beta);
          } catch (const Error& e) {
            psi_rejects = e.code() == ErrorCode::domain;
          }
          holds = !bound && psi_rejects;
          add_check(rep, rec + " guard", holds, "sliceable " + num(sl) + " >= Phi(beta) must be rejected");
        }
        add_row(rep, {num(kappa), num(n), num(sl), num(phi_b), bound ? num(*bound) : "rejected", num(ex),
                      flag(holds)});
      }
  };
}

Runner p0_kind(Reader& root, const Env&) {
  auto params = root.child("params");
  const double lz = params.get("lz", 1.0);
  const auto s_inf = params.get<std::vector<double>>("s_inf", {0.0});
  const auto expect = params.get<std::vector<double>>("expect", {});
  const double tol = params.get("tol", 1e-9);
  require(expect.empty() || expect.size() == s_inf.size(), ErrorCode::config,
          "'params.expect' needs one value per s_inf");
  return [=](ExperimentReport& rep) {
    rep.columns = {"lz", "s_inf", "x", "p0"};
    for (std::size_t i = 0; i < s_inf.size(); ++i) {
      const double v = p0_threshold(lz, s_inf[i]);
      add_row(rep, {num(lz), num(s_inf[i]), num(2.0 * std::numbers::sqrt2 * lz * s_inf[i]), num(v)});
      const std::string rec = "s_inf=" + num(s_inf[i]);
      rep.estimates.push_back({rec + " p0", exact(v)});
      if (!expect.empty())
        add_check(rep, rec, std::abs(v - expect[i]) <= tol, num(v) + " vs " + num(expect[i]));
    }
  };
}

Runner weaker_bmo_kind(Reader& root, const Env&) {
  auto params = root.child("params");
  const double eta = params.get("eta", 0.6), alpha = params.get("alpha", 0.25), beta = params.get("beta", 0.7);
  const auto n_max = params.get<unsigned>("n_max", 12);
  return [=](ExperimentReport& rep) {
    rep.columns = {"n", "s2_lower", "s2_computed", "s2eta_partial", "lexp_partial", "orlicz_computed",
                   "orlicz_exact"};
    const auto r = weaker_bmo_construction(eta, alpha, beta, n_max);
    for (unsigned n = 1; n <= n_max; ++n) {
      std::vector<std::string> row{num(std::size_t(n))};
      const auto it = std::find(r.n.begin(), r.n.end(), n);
      if (it == r.n.end()) {
        row.insert(row.end(), 4, "");
      } else {
        const auto i = static_cast<std::size_t>(it - r.n.begin());
        for (double v : {r.s2_lower[i], r.s2_computed[i], r.s2eta_partial[i], r.lexp_partial[i]}) row.push_back(num(v));
      }
      row.push_back(num(r.orlicz_computed[n - 1]));
      row.push_back(num(r.orlicz_exact[n - 1]));
      add_row(rep, std::move(row));
    }
    rep.estimates.push_back({"s2eta_tail", exact(r.s2eta_tail)});
    rep.estimates.push_back({"lexp_tail", exact(r.lexp_tail)});
    add_check(rep, "s2 lower bounds", r.lower_bounds_grow, "consecutive ratio >= 2^(beta - 1/2)");
    add_check(rep, "s2 computed", r.computed_dominates, "computed BMO(S_2) norm >= lower bound");
    add_check(rep, "partial sums", r.partial_sums_cauchy,
              "tails " + num(r.s2eta_tail) + " and " + num(r.lexp_tail) + " below 0.01");
    add_check(rep, "orlicz", r.orlicz_exact_match, "two-point L_exp norms match 2^(alpha n) to 1e-8");
  };
}

BsdeSolution solve_on(const BsdePreset& preset, const GridPtr& grid) {
  return solve_markovian(preset.problem, grid, preset.solver);
}

Runner bsde_oracle_kind(Reader& root, const Env&) {
  const auto grid = read_grid(root, 100);
  auto params = root.child("params");
  const auto names =
      params.get<std::vector<std::string>>("presets", {"heat", "linear-oracle", "quadratic-cole-hopf"});
  const bool doubling = params.get("doubling", true);
  std::vector<BsdePreset> presets;
  for (const auto& n : names) presets.push_back(bsde_preset(n));
  return [=](ExperimentReport& rep) {
    rep.columns = {"preset", "M", "y0", "oracle", "abs_error", "tolerance", "y0_doubled", "self_difference"};
    for (auto preset : presets) {
      const std::string name = preset.problem.name;
      const double x0 = preset.problem.model.x0;
      const double y0 = solve_on(preset, grid).y0(x0);
      double fine = NAN, diff = NAN;
      if (doubling) {
        preset.solver.space_nodes = 2 * preset.solver.space_nodes - 1;
        fine = solve_on(preset, make_uniform_grid(grid->horizon(), 2 * grid->cells())).y0(x0);
        diff = std::abs(fine - y0);
      }
      const double oracle = preset.y0_oracle.value_or(NAN);
      const double err = std::abs(y0 - oracle);
      add_row(rep, {name, num(grid->cells()), num(y0), num(oracle), num(err), num(preset.tolerance), num(fine),
                    num(diff)});
      rep.estimates.push_back({name + " y0", exact(y0)});
      if (preset.y0_oracle)
        add_check(rep, name + " oracle", err <= preset.tolerance,
                  "|" + num(y0) + " - " + num(oracle) + "| <= " + num(preset.tolerance));
      if (doubling)
        add_check(rep, name + " doubling", diff < preset.tolerance,
                  "|y0(2M) - y0(M)| = " + num(diff) + " < " + num(preset.tolerance));
    }
  };
}

Runner bsde_stability_kind(Reader& root, const Env& env) {
  const auto grid = read_grid(root);
  const auto cfg = read_mc(root, env);
  auto params = root.child("params");
  const auto preset = bsde_preset(params.get<std::string>("preset", "ou-lipschitz"));
  const double p = params.get("p", 2.0), t = params.get("t", 0.0), a = params.get("a", 0.5);
  const auto hs = params.get<std::vector<double>>("hs", {0.25, 0.125, 0.0625, 0.03125, 0.015625});
  const double max_spread = params.get("max_spread", 5.0);
  return [=](ExperimentReport& rep) {
    rep.columns = {"h", "sup_diff", "defect_z", "z_diff", "terminal", "generator", "sup_y", "lhs", "lhs_se",
                   "rhs", "rhs_se", "ratio", "ratio_se", "exits", "anomaly"};
    const auto sol = solve_on(preset, grid);
    auto row = [&](double h, const StabilityReport& s) {
      add_row(rep, {num(h), num(s.sup_diff.value), num(s.defect_z.value), num(s.z_diff.value),
                    num(s.terminal.value), num(s.generator.value), num(s.sup_y.value), num(s.lhs.value),
                    num(s.lhs.std_error), num(s.rhs.value), num(s.rhs.std_error), num(s.ratio.value),
                    num(s.ratio.std_error), num(s.exits), flag(s.anomaly)});
    };
    const auto zero = stability_check(preset.problem, sol, RotationProfile::constant(grid, 0.0), t, p, cfg);
    row(0.0, zero);
    add_check(rep, "phi = psi", zero.lhs.value == 0.0 && zero.rhs.value == 0.0,
              "lhs " + num(zero.lhs.value) + ", rhs " + num(zero.rhs.value));
    double lo = INFINITY, hi = 0.0;
    for (double h : hs) {
      const auto s = stability_check(preset.problem, sol, RotationProfile::indicator(grid, a, a + h), t, p, cfg);
      row(h, s);
      const std::string rec = "h=" + num(h);
      rep.estimates.push_back({rec + " ratio", s.ratio});
      add_check(rep, rec, std::isfinite(s.ratio.value) && !s.anomaly,
                "ratio " + num(s.ratio.value) + (s.anomaly ? ", rhs vanishes while lhs does not" : ""));
      lo = std::min(lo, s.ratio.value);
      hi = std::max(hi, s.ratio.value);
    }
    rep.estimates.push_back({"ratio_spread", exact(hi / lo)});
    add_check(rep, "ratio spread", hi / lo <= max_spread, "max/min " + num(hi / lo) + " <= " + num(max_spread));
  };
}

Runner bsde_variation_kind(Reader& root, const Env& env) {
  const auto grid = read_grid(root);
  const auto cfg = read_mc(root, env);
  auto params = root.child("params");
  const auto preset = bsde_preset(params.get<std::string>("preset", "linear-terminal"));
  const double p = params.get("p", 2.0), s = params.get("s", 0.25);
  const auto hs = params.get<std::vector<double>>("hs", {0.25, 0.125, 0.0625, 0.03125, 0.015625});
  const auto expect = params.opt<double>("expect_slope");
  const double tol = params.get("slope_tol", 0.02);
  return [=](ExperimentReport& rep) {
    rep.columns = {"s", "t", "lhs", "lhs_se", "drift", "terminal", "generator", "rhs", "ratio"};
    const auto sol = solve_on(preset, grid);
    std::vector<std::pair<double, double>> pairs;
    for (double h : hs) pairs.push_back({s, s + h});
    const auto v = variation_check(preset.problem, sol, p, pairs, cfg);
    for (const auto& r : v.rows) {
      add_row(rep, {num(r.s), num(r.t), num(r.lhs.value), num(r.lhs.std_error), num(r.drift.value),
                    num(r.terminal.value), num(r.generator.value), num(r.rhs), num(r.ratio)});
      rep.estimates.push_back({interval_name(r.s, r.t) + " lhs", r.lhs});
    }
    rep.estimates.push_back({"slope", {v.slope, 0.0, cfg.n_samples}});
    if (expect)
      add_check(rep, "slope", std::abs(v.slope - *expect) <= tol,
                num(v.slope) + " vs " + num(*expect) + " +- " + num(tol));
    add_check(rep, "exits", true, num(v.exits) + " path nodes left the spatial domain");
  };
}

Runner bv_embedding_kind(Reader& root, const Env& env) {
  const auto grid = read_grid(root, 128);
  const auto cfg = read_mc(root, env);
  auto params = root.child("params");
  const auto preset = bsde_preset(params.get<std::string>("preset", "bv-terminal"));
  const auto qs = params.get<std::vector<double>>("qs", {2.0, 4.0});
  const auto hs = params.get<std::vector<double>>("hs", {0.25, 0.125, 0.0625, 0.03125, 0.015625});
  const double rel_tol = params.get("slope_rel_tol", 0.15);
  const double p_base = params.get("p", 2.0);
  return [=](ExperimentReport& rep) {
    rep.columns = {"q", "h", "lhs", "lhs_se", "terminal", "terminal_se", "terminal_oracle", "embedding_bound"};
    const auto sol = solve_on(preset, grid);
    const double T = grid->horizon();
    const double density_sup = 1.0 / std::sqrt(2.0 * std::numbers::pi * T);
    std::vector<std::pair<double, double>> pairs;
    for (double h : hs) pairs.push_back({T - h, T});
    for (double q : qs) {
      const auto v = variation_check(preset.problem, sol, q, pairs, cfg);
      for (std::size_t i = 0; i < v.rows.size(); ++i) {
        const auto& r = v.rows[i];
        const double h = hs[i];
        // sign change of (W_T, W_T^phi) with correlation (T - h) / T
        const double oracle = std::pow(std::acos((T - h) / T) / std::numbers::pi, 1.0 / q);
        const double bound = bv_embedding_bound(p_base, q, density_sup, std::sqrt(2.0 * h) * gaussian_norm(p_base));
        add_row(rep, {num(q), num(h), num(r.lhs.value), num(r.lhs.std_error), num(r.terminal.value),
                      num(r.terminal.std_error), num(oracle), num(bound)});
        const std::string rec = "q=" + num(q) + " h=" + num(h);
        rep.estimates.push_back({rec + " terminal", r.terminal});
        add_check(rep, rec + " oracle", std::abs(r.terminal.value - oracle) <= 3.0 * r.terminal.std_error,
                  num(r.terminal.value) + " vs " + num(oracle) + " within 3 stderr");
        add_check(rep, rec + " embedding", r.terminal.value <= bound, num(r.terminal.value) + " <= " + num(bound));
      }
      const double target = 1.0 / (2.0 * q);
      rep.estimates.push_back({"q=" + num(q) + " slope", {v.slope, 0.0, cfg.n_samples}});
      add_check(rep, "q=" + num(q) + " slope", std::abs(v.slope - target) <= rel_tol * target,
                num(v.slope) + " vs 1/(2q) = " + num(target));
    }
  };
}

using KindParser = Runner (*)(Reader&, const Env&);

const std::map<std::string, KindParser>& kind_parsers() {
  static const std::map<std::string, KindParser> m = {
      {"besov-norm", besov_norm_kind},       {"bmo-sweep", bmo_sweep_kind},
      {"bsde-oracle", bsde_oracle_kind},     {"bsde-stability", bsde_stability_kind},
      {"bsde-variation", bsde_variation_kind}, {"bv-embedding", bv_embedding_kind},
      {"chaos-check", chaos_kind},           {"counterexample", counterexample_kind},
      {"p0", p0_kind},                       {"phi2-equivalence", phi2_kind},
      {"rh-bound", rh_bound_kind},           {"sandwich", sandwich_kind},
      {"weaker-bmo", weaker_bmo_kind},
  };
  return m;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

YAML::Node load_yaml(const std::string& text, const std::string& what) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    fail(ErrorCode::config, "cannot parse " + what + ": " + e.what());
  }
}

}  // namespace

bool ExperimentReport::passed() const { return first_failure() == nullptr; }

const ContractCheck* ExperimentReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.pass) return &c;
  return nullptr;
}

std::string ExperimentReport::csv() const {
  std::ostringstream os;
  os << "# wienerlab-csv schema=" << kCsvSchemaVersion << " experiment=" << experiment << " seed=" << seed << "\n";
  std::vector<std::string> head;
  for (const auto& c : columns) head.push_back(csv_cell(c));
  os << join(head, ",") << "\n";
  for (const auto& row : rows) {
    std::vector<std::string> cells;
    for (const auto& c : row) cells.push_back(csv_cell(c));
    os << join(cells, ",") << "\n";
  }
  return os.str();
}

std::string ExperimentReport::json() const {
  auto number = [](double v) -> Json { return std::isfinite(v) ? Json(v) : Json(num(v)); };
  Json j;
  j["experiment"] = experiment;
  j["name"] = name;
  j["seed"] = seed;
  j["schema_version"] = kCsvSchemaVersion;
  j["inputs"] = inputs_json.empty() ? Json::object() : Json::parse(inputs_json);
  j["estimates"] = Json::array();
  for (const auto& e : estimates)
    j["estimates"].push_back(
        {{"name", e.name}, {"value", number(e.estimate.value)}, {"stderr", number(e.estimate.std_error)},
         {"n", e.estimate.n}});
  j["checks"] = Json::array();
  for (const auto& c : checks) j["checks"].push_back({{"record", c.record}, {"pass", c.pass}, {"detail", c.detail}});
  j["pass"] = passed();
  j["wall_time_seconds"] = wall_seconds;
  return j.dump(2) + "\n";
}

ExperimentReport run_experiment(const std::string& config_text, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const YAML::Node doc = load_yaml(config_text, "config");
  ParseContext ctx;
  Reader root(ctx, doc, "");
  ExperimentReport rep;
  rep.experiment = root.req<std::string>("experiment");
  const auto it = kind_parsers().find(rep.experiment);
  if (it == kind_parsers().end()) fail(ErrorCode::config, "unknown experiment kind '" + rep.experiment + "'");
  rep.name = root.get<std::string>("name", rep.experiment);
  Env env;
  env.seed = root.req<std::uint64_t>("seed");
  const auto config_threads = root.get<unsigned>("threads", 1);
  env.threads = opts.threads ? opts.threads : config_threads;
  rep.seed = env.seed;
  auto output = root.child("output");
  rep.out_dir = output.get<std::string>("dir", "results");
  const Runner run = it->second(root, env);
  ctx.check();
  rep.inputs_json = yaml_to_json(doc).dump();
  run(rep);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

RunOutcome run_config_file(const std::string& path, const RunOptions& opts) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  RunOutcome out;
  out.report = run_experiment(ss.str(), opts);
  std::string dir = out.report.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) dir = env;
  if (opts.out_dir) dir = *opts.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create output directory '" + dir + "': " + ec.message());
  const auto stem = std::filesystem::path(dir) / out.report.name;
  out.csv_path = stem.string() + ".csv";
  out.json_path = stem.string() + ".json";
  for (const auto& [file, text] : {std::pair{out.csv_path, out.report.csv()}, {out.json_path, out.report.json()}}) {
    std::ofstream os(file, std::ios::binary);
    os << text;
    if (!os) fail(ErrorCode::io, "cannot write '" + file + "'");
  }
  if (const auto* f = out.report.first_failure()) {
    out.exit_code = 2;
    out.failing_record = f->record + ": " + f->detail;
  }
  return out;
}

std::vector<std::string> experiment_kinds() {
  std::vector<std::string> out;
  for (const auto& [k, _] : kind_parsers()) out.push_back(k);
  return out;
}

std::string catalog_text() {
  std::ostringstream os;
  auto section = [&os](const char* title, const std::map<std::string, CatalogEntry>& m) {
    os << title << ":\n";
    for (const auto& [name, e] : m) os << "  " << name << "\n    params: " << e.params << "\n    " << e.description << "\n";
  };
  os << "experiments:\n";
  for (const auto& [name, k] : kind_catalog()) {
    os << "  " << name << "\n";
    if (!k.keys.empty()) os << "    sections: " << k.keys << "\n";
    os << "    params: " << k.params << "\n";
  }
  section("functionals", functional_catalog());
  section("phi", phi_catalog());
  os << "bsde-presets:\n";
  for (const auto& name : bsde_preset_names()) os << "  " << name << "\n    " << bsde_preset(name).description << "\n";
  return os.str();
}

FunctionalPtr make_functional(GridPtr grid, const std::string& name, const std::string& params_yaml) {
  ParseContext ctx;
  Reader r(ctx, load_yaml(params_yaml.empty() ? "{}" : params_yaml, "functional parameters"), "");
  auto f = functional_from(r, name, grid);
  ctx.check();
  return f;
}

PhiPtr make_phi(GridPtr grid, const std::string& name, const std::string& params_yaml) {
  ParseContext ctx;
  Reader r(ctx, load_yaml(params_yaml.empty() ? "{}" : params_yaml, "Phi parameters"), "");
  auto phi = phi_from(r, name, grid);
  ctx.check();
  return phi;
}

}  // namespace wlab
