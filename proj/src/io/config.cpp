#include "shelab/io/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "shelab/errors.hpp"
#include "shelab/io/serialize.hpp"

namespace shelab::io {

namespace {

// Typed access to one TOML table with line-numbered errors and a check for
// unknown keys.
class Section {
 public:
  Section(const toml::table* tbl, std::string name, const std::string& source)
      : tbl_(tbl), name_(std::move(name)), source_(source) {}

  bool present() const { return tbl_ != nullptr; }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    const toml::node* n = tbl_ ? tbl_->get(key) : nullptr;
    if (n) os << ':' << n->source().begin.line;
    os << ": " << name_ << (name_.empty() ? "" : ".") << key << ": " << msg;
    throw ConfigError(os.str());
  }

  const toml::node* node(const std::string& key) {
    used_.insert(key);
    return tbl_ ? tbl_->get(key) : nullptr;
  }

  std::optional<double> number(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) return *v;
    fail(key, "expected a number");
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (n->is_integer()) return *n->value<std::int64_t>();
    fail(key, "expected an integer");
  }

  std::optional<bool> boolean(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (n->is_boolean()) return *n->value<bool>();
    fail(key, "expected true or false");
  }

  std::optional<std::string> string(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (n->is_string()) return *n->value<std::string>();
    fail(key, "expected a string");
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    const toml::array* a = n->as_array();
    if (!a) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : *a) {
      auto v = x.value<double>();
      if (!v) fail(key, "expected an array of numbers");
      out.push_back(*v);
    }
    return out;
  }

  std::optional<std::vector<std::string>> strings(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    const toml::array* a = n->as_array();
    if (!a) fail(key, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& x : *a) {
      auto v = x.value<std::string>();
      if (!v) fail(key, "expected an array of strings");
      out.push_back(*v);
    }
    return out;
  }

  /// Keys not consumed so far.
  std::vector<std::string> rest() const {
    std::vector<std::string> out;
    if (!tbl_) return out;
    for (const auto& [k, v] : *tbl_)
      if (!used_.count(std::string(k.str()))) out.emplace_back(k.str());
    return out;
  }

  void reject_rest() const {
    for (const auto& k : rest()) fail(k, "unknown key");
  }

  template <class T, class F>
  void read(const std::string& key, T& dst, F&& get) {
    if (auto v = get(key)) dst = static_cast<T>(*v);
  }

 private:
  const toml::table* tbl_;
  std::string name_;
  const std::string& source_;
  std::set<std::string> used_;
};

const toml::table* sub(const toml::table& root, std::initializer_list<const char*> path) {
  const toml::table* t = &root;
  for (const char* p : path) {
    const toml::node* n = t->get(p);
    if (!n) return nullptr;
    t = n->as_table();
    if (!t) return nullptr;
  }
  return t;
}

models::ModelSpec read_model(Section s) {
  models::ModelSpec spec;
  const auto family = s.string("family");
  if (!family) s.fail("family", "missing model family");
  try {
    spec.family = models::family_from_string(*family);
  } catch (const Error& e) {
    s.fail("family", e.what());
  }
  try {
    if (auto v = s.string("symmetry")) spec.symmetry = models::symmetry_from_string(*v);
  } catch (const Error& e) {
    s.fail("symmetry", e.what());
  }
  try {
    if (auto v = s.string("domain")) spec.domain = models::domain_from_string(*v);
  } catch (const Error& e) {
    s.fail("domain", e.what());
  }
  spec.cutoff = s.number("cutoff");
  if (auto v = s.numbers("knots_x")) spec.knots_x = *v;
  if (auto v = s.numbers("knots_y")) spec.knots_y = *v;
  for (const auto& k : s.rest()) {
    if (auto v = s.number(k)) spec.params[k] = *v;
  }
  try {
    models::ScalarFunctionModel probe(spec);
  } catch (const Error& e) {
    s.fail("family", e.what());
  }
  return spec;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ':' << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
  RunConfig cfg;

  Section top(&root, "", source);
  for (const char* name : {"model", "solver", "experiment", "check"}) top.node(name);
  if (auto v = top.number("u0")) cfg.u0 = *v;
  if (auto v = top.integer("seed")) {
    if (*v < 0) top.fail("seed", "seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(*v);
  }
  top.reject_rest();

  if (const toml::table* m = sub(root, {"model"})) {
    Section ms(m, "model", source);
    for (const char* name : {"b", "sigma", "h"}) ms.node(name);
    ms.reject_rest();
  }
  if (auto t = sub(root, {"model", "b"})) cfg.b = read_model(Section(t, "model.b", source));
  if (auto t = sub(root, {"model", "sigma"})) cfg.sigma = read_model(Section(t, "model.sigma", source));
  if (auto t = sub(root, {"model", "h"})) cfg.h = read_model(Section(t, "model.h", source));

  Section sol(sub(root, {"solver"}), "solver", source);
  auto& sc = cfg.solver;
  if (auto v = sol.string("scheme")) {
    try {
      sc.scheme = spde::scheme_from_string(*v);
    } catch (const Error& e) {
      sol.fail("scheme", e.what());
    }
  }
  sol.read("dt", sc.dt, [&](auto& k) { return sol.number(k); });
  sol.read("nx", sc.nx, [&](auto& k) { return sol.integer(k); });
  sol.read("horizon", sc.horizon, [&](auto& k) { return sol.number(k); });
  sc.cutoff_level = sol.number("cutoff");
  sol.read("u_cap", sc.u_cap, [&](auto& k) { return sol.number(k); });
  sol.read("alpha", sc.alpha, [&](auto& k) { return sol.number(k); });
  sol.read("eps_floor", sc.eps_floor, [&](auto& k) { return sol.number(k); });
  sol.read("taming", sc.taming, [&](auto& k) { return sol.boolean(k); });
  if (auto v = sol.integer("kernel_truncation")) sc.kernel_truncation = static_cast<int>(*v);
  sol.read("literal_vminus_drift", sc.literal_vminus_drift, [&](auto& k) { return sol.boolean(k); });
  sol.reject_rest();

  Section ex(sub(root, {"experiment"}), "experiment", source);
  auto& e = cfg.experiment;
  ex.read("kind", e.kind, [&](auto& k) { return ex.string(k); });
  if (e.kind != "phase-diagram" && e.kind != "osgood-sweep") ex.fail("kind", "expected phase-diagram or osgood-sweep");
  if (auto v = ex.integer("seed")) {
    if (*v < 0) ex.fail("seed", "seed must be nonnegative");
    e.seed = static_cast<std::uint64_t>(*v);
  }
  ex.read("replications", e.replications, [&](auto& k) { return ex.integer(k); });
  if (e.replications < 1) ex.fail("replications", "need at least one replication");
  ex.read("workers", e.workers, [&](auto& k) { return ex.integer(k); });
  if (e.workers < 1) ex.fail("workers", "need at least one worker");
  ex.read("u0", e.u0, [&](auto& k) { return ex.number(k); });
  ex.read("refine", e.refine, [&](auto& k) { return ex.boolean(k); });
  ex.read("betas", e.betas, [&](auto& k) { return ex.numbers(k); });
  ex.read("gammas", e.gammas, [&](auto& k) { return ex.numbers(k); });
  ex.read("amplitude", e.amplitude, [&](auto& k) { return ex.number(k); });
  ex.read("drift", e.drift, [&](auto& k) { return ex.string(k); });
  if (e.drift != "u-log-u" && e.drift != "u-log-u-loglog-u") ex.fail("drift", "expected u-log-u or u-log-u-loglog-u");
  ex.read("include_gap", e.include_gap, [&](auto& k) { return ex.boolean(k); });
  e.budget_seconds = ex.number("budget_seconds");
  ex.reject_rest();

  Section ck(sub(root, {"check"}), "check", source);
  auto& c = cfg.check;
  ck.read("cases", c.cases, [&](auto& k) { return ck.strings(k); });
  for (const auto& name : c.cases)
    if (name != "a" && name != "b" && name != "corollary") ck.fail("cases", "unknown case '" + name + "'");
  ck.read("theta", c.theta, [&](auto& k) { return ck.number(k); });
  ck.read("C", c.C, [&](auto& k) { return ck.number(k); });
  ck.read("c", c.c, [&](auto& k) { return ck.number(k); });
  ck.read("gamma", c.gamma, [&](auto& k) { return ck.number(k); });
  ck.reject_rest();

  const double start = std::max({std::abs(cfg.u0), std::abs(e.u0), 1.0});
  try {
    spde::validate(sc, true, start);
  } catch (const ConfigError& err) {
    const std::string msg = err.what();
    const auto dot = msg.find('.'), colon = msg.find(':');
    if (msg.rfind("solver.", 0) == 0 && colon != std::string::npos)
      sol.fail(msg.substr(dot + 1, colon - dot - 1), msg.substr(colon + 2));
    throw;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string list(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + format_double(xs[i]);
  return out + "]";
}

void emit_model(std::ostringstream& os, const char* name, const std::optional<models::ModelSpec>& m) {
  if (!m) return;
  os << "\n[model." << name << "]\n";
  os << "family = " << quoted(models::to_string(m->family)) << '\n';
  os << "symmetry = " << quoted(models::to_string(m->symmetry)) << '\n';
  os << "domain = " << quoted(models::to_string(m->domain)) << '\n';
  if (m->cutoff) os << "cutoff = " << format_double(*m->cutoff) << '\n';
  if (!m->knots_x.empty()) os << "knots_x = " << list(m->knots_x) << '\n';
  if (!m->knots_y.empty()) os << "knots_y = " << list(m->knots_y) << '\n';
  for (const auto& [k, v] : m->params) os << k << " = " << format_double(v) << '\n';
}

// TOML floats need a fractional part or exponent.
std::string toml_float(double x) {
  std::string s = format_double(x);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

std::string effective_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "u0 = " << toml_float(cfg.u0) << '\n';
  os << "seed = " << cfg.seed << '\n';
  const auto& s = cfg.solver;
  os << "\n[solver]\n";
  os << "scheme = " << quoted(spde::to_string(s.scheme)) << '\n';
  os << "dt = " << toml_float(s.dt) << '\n';
  os << "nx = " << s.nx << '\n';
  os << "horizon = " << toml_float(s.horizon) << '\n';
  if (s.cutoff_level) os << "cutoff = " << toml_float(*s.cutoff_level) << '\n';
  os << "u_cap = " << toml_float(s.u_cap) << '\n';
  os << "alpha = " << toml_float(s.alpha) << '\n';
  os << "eps_floor = " << toml_float(s.eps_floor) << '\n';
  os << "taming = " << (s.taming ? "true" : "false") << '\n';
  if (s.kernel_truncation) os << "kernel_truncation = " << *s.kernel_truncation << '\n';
  os << "literal_vminus_drift = " << (s.literal_vminus_drift ? "true" : "false") << '\n';
  emit_model(os, "b", cfg.b);
  emit_model(os, "sigma", cfg.sigma);
  emit_model(os, "h", cfg.h);
  const auto& e = cfg.experiment;
  os << "\n[experiment]\n";
  os << "kind = " << quoted(e.kind) << '\n';
  os << "seed = " << e.seed << '\n';
  os << "replications = " << e.replications << '\n';
  os << "workers = " << e.workers << '\n';
  os << "u0 = " << toml_float(e.u0) << '\n';
  os << "refine = " << (e.refine ? "true" : "false") << '\n';
  os << "betas = " << list(e.betas) << '\n';
  os << "gammas = " << list(e.gammas) << '\n';
  os << "amplitude = " << toml_float(e.amplitude) << '\n';
  os << "drift = " << quoted(e.drift) << '\n';
  os << "include_gap = " << (e.include_gap ? "true" : "false") << '\n';
  if (e.budget_seconds) os << "budget_seconds = " << toml_float(*e.budget_seconds) << '\n';
  const auto& c = cfg.check;
  os << "\n[check]\ncases = [";
  for (std::size_t i = 0; i < c.cases.size(); ++i) os << (i ? ", " : "") << quoted(c.cases[i]);
  os << "]\n";
  os << "theta = " << toml_float(c.theta) << '\n';
  os << "C = " << toml_float(c.C) << '\n';
  os << "c = " << toml_float(c.c) << '\n';
  os << "gamma = " << toml_float(c.gamma) << '\n';
  return os.str();
}

std::string config_hash(const RunConfig& cfg) {
  Json j;
  j["u0"] = number(cfg.u0);
  j["seed"] = cfg.seed;
  j["solver"] = to_json(cfg.solver);
  j["b"] = cfg.b ? to_json(*cfg.b) : Json(nullptr);
  j["sigma"] = cfg.sigma ? to_json(*cfg.sigma) : Json(nullptr);
  j["h"] = cfg.h ? to_json(*cfg.h) : Json(nullptr);
  const auto& e = cfg.experiment;
  Json ej;
  ej["kind"] = e.kind;
  ej["seed"] = e.seed;
  ej["replications"] = e.replications;
  ej["u0"] = number(e.u0);
  ej["refine"] = e.refine;
  Json betas = Json::array(), gammas = Json::array();
  for (double b : e.betas) betas.push_back(number(b));
  for (double g : e.gammas) gammas.push_back(number(g));
  ej["betas"] = betas;
  ej["gammas"] = gammas;
  ej["amplitude"] = number(e.amplitude);
  ej["drift"] = e.drift;
  ej["include_gap"] = e.include_gap;
  j["experiment"] = ej;
  const auto& c = cfg.check;
  j["check"] = {{"cases", c.cases}, {"theta", number(c.theta)}, {"C", number(c.C)}, {"c", number(c.c)},
                {"gamma", number(c.gamma)}};
  return canonical_hash(j);
}

}  // namespace shelab::io
