#include "shelab/io/serialize.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "shelab/errors.hpp"

namespace shelab::io {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("not a number: '" + std::string(s) + "'");
  return x;
}

Json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

double number_from(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_double(j.get<std::string>());
  throw ConfigError("expected a number, got " + j.dump());
}

namespace {

template <class T>
Json opt(const std::optional<T>& x) {
  if (!x) return nullptr;
  if constexpr (std::is_same_v<T, double>)
    return number(*x);
  else
    return to_json(*x);
}

Json numbers(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

std::vector<double> numbers_from(const Json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number_from(x));
  return out;
}

}  // namespace

Json to_json(const models::ModelSpec& s) {
  Json j;
  j["family"] = models::to_string(s.family);
  Json p = Json::object();
  for (const auto& [k, v] : s.params) p[k] = number(v);
  j["params"] = p;
  j["domain"] = models::to_string(s.domain);
  j["symmetry"] = models::to_string(s.symmetry);
  if (s.family == models::Family::tabulated) {
    j["knots_x"] = numbers(s.knots_x);
    j["knots_y"] = numbers(s.knots_y);
  }
  j["cutoff"] = opt(s.cutoff);
  return j;
}

models::ModelSpec model_spec_from_json(const Json& j) {
  models::ModelSpec s;
  s.family = models::family_from_string(j.at("family").get<std::string>());
  if (j.contains("params"))
    for (const auto& [k, v] : j.at("params").items()) s.params[k] = number_from(v);
  if (j.contains("domain")) s.domain = models::domain_from_string(j.at("domain").get<std::string>());
  if (j.contains("symmetry")) s.symmetry = models::symmetry_from_string(j.at("symmetry").get<std::string>());
  if (j.contains("knots_x")) s.knots_x = numbers_from(j.at("knots_x"));
  if (j.contains("knots_y")) s.knots_y = numbers_from(j.at("knots_y"));
  if (j.contains("cutoff") && !j.at("cutoff").is_null()) s.cutoff = number_from(j.at("cutoff"));
  return s;
}

Json to_json(const spde::SolverConfig& c) {
  Json j;
  j["scheme"] = spde::to_string(c.scheme);
  j["dt"] = number(c.dt);
  j["nx"] = c.nx;
  j["horizon"] = number(c.horizon);
  j["cutoff"] = opt(c.cutoff_level);
  j["u_cap"] = number(c.u_cap);
  j["alpha"] = number(c.alpha);
  j["eps_floor"] = number(c.eps_floor);
  j["taming"] = c.taming;
  j["kernel_truncation"] = c.kernel_truncation ? Json(*c.kernel_truncation) : Json(nullptr);
  j["literal_vminus_drift"] = c.literal_vminus_drift;
  return j;
}

spde::SolverConfig solver_config_from_json(const Json& j) {
  spde::SolverConfig c;
  c.scheme = spde::scheme_from_string(j.at("scheme").get<std::string>());
  c.dt = number_from(j.at("dt"));
  c.nx = j.at("nx").get<int>();
  c.horizon = number_from(j.at("horizon"));
  if (!j.at("cutoff").is_null()) c.cutoff_level = number_from(j.at("cutoff"));
  c.u_cap = number_from(j.at("u_cap"));
  c.alpha = number_from(j.at("alpha"));
  c.eps_floor = number_from(j.at("eps_floor"));
  c.taming = j.at("taming").get<bool>();
  if (!j.at("kernel_truncation").is_null()) c.kernel_truncation = j.at("kernel_truncation").get<int>();
  c.literal_vminus_drift = j.at("literal_vminus_drift").get<bool>();
  return c;
}

Json to_json(const models::OsgoodVerdict& v) {
  Json j;
  j["classification"] = models::to_string(v.classification);
  j["partial_integral"] = number(v.partial_integral);
  j["explored_upper_limit"] = number(v.explored_upper_limit);
  j["value"] = opt(v.value);
  j["tail_estimate"] = number(v.tail_estimate);
  j["last_increment_ratio"] = number(v.last_increment_ratio);
  j["comparison_ratio_first"] = number(v.comparison_ratio_first);
  j["comparison_ratio_last"] = number(v.comparison_ratio_last);
  j["tail_evidence"] = v.tail_evidence;
  return j;
}

namespace {

Json witnesses(const std::vector<models::Witness>& ws) {
  Json a = Json::array();
  for (const auto& w : ws)
    a.push_back({{"condition", w.condition},
                 {"u", number(w.u)},
                 {"lhs", number(w.lhs)},
                 {"rhs", number(w.rhs)},
                 {"violated", w.violated}});
  return a;
}

}  // namespace

Json to_json(const models::AssumptionReport& r) {
  Json j;
  j["case"] = models::to_string(r.which);
  j["verdict"] = models::to_string(r.verdict);
  j["checked_range"] = {number(r.checked_range.lo), number(r.checked_range.hi)};
  j["notes"] = r.notes;
  if (r.which == models::AssumptionCase::a) {
    j["theta_user"] = number(r.theta_user);
    j["theta_fitted"] = number(r.theta_fitted);
    j["theta_used"] = number(r.theta_used);
    j["tail_start"] = number(r.tail_start);
    j["h_scale_headroom"] = number(r.h_scale_headroom);
    j["admissible_amplitude"] = opt(r.admissible_amplitude);
    j["drift_constant"] = number(r.drift_constant);
    j["sigma_constant_fitted"] = number(r.sigma_constant_fitted);
  }
  j["osgood"] = opt(r.osgood);
  j["witnesses"] = witnesses(r.witnesses);
  return j;
}

Json to_json(const models::CorollaryReport& r) {
  Json j;
  j["verdict"] = models::to_string(r.verdict);
  j["growth_branch"] = models::to_string(r.growth_branch);
  j["small_noise_branch"] = models::to_string(r.small_noise_branch);
  j["osgood"] = opt(r.osgood);
  j["witnesses"] = witnesses(r.witnesses);
  return j;
}

Json to_json(const diagnostics::Classification& c) {
  return {{"outcome", diagnostics::to_string(c.outcome)}, {"time", number(c.time)}, {"overflow", c.overflow}};
}

Json to_json(const diagnostics::StoppingRecord& r) {
  Json j;
  j["tau_inf_eps"] = opt(r.tau_inf_eps);
  j["tau_l1_M"] = opt(r.tau_l1_M);
  Json hits = Json::array();
  for (const auto& [level, t] : r.tau_infty_hits) hits.push_back({number(level), number(t)});
  j["tau_infty_hits"] = hits;
  Json rho = Json::array();
  for (const auto& e : r.rho_sequence) rho.push_back({number(e.t), e.level, diagnostics::to_string(e.direction)});
  j["rho_sequence"] = rho;
  j["classification"] = to_json(r.classification);
  j["halted"] = r.halted;
  return j;
}

Json to_json(const diagnostics::BoundCheck& b) {
  return {{"max_excess", number(b.max_excess)},
          {"at_time", number(b.at_time)},
          {"constant", number(b.constant)},
          {"pass", b.pass}};
}

Json to_json(const diagnostics::DoobRow& r) {
  return {{"M", number(r.M)},         {"paths", r.paths},         {"exceed", r.exceed},
          {"frequency", number(r.frequency)}, {"bound", number(r.bound)}, {"se", number(r.se)},
          {"vacuous", r.vacuous},      {"pass", r.pass}};
}

Json to_json(const diagnostics::MomentProbe& p) {
  Json pts = Json::array();
  for (const auto& pt : p.points)
    pts.push_back({{"T", number(pt.T)},
                   {"moment", number(pt.moment)},
                   {"se", number(pt.se)},
                   {"bound", number(pt.bound)},
                   {"dominated", pt.dominated}});
  return {{"p", number(p.p)},
          {"fitted_constant", number(p.fitted_constant)},
          {"slope", number(p.slope)},
          {"all_dominated", p.all_dominated},
          {"points", pts}};
}

Json to_json(const diagnostics::TriplingSummary& s) {
  return {{"paths", s.paths},
          {"mean_count_cap", number(s.mean_count_cap)},
          {"mean_count_double", number(s.mean_count_double)},
          {"paired_se", number(s.paired_se)},
          {"mean_sigma2", number(s.mean_sigma2)},
          {"implied_constant", number(s.implied_constant)},
          {"finite", s.finite},
          {"stable", s.stable},
          {"pass", s.pass}};
}

Json to_json(const diagnostics::WindowCheck& w) {
  return {{"m", w.m},
          {"window", number(w.window)},
          {"linf_after", number(w.linf_after)},
          {"target", number(w.target)},
          {"pass", w.pass}};
}

Json to_json(const spde::TrajectoryHeader& h) {
  Json j;
  j["role"] = h.role;
  j["config"] = to_json(h.config);
  j["master_seed"] = h.master_seed;
  j["path_id"] = h.path_id;
  j["refine_level"] = h.refine_level;
  j["extra"] = spde::to_string(h.extra);
  j["b"] = opt(h.b_spec);
  j["sigma"] = opt(h.sigma_spec);
  j["u0"] = numbers(h.u0);
  j["config_hash"] = h.config_hash;
  return j;
}

namespace {

Json model_json(const models::ScalarFunctionModel& m) {
  if (auto s = m.spec()) return to_json(*s);
  return m.describe();
}

}  // namespace

Json to_json(const experiments::ExperimentSpec& s) {
  Json j;
  j["name"] = s.name;
  Json pts = Json::array();
  for (const auto& p : s.points) {
    Json q;
    q["beta"] = number(p.beta);
    q["gamma"] = number(p.gamma);
    q["A"] = number(p.amplitude);
    q["b"] = model_json(p.b);
    q["sigma"] = model_json(p.sigma);
    q["h"] = p.h ? model_json(*p.h) : Json(nullptr);
    q["label"] = p.label;
    pts.push_back(q);
  }
  j["points"] = pts;
  j["solver"] = to_json(s.solver);
  j["replications"] = s.replications;
  j["master_seed"] = s.master_seed;
  j["u0"] = number(s.u0);
  j["refine"] = s.refine;
  return j;
}

Json to_json(const experiments::ExperimentResult& r) {
  Json j;
  j["header"] = r.header;
  j["name"] = r.name;
  j["config_hash"] = r.config_hash;
  j["master_seed"] = r.master_seed;
  j["version"] = r.version;
  j["incomplete"] = r.incomplete;
  j["wall_seconds"] = number(r.wall_seconds);
  Json pts = Json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"beta", number(p.beta)},
                   {"gamma", number(p.gamma)},
                   {"A", number(p.amplitude)},
                   {"label", p.label},
                   {"regime", p.regime},
                   {"R", p.replications},
                   {"explosions", p.explosions},
                   {"survivals", p.survivals},
                   {"inconclusive", p.inconclusive},
                   {"frequency", number(p.frequency)},
                   {"ci", {number(p.ci.lo), number(p.ci.hi)}},
                   {"t_q1", opt(p.q1_t)},
                   {"t_median", opt(p.median_t)},
                   {"t_q3", opt(p.q3_t)}});
  }
  j["points"] = pts;
  return j;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw ResourceError("SHA-256 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string canonical_hash(const Json& j) {
  // nlohmann::json keeps objects in key order
  return sha256_hex(nlohmann::json(j).dump());
}

std::string spec_hash(const experiments::ExperimentSpec& s) { return canonical_hash(to_json(s)); }

std::string to_csv(const experiments::ExperimentResult& r) {
  std::string out = "beta,gamma,A,R,explosions,survivals,inconclusive,freq,ci_lo,ci_hi,median_t,regime\n";
  auto f = [](double x) { return format_double(x); };
  for (const auto& p : r.points) {
    std::string regime = p.regime;
    for (char& ch : regime)
      if (ch == ',') ch = ';';
    out += f(p.beta) + "," + f(p.gamma) + "," + f(p.amplitude) + "," + std::to_string(p.replications) + "," +
           std::to_string(p.explosions) + "," + std::to_string(p.survivals) + "," + std::to_string(p.inconclusive) +
           "," + f(p.frequency) + "," + f(p.ci.lo) + "," + f(p.ci.hi) + "," +
           f(p.median_t.value_or(std::numeric_limits<double>::quiet_NaN())) + "," + regime + "\n";
  }
  return out;
}

}  // namespace shelab::io
