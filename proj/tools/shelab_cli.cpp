#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <new>
#include <optional>

#include <CLI11.hpp>

#include "shelab/diagnostics/audits.hpp"
#include "shelab/diagnostics/explosion.hpp"
#include "shelab/diagnostics/ledger.hpp"
#include "shelab/diagnostics/lemmas.hpp"
#include "shelab/errors.hpp"
#include "shelab/experiments/campaigns.hpp"
#include "shelab/io/config.hpp"
#include "shelab/io/dump.hpp"
#include "shelab/io/manifest.hpp"
#include "shelab/io/serialize.hpp"

namespace fs = std::filesystem;
using namespace shelab;

namespace {

enum Exit { kOk = 0, kViolated = 1, kConfig = 2, kResource = 3, kIncomplete = 4 };

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> dt;
  std::optional<int> nx;
  std::optional<double> horizon;
  std::optional<double> ucap;
  bool refine = false;
  std::string out_dir;
};

fs::path out_dir(const Common& c) {
  if (!c.out_dir.empty()) return c.out_dir;
  if (const char* env = std::getenv("SHELAB_OUT_DIR"); env && *env) return env;
  return "shelab-out";
}

void apply(const Common& c, io::RunConfig& cfg) {
  if (c.dt) cfg.solver.dt = *c.dt;
  if (c.nx) cfg.solver.nx = *c.nx;
  if (c.horizon) cfg.solver.horizon = *c.horizon;
  if (c.ucap) cfg.solver.u_cap = *c.ucap;
  if (c.seed) {
    cfg.seed = *c.seed;
    cfg.experiment.seed = *c.seed;
  }
  if (c.workers) cfg.experiment.workers = *c.workers;
  if (c.refine) cfg.experiment.refine = true;
}

models::ScalarFunctionModel model_or_zero(const std::optional<models::ModelSpec>& s) {
  return s ? models::ScalarFunctionModel(*s) : models::ScalarFunctionModel();
}

// Writes text, registers the file in the manifest.
void write_text(const fs::path& dir, const std::string& name, const std::string& text, io::RunManifest& m) {
  const fs::path p = dir / name;
  std::ofstream out(p);
  if (!out) throw ResourceError("cannot write " + p.string());
  out << text;
  out.close();
  if (!out) throw ResourceError("failed writing " + p.string());
  m.add_file(dir, p);
}

io::RunManifest start_manifest(const std::string& command, const std::string& hash, std::uint64_t seed) {
  io::RunManifest m;
  m.command = command;
  m.spec_hash = hash;
  m.master_seed = seed;
  m.version = SHELAB_VERSION;
  m.started = io::utc_timestamp();
  m.host = io::host_descriptor();
  return m;
}

void finish_manifest(const fs::path& dir, io::RunManifest& m) {
  m.finished = io::utc_timestamp();
  io::append_manifest(dir, m);
}

int cmd_simulate(const std::string& path, const Common& c, bool snapshots) {
  io::RunConfig cfg = io::load_config(path);
  apply(c, cfg);
  spde::validate(cfg.solver, true, std::max(std::abs(cfg.u0), 1.0));
  const auto b = model_or_zero(cfg.b);
  const auto sigma = model_or_zero(cfg.sigma);
  const fs::path dir = out_dir(c);
  fs::create_directories(dir);
  const std::string hash = io::config_hash(cfg);
  auto manifest = start_manifest("simulate", hash, cfg.seed);

  spde::CoupledOptions opts;
  opts.record.snapshot_stride = snapshots ? 1 : 0;
  const auto grid = cfg.solver.grid();
  auto res = spde::simulate_coupled(spde::FieldState::constant(grid, cfg.u0), cfg.solver, b, sigma, cfg.seed, 0, opts);
  for (auto* tr : {&res.u, &res.v, &res.vminus}) {
    tr->header.config_hash = hash;
    for (const auto& f : io::write_trajectory(dir / ("trajectory-" + tr->header.role), *tr)) manifest.add_file(dir, f);
  }
  const auto verdict = diagnostics::classify_explosion(res.u, cfg.solver.u_cap, cfg.solver.horizon, c.refine, b, sigma);
  io::Json summary;
  summary["config_hash"] = hash;
  summary["u"] = io::to_json(verdict.classification);
  summary["refine_note"] = verdict.note;
  summary["first_stop"] = io::number(res.first_stop);
  summary["first_stop_reason"] = res.first_stop_reason;
  summary["comparison_checks"] = res.comparison_checks;
  summary["comparison_violations"] = res.comparison_violations;
  summary["max_violation"] = io::number(res.max_violation);
  write_text(dir, "effective.toml", io::effective_config(cfg), manifest);
  write_text(dir, "summary.json", summary.dump(2) + "\n", manifest);
  finish_manifest(dir, manifest);
  std::cout << "u: " << diagnostics::to_string(verdict.classification.outcome) << " at t="
            << io::format_double(verdict.classification.time) << "; first stop " << res.first_stop_reason << " at t="
            << io::format_double(res.first_stop) << "; ordering violations " << res.comparison_violations << "\n";
  return kOk;
}

int cmd_check(const std::string& path, const Common& c) {
  io::RunConfig cfg = io::load_config(path);
  if (!cfg.b || !cfg.sigma) throw ConfigError(path + ": [model.b] and [model.sigma] are required for check");
  const models::ScalarFunctionModel b(*cfg.b), sigma(*cfg.sigma);
  std::optional<models::ScalarFunctionModel> h;
  if (cfg.h) h = models::ScalarFunctionModel(*cfg.h);
  const fs::path dir = out_dir(c);
  fs::create_directories(dir);
  auto manifest = start_manifest("check", io::config_hash(cfg), cfg.seed);
  write_text(dir, "effective.toml", io::effective_config(cfg), manifest);

  io::Json report;
  std::ostringstream text;
  bool violated = false;
  if (h) {
    try {
      const auto ov = models::osgood_classify(*h);
      report["osgood"] = io::to_json(ov);
      text << "osgood: " << models::to_string(ov.classification) << " (" << ov.tail_evidence << ")\n";
    } catch (const PreconditionError& e) {
      report["osgood"] = e.what();
      text << "osgood: not applicable: " << e.what() << "\n";
    }
    try {
      const auto cv = models::convexity_ratio_check(*h, models::log_grid(1e-2, 1e6, 400));
      report["convexity"] = {{"max_ratio", io::number(cv.max_ratio)}, {"argmax", io::number(cv.argmax)},
                             {"pass", cv.pass}};
      text << "convexity: max h h''/h'^2 = " << io::format_double(cv.max_ratio) << (cv.pass ? " (pass)" : " (fail)")
           << "\n";
    } catch (const SingularPointError& e) {
      report["convexity"] = {{"singular_point", io::number(e.point())}, {"pass", false}};
      text << "convexity: h' vanishes at u=" << io::format_double(e.point()) << "\n";
    }
  }
  for (const auto& name : cfg.check.cases) {
    if (name == "a" || name == "b") {
      const auto r = name == "a" ? models::check_assumption_a(b, sigma, h, cfg.check.theta, cfg.check.C)
                                 : models::check_assumption_b(b, sigma, h, cfg.check.c, cfg.check.C, cfg.check.gamma);
      report["case_" + name] = io::to_json(r);
      text << "case (" << name << "): " << models::to_string(r.verdict) << "\n";
      for (const auto& w : r.witnesses)
        if (w.violated)
          text << "  " << w.condition << " fails at u=" << io::format_double(w.u) << ": " << io::format_double(w.lhs)
               << " > " << io::format_double(w.rhs) << "\n";
      violated = violated || r.verdict == models::Verdict::violated;
    } else {
      if (!h) throw ConfigError(path + ": [model.h] is required for the corollary check");
      const auto r = models::check_corollary(b, sigma, *h, {});
      report["corollary"] = io::to_json(r);
      text << "corollary: " << models::to_string(r.verdict) << "\n";
      violated = violated || r.verdict == models::Verdict::violated;
    }
  }
  write_text(dir, "check-report.json", report.dump(2) + "\n", manifest);
  write_text(dir, "check-report.txt", text.str(), manifest);
  finish_manifest(dir, manifest);
  std::cout << text.str();
  return violated ? kViolated : kOk;
}

int cmd_phase_diagram(const std::string& path, const Common& c) {
  io::RunConfig cfg = io::load_config(path);
  apply(c, cfg);
  const auto& e = cfg.experiment;
  experiments::CampaignOptions opts;
  opts.replications = e.replications;
  opts.master_seed = e.seed;
  opts.workers = e.workers;
  opts.refine = e.refine;
  opts.u0 = e.u0;
  opts.budget_seconds = e.budget_seconds;
  const auto spec =
      e.kind == "osgood-sweep"
          ? experiments::osgood_sweep_spec(e.drift == "u-log-u" ? experiments::OsgoodDrift::u_log_u
                                                                : experiments::OsgoodDrift::u_log_u_loglog_u,
                                           e.gammas, e.include_gap, cfg.solver, opts)
          : experiments::phase_diagram_spec(e.betas, e.gammas, e.amplitude, cfg.solver, opts);
  const fs::path dir = out_dir(c);
  fs::create_directories(dir);
  auto manifest = start_manifest("phase-diagram", io::spec_hash(spec), e.seed);
  const auto res = experiments::run_ensemble(spec);
  manifest.incomplete = res.incomplete;

  std::ostringstream dat;
  dat << "# " << res.header << "\n# beta gamma A freq ci_lo ci_hi median_t\n";
  for (const auto& p : res.points)
    dat << io::format_double(p.beta) << ' ' << io::format_double(p.gamma) << ' ' << io::format_double(p.amplitude)
        << ' ' << io::format_double(p.frequency) << ' ' << io::format_double(p.ci.lo) << ' '
        << io::format_double(p.ci.hi) << ' '
        << io::format_double(p.median_t.value_or(std::numeric_limits<double>::quiet_NaN())) << '\n';
  io::Json full = io::to_json(res);
  full.erase("wall_seconds");
  write_text(dir, "results.csv", io::to_csv(res), manifest);
  write_text(dir, "results.json", full.dump(2) + "\n", manifest);
  write_text(dir, "results.dat", dat.str(), manifest);
  write_text(dir, "effective.toml", io::effective_config(cfg), manifest);
  finish_manifest(dir, manifest);
  std::cout << res.header << "\n" << io::to_csv(res);
  if (res.incomplete) {
    std::cerr << "campaign incomplete: resource budget exhausted\n";
    return kIncomplete;
  }
  return kOk;
}

int cmd_audit(const std::vector<std::string>& stems, const std::vector<std::string>& audits, const Common& c,
              std::optional<double> drift_constant, int m0) {
  const fs::path dir = out_dir(c);
  fs::create_directories(dir);
  auto manifest = start_manifest("audit", "", 0);
  io::Json out = io::Json::array();
  bool failed = false;
  for (const auto& stem : stems) {
    const auto tr = io::read_trajectory(stem);
    io::Json entry;
    entry["dump"] = stem;
    const double cap = c.ucap.value_or(tr.header.config.u_cap);
    const double horizon = c.horizon.value_or(tr.header.config.horizon);
    for (const auto& a : audits) {
      if (a == "explosion") {
        const auto v = diagnostics::classify_explosion(tr, cap, horizon, c.refine);
        entry["explosion"] = {{"classification", io::to_json(v.classification)}, {"note", v.note}};
      } else if (a == "ledger") {
        if (!tr.header.b_spec || !tr.header.sigma_spec)
          throw InsufficientDataError(stem + ": dump carries no model specs for the ledger");
        const auto led = diagnostics::ledger_build(tr, models::ScalarFunctionModel(*tr.header.b_spec),
                                                   models::ScalarFunctionModel(*tr.header.sigma_spec),
                                                   tr.header.config.alpha, tr.header.config.eps_floor);
        io::Json lj = {{"steps", led.steps()},
                       {"closure_error", io::number(led.closure_error())},
                       {"sup_I", io::number(led.sup_I())},
                       {"total_dB", io::number(led.total(led.dB))},
                       {"total_dA", io::number(led.total(led.dA))},
                       {"total_dS", io::number(led.total(led.dS))},
                       {"QV", io::number(led.QV.empty() ? 0.0 : led.QV.back())}};
        if (drift_constant) {
          const auto bc = diagnostics::drift_bound_check_a(led, *drift_constant);
          lj["drift_bound"] = io::to_json(bc);
          failed = failed || !bc.pass;
        }
        entry["ledger"] = lj;
      } else if (a == "tripling") {
        int count = 0;
        for (const auto& ev : tr.stopping.rho_sequence)
          if (ev.direction == diagnostics::Direction::triple && ev.level - 1 >= m0) ++count;
        entry["tripling"] = {{"m0", m0}, {"events", tr.stopping.rho_sequence.size()}, {"triplings_above_m0", count}};
      } else {
        throw ConfigError("unknown audit '" + a + "' (expected explosion, ledger or tripling)");
      }
    }
    out.push_back(entry);
  }
  write_text(dir, "audit.json", out.dump(2) + "\n", manifest);
  finish_manifest(dir, manifest);
  std::cout << out.dump(2) << "\n";
  return failed ? kViolated : kOk;
}

int cmd_validate_lemmas(const Common& c, int jensen_fields) {
  diagnostics::LemmaSuiteOptions opts;
  if (c.seed) opts.seed = *c.seed;
  opts.jensen_fields = jensen_fields;
  const fs::path dir = out_dir(c);
  fs::create_directories(dir);
  auto manifest = start_manifest("validate-lemmas", "", opts.seed);
  io::Json out = io::Json::array();
  bool ok = true;
  for (const auto& s : diagnostics::run_lemma_suites(opts)) {
    std::cout << (s.pass() ? "PASS " : "FAIL ") << s.name << ": " << s.cases << " cases, " << s.failures
              << " failures, worst " << io::format_double(s.worst) << "\n";
    out.push_back({{"suite", s.name}, {"cases", s.cases}, {"failures", s.failures}, {"worst", io::number(s.worst)},
                   {"worst_case", s.worst_case}});
    ok = ok && s.pass();
  }
  for (int m : {4, 5, 6}) {
    const auto w = diagnostics::tripling_window_check(m, 10.0, 256);
    std::cout << (w.pass ? "PASS " : "FAIL ") << "tripling window m=" << m << ": sup " << io::format_double(w.linf_after)
              << " vs " << io::format_double(w.target) << "\n";
    out.push_back({{"suite", "tripling-window"}, {"check", io::to_json(w)}});
    ok = ok && w.pass;
  }
  write_text(dir, "lemmas.json", out.dump(2) + "\n", manifest);
  finish_manifest(dir, manifest);
  return ok ? kOk : kViolated;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--dt", c.dt, "time step");
  app->add_option("--nx", c.nx, "grid cells");
  app->add_option("--horizon", c.horizon, "final time");
  app->add_option("--ucap", c.ucap, "explosion threshold on the sup norm");
  app->add_flag("--refine", c.refine, "confirm explosions at dt/2 with bridge-refined noise");
  app->add_option("--out-dir", c.out_dir, "output directory (default $SHELAB_OUT_DIR or ./shelab-out)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic heat equation lab"};
  app.set_version_flag("--version", SHELAB_VERSION);
  app.require_subcommand(1);
  Common common;

  std::string config;
  bool snapshots = false;
  auto* sim = app.add_subcommand("simulate", "run one coupled (u, v, v-) path");
  sim->add_option("config", config, "TOML config")->required();
  sim->add_flag("--snapshots", snapshots, "store the field at every step");
  add_common(sim, common);

  auto* chk = app.add_subcommand("check", "run the assumption checkers on a model file");
  chk->add_option("config", config, "TOML config")->required();
  add_common(chk, common);

  auto* pd = app.add_subcommand("phase-diagram", "run a campaign");
  pd->add_option("config", config, "TOML config")->required();
  add_common(pd, common);

  std::vector<std::string> stems;
  std::vector<std::string> audits{"explosion"};
  std::optional<double> drift_constant;
  int m0 = 2;
  auto* au = app.add_subcommand("audit", "audit trajectory dumps");
  au->add_option("dumps", stems, "dump stems (path without .json/.bin)")->required();
  au->add_option("--audits", audits, "explosion, ledger, tripling")->delimiter(',');
  au->add_option("--drift-constant", drift_constant, "C for the log-ledger drift bound");
  au->add_option("--m0", m0, "lowest tripling level counted");
  add_common(au, common);

  int jensen_fields = 10000;
  auto* lem = app.add_subcommand("validate-lemmas", "run the lemma property suites");
  lem->add_option("--jensen-fields", jensen_fields, "random fields for the Jensen suite");
  add_common(lem, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*sim) return cmd_simulate(config, common, snapshots);
    if (*chk) return cmd_check(config, common);
    if (*pd) return cmd_phase_diagram(config, common);
    if (*au) return cmd_audit(stems, audits, common, drift_constant, m0);
    if (*lem) return cmd_validate_lemmas(common, jensen_fields);
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kResource;
  } catch (const Error& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return kConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kResource;
  } catch (const std::bad_alloc&) {
    std::cerr << "resource error: out of memory\n";
    return kResource;
  }
  return kOk;
}
