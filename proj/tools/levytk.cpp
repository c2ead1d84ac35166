// levytk command line: model, params, spectrum, mc, decay and suite subcommands.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <CLI11.hpp>

#include "levy/io.hpp"
#include "levy/suite.hpp"

using namespace levy;
namespace fs = std::filesystem;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(now - t0).count();
    t0 = now;
    return s;
  }
};

/// Shared state of one invocation: the parsed config, output directory and manifest.
struct Run {
  ExperimentConfig cfg;
  std::string dir;
  RunManifest manifest{Json::object()};
  Timer timer;

  Run(const std::string& config_path, const std::string& out_override, Json overrides = Json::object()) {
    Json raw = config_path.empty() ? Json::object() : load_json_file(config_path);
    if (!raw.is_object()) throw ConfigError("expected an object", "");
    raw.merge_patch(overrides);
    std::string base = config_path.empty() ? "." : fs::path(config_path).parent_path().string();
    cfg = experiment_from_json(raw, base.empty() ? "." : base);
    dir = out_override.empty() ? cfg.output_dir : out_override;
    manifest = RunManifest(cfg.raw);
    manifest.stage("load", timer.lap());
  }

  const LevyModel& model() const {
    if (!cfg.model) throw ConfigError("a model is required", "/model");
    return *cfg.model;
  }
  std::string path(const std::string& name) const { return (fs::path(dir) / name).string(); }
  void emit(const std::string& name, const std::string& text) { manifest.emit(path(name), text); }
  void emit_json(const std::string& name, Json report) {
    report["version"] = kVersion;
    report["config"] = cfg.raw;
    emit(name, report.dump(2) + "\n");
  }
  int finish(Verdict v, const std::string& name) {
    manifest.verdict(name, v);
    write_file(path(name + ".manifest.json"), manifest.to_json().dump(2) + "\n");
    std::printf("%s: %s (outputs in %s)\n", name.c_str(), to_string(v), dir.c_str());
    return exit_code(v);
  }
};

void require_1d(const LevyModel& m) {
  if (m.dim() != 1) throw ConfigError("this subcommand works in dimension 1", "/model/dimension");
}

// ---- model

int cmd_model(const std::string& config, const std::string& out) {
  Run run(config, out);
  const auto& m = run.model();
  Json j;
  j["model"] = model_to_json(m);
  j["family"] = m.profile().family();
  j["c5"] = m.c5();
  Table t;
  std::vector<double> k, psi, big, H, tail;
  for (int i = -12; i <= 12; ++i) {
    double kk = std::pow(2.0, i / 2.0);
    k.push_back(kk);
    psi.push_back(m.psi(kk));
    big.push_back(m.big_psi(kk));
    H.push_back(m.pruitt_H(1.0 / kk));
    tail.push_back(m.tail_mass(1.0 / kk));
  }
  t.add("k", k);
  t.add("psi", psi);
  t.add("big_psi", big);
  t.add("pruitt_H_inv", H);
  t.add("tail_mass_inv", tail);
  run.manifest.stage("symbol", run.timer.lap());
  j["symbol_samples"] = static_cast<int>(k.size());
  run.emit("symbol.csv", t.csv());
  run.emit_json("model.json", j);
  return run.finish(Verdict::pass, "model");
}

// ---- params

int cmd_params(const std::string& config, const std::string& out) {
  Run run(config, out);
  const auto& m = run.model();
  const auto& cc = run.cfg.conditions;
  ExitTimeSource exit = ExitTimeSource::monte_carlo(m, run.cfg.mc);
  if (cc.c4) exit = exit.with_analytic(*cc.c4);
  bool have_bound = cc.k3.c9 && cc.k3.c10 && cc.k3.c4;
  K3Source k3 = have_bound ? K3Source::bound(m, cc.k3) : K3Source::monte_carlo(m, run.cfg.mc);
  auto rep = condition_report(m, exit, k3, cc.options);
  run.manifest.stage("conditions", run.timer.lap());

  Table k1t;
  std::vector<double> s, v, u;
  for (auto& k : rep.k1_samples) {
    // uncertainty: change of the running sup over the last doubling of the x range
    double before = 0;
    for (std::size_t i = 0; i < k.x.size(); ++i)
      if (k.x[i] <= 0.5 * k.x_max) before = std::max(before, k.ratio[i]);
    s.push_back(k.s);
    v.push_back(k.value);
    u.push_back(k.value - before);
  }
  k1t.add("s", s);
  k1t.add("value", v);
  k1t.add("uncertainty", u);
  Table k2t;
  std::vector<double> a, b, c, kv, ku;
  for (auto& [sv, val] : rep.k2_samples) {
    a.push_back(sv[0]);
    b.push_back(sv[1]);
    c.push_back(sv[2]);
    kv.push_back(val);
    ku.push_back(0.0);
  }
  k2t.add("s1", a);
  k2t.add("s2", b);
  k2t.add("s3", c);
  k2t.add("value", kv);
  k2t.add("uncertainty", ku);
  Table k3t;
  std::vector<double> s3, v3, u3;
  for (auto& k : rep.k3_upper) {
    s3.push_back(k.s);
    v3.push_back(k.value);
    u3.push_back(0.0);
  }
  k3t.add("s", s3);
  k3t.add("value", v3);
  k3t.add("uncertainty", u3);
  Table smt;
  smt.add("s", rep.smallness.s_set);
  smt.add("value", rep.smallness.product);
  smt.add("uncertainty", std::vector<double>(rep.smallness.product.size(), 0.0));
  Table eta;
  eta.add("s", {1.0});
  eta.add("value", {rep.eta0.value});
  eta.add("uncertainty", {0.5 * (rep.eta0.hi - rep.eta0.lo)});

  run.emit("k1.csv", k1t.csv());
  run.emit("k2.csv", k2t.csv());
  run.emit("k3.csv", k3t.csv());
  run.emit("smallness.csv", smt.csv());
  run.emit("eta0.csv", eta.csv());
  Json j = to_json(rep);
  j["exit_time_method"] = exit.expected(2.0).method;
  j["k3_method"] = k3.method();
  run.emit_json("params.json", j);

  std::vector<Check> checks;
  for (auto& it : rep.verdicts) {
    checks.push_back({it.name, it.verdict, ""});
    std::printf("  %-24s %s\n", it.name.c_str(), to_string(it.verdict));
  }
  return run.finish(combine(checks), "params");
}

// ---- spectrum

int cmd_spectrum(const std::string& config, const std::string& out, const Json& overrides, bool svg) {
  Run run(config, out, overrides);
  const auto& m = run.model();
  require_1d(m);
  Potential v = run.cfg.potential.value_or(Potential(pot::Free{}));
  Hamiltonian H(m, v, run.cfg.grid);
  run.manifest.stage("symbol", run.timer.lap());
  SpectrumResult sr = run.cfg.states > 1 ? excited_states(H, run.cfg.states, run.cfg.solver) : ground_state(H, run.cfg.solver);
  run.manifest.stage("solve", run.timer.lap());
  auto x = run.cfg.grid.nodes();
  for (std::size_t n = 0; n < sr.vectors.size(); ++n) {
    Table t;
    t.add("x", x);
    t.add("value", sr.vectors[n]);
    run.emit("phi_" + std::to_string(n) + ".csv", t.csv());
  }
  if (svg && !sr.vectors.empty()) {
    Series s{"phi_0", {}, {}};
    for (int k = run.cfg.grid.N / 2; k < run.cfg.grid.N; ++k)
      if (x[k] > 0) {
        s.x.push_back(x[k]);
        s.y.push_back(std::abs(sr.vectors[0][k]));
      }
    run.emit("phi_0.svg", svg_chart({s}, true, true, "ground state, log-log"));
  }
  Json j = to_json(sr);
  j["potential"] = potential_to_json(v);
  run.emit_json("spectrum.json", j);
  std::printf("lambda0 = %.10g  residual = %.3g  %s\n", sr.eigenvalues.empty() ? 0.0 : sr.eigenvalues[0],
              sr.residuals.empty() ? 0.0 : sr.residuals[0],
              sr.no_discrete_ground_state ? "(no discrete ground state)" : "");
  return run.finish(sr.converged ? Verdict::pass : Verdict::inconclusive, "spectrum");
}

// ---- mc

int cmd_mc(const std::string& config, const std::string& out, const Json& overrides, bool svg) {
  Run run(config, out, overrides);
  const auto& m = run.model();
  auto est = laplace_hitting(m, run.cfg.mc, run.cfg.from, run.cfg.radius, run.cfg.eta);
  run.manifest.stage("paths", run.timer.lap());
  Table t;
  std::vector<double> cols[8];
  Json rows = Json::array();
  bool resolved = true;
  for (auto& e : est) {
    double vals[8] = {e.x, e.r, e.eta, e.value, e.ci_halfwidth, e.hit_fraction, e.censored_fraction, e.horizon};
    for (int i = 0; i < 8; ++i) cols[i].push_back(vals[i]);
    rows.push_back(to_json(e));
    resolved = resolved && e.censoring_resolved;
  }
  const char* names[8] = {"x", "r", "eta", "value", "ci_halfwidth", "hit_fraction", "censored_fraction", "horizon"};
  for (int i = 0; i < 8; ++i) t.add(names[i], cols[i]);
  run.emit("hitting.csv", t.csv());

  Json overlays = Json::array();
  std::vector<Series> series;
  for (double eta : run.cfg.eta) {
    std::vector<HittingPoint> pts;
    Series s{"eta=" + std::to_string(eta), {}, {}};
    for (auto& e : est)
      if (e.eta == eta) {
        pts.push_back({e.x, e.value, e.ci_halfwidth});
        s.x.push_back(e.x);
        s.y.push_back(e.value / m.nu_radial(std::abs(e.x)));
      }
    if (pts.empty()) continue;
    Json o = to_json(hitting_overlay(pts, m));
    o["eta"] = eta;
    overlays.push_back(o);
    series.push_back(s);
  }
  if (svg) run.emit("hitting_ratio.svg", svg_chart(series, true, true, "E[exp(-eta tau)] / nu"));
  run.emit_json("mc.json", {{"estimates", rows}, {"overlay", overlays}, {"paths", path_config_to_json(run.cfg.mc)}});
  return run.finish(resolved ? Verdict::pass : Verdict::inconclusive, "mc");
}

// ---- decay

int cmd_decay(const std::string& config, const std::string& out, const std::string& phi_csv,
              const std::string& spectrum_json, const std::string& hitting_csv, bool svg) {
  Run run(config, out);
  const auto& m = run.model();
  Table field = read_csv(phi_csv);
  const auto& x = field.column("x");
  const auto& phi = field.column("value");
  if (x.empty()) throw ConfigError("field file has no rows");
  double L = 0;
  for (double xi : x) L = std::max(L, std::abs(xi));
  double lambda0 = 0;
  if (!spectrum_json.empty()) {
    Json s = load_json_file(spectrum_json);
    if (s.contains("eigenvalues") && !s["eigenvalues"].empty() && s["eigenvalues"][0].is_number())
      lambda0 = s["eigenvalues"][0].get<double>();
  }
  bool confining = run.cfg.potential && run.cfg.potential->confining();
  std::vector<Window> windows = run.cfg.windows;
  if (windows.empty()) {
    double lo = 5;
    if (run.cfg.potential && std::isfinite(run.cfg.potential->feature_radius()))
      lo = std::max(lo, 2 * run.cfg.potential->feature_radius());
    if (0.5 * L <= lo) throw ConfigError("field too short for the default window; give /windows", "/windows");
    windows.push_back({std::max(lo, 0.1 * L), 0.5 * L});
  }
  // confining potentials are compared through phi V / nu
  std::vector<double> compared = phi;
  if (confining)
    for (std::size_t i = 0; i < x.size(); ++i) compared[i] = phi[i] * (*run.cfg.potential)(std::abs(x[i]));

  Json reports = Json::array();
  std::vector<Check> checks;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    std::string at = "/windows/" + std::to_string(i);
    DecayReport rep;
    try {
      rep = analyze_decay(m, x, phi, windows[i], run.cfg.fit, lambda0, 0.0, L, run.cfg.cap, confining);
      if (confining) rep.ratio = tail_ratio(x, compared, m, windows[i], run.cfg.cap, L);
    } catch (const ConfigError& e) {
      throw ConfigError(e.message(), at);
    }
    Verdict v = rep.fit.r2 < 0.98 ? Verdict::inconclusive : rep.ratio.comparable ? Verdict::pass : Verdict::fail;
    checks.push_back({"window " + std::to_string(i), v, ""});
    Json j = to_json(rep);
    j["verdict"] = to_string(v);
    j["compared"] = confining ? "phi*V/nu" : "phi/nu";
    reports.push_back(j);
    Table ov = overlay_table(m, x, phi, windows[i], rep.fit);
    std::string stem = "overlay_" + std::to_string(i);
    run.emit(stem + ".csv", ov.csv());
    if (svg) {
      std::vector<Series> s = {{"phi", ov.columns[0], ov.columns[1]},
                               {"C nu", ov.columns[0], ov.columns[2]},
                               {"fit", ov.columns[0], ov.columns[4]}};
      run.emit(stem + "_loglog.svg", svg_chart(s, true, true, "overlay, log-log"));
      run.emit(stem + "_loglin.svg", svg_chart(s, false, true, "overlay, log-linear"));
    }
    std::printf("window [%g, %g]: max/min phi/nu %.4g, %s fit r2 %.6f, regime %s -> %s\n", windows[i].lo,
                windows[i].hi, rep.ratio.max / rep.ratio.min, to_string(rep.fit.family), rep.fit.r2,
                to_string(rep.regime.regime), to_string(v));
  }
  Json j = {{"lambda0", lambda0}, {"windows", reports}};
  if (!hitting_csv.empty()) {
    Table h = read_csv(hitting_csv);
    std::vector<HittingPoint> pts;
    for (std::size_t i = 0; i < h.rows(); ++i)
      pts.push_back({h.column("x")[i], h.column("value")[i], h.column("ci_halfwidth")[i]});
    if (!pts.empty()) j["hitting_overlay"] = to_json(hitting_overlay(pts, m));
  }
  run.manifest.stage("analysis", run.timer.lap());
  run.emit_json("decay.json", j);
  return run.finish(combine(checks), "decay");
}

// ---- suite

int cmd_suite(const std::string& preset, const std::vector<int>& only, const std::string& out, int workers) {
  std::vector<int> ids = only.empty() ? preset_criteria(preset) : only;
  for (int id : ids) criterion_title(id);
  Json cfg = {{"preset", preset}, {"only", only}};
  RunManifest manifest(cfg);
  SuiteOptions opt;
  opt.workers = workers;
  std::vector<Check> checks;
  Json all = Json::array();
  auto results = run_suite(ids, opt, [&](const CriterionResult& r) {
    std::printf("%s\n", format_line(r).c_str());
    std::fflush(stdout);
  });
  for (auto& r : results) {
    checks.push_back({"AC" + std::to_string(r.id), r.verdict, ""});
    manifest.stage("AC" + std::to_string(r.id), r.seconds);
    manifest.verdict("AC" + std::to_string(r.id), r.verdict);
    all.push_back(to_json(r));
  }
  const Verdict overall = combine(checks);
  if (!out.empty()) {
    Json report = {{"version", kVersion}, {"config", cfg}, {"overall", to_string(overall)}, {"criteria", all}};
    manifest.emit((fs::path(out) / "suite.json").string(), report.dump(2) + "\n");
    write_file((fs::path(out) / "manifest.json").string(), manifest.to_json().dump(2) + "\n");
  }
  return exit_code(overall);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"levytk: non-local Schrodinger operators driven by jump-paring Levy processes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config, out;
  bool svg = false;
  auto common = [&](CLI::App* sc, bool needs_config) {
    auto* o = sc->add_option("config", config, "experiment JSON (model, potential, grid, mc, windows, ...)");
    if (needs_config) o->required();
    sc->add_option("--out", out, "output directory (overrides /output_dir)");
  };

  auto* model = app.add_subcommand("model", "validate a model and tabulate its symbol");
  common(model, true);

  auto* params = app.add_subcommand("params", "parameter functions and admissibility conditions");
  common(params, true);

  auto* spectrum = app.add_subcommand("spectrum", "eigenpairs of psi(-i d/dx) + V on a periodic grid");
  common(spectrum, true);
  std::optional<double> L, tol;
  std::optional<long> N;
  std::optional<int> k;
  spectrum->add_option("--L", L, "grid half-width");
  spectrum->add_option("--N", N, "grid nodes (power of two)");
  spectrum->add_option("--tol", tol, "eigen residual tolerance");
  spectrum->add_option("--k", k, "number of eigenpairs");
  spectrum->add_flag("--svg", svg, "also write an SVG chart");

  auto* mc = app.add_subcommand("mc", "Laplace transforms of ball hitting times by path simulation");
  common(mc, false);
  std::optional<long> paths, seed;
  std::optional<double> eps, dt, horizon, radius;
  std::string eta_list, from_list;
  mc->add_option("--paths", paths);
  mc->add_option("--eps", eps, "small-jump cutoff");
  mc->add_option("--dt", dt, "Gaussian sub-step");
  mc->add_option("--horizon", horizon, "censoring time");
  mc->add_option("--seed", seed);
  mc->add_option("--eta", eta_list, "Laplace parameters, comma separated");
  mc->add_option("--radius", radius, "radius of the target ball");
  mc->add_option("--from", from_list, "starting points, comma separated");
  mc->add_flag("--svg", svg, "also write an SVG chart");

  auto* decay = app.add_subcommand("decay", "decay analysis of a solver or Monte Carlo field");
  common(decay, true);
  std::string phi_csv, spectrum_json, hitting_csv;
  decay->add_option("--phi", phi_csv, "field CSV with columns x,value")->required();
  decay->add_option("--spectrum", spectrum_json, "spectrum.json for lambda0");
  decay->add_option("--hitting", hitting_csv, "hitting.csv for the overlay constant");
  decay->add_flag("--svg", svg, "also write SVG charts");

  auto* suite = app.add_subcommand("suite", "run the acceptance criteria");
  std::string preset = "all";
  std::vector<int> only;
  int workers = 0;
  suite->add_option("--preset", preset, "all | polynomial");
  suite->add_option("--only", only, "criterion ids")->delimiter(',');
  suite->add_option("--out", out, "write suite.json and manifest.json here");
  suite->add_option("--workers", workers, "Monte Carlo workers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto parse_list = [](const std::string& s, const std::string& at) {
    Json a = Json::array();
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        a.push_back(v);
      } catch (const std::exception&) {
        throw ConfigError("not a number: '" + item + "'", at);
      }
    }
    return a;
  };

  try {
    if (model->parsed()) return cmd_model(config, out);
    if (params->parsed()) return cmd_params(config, out);
    if (spectrum->parsed()) {
      Json ov = Json::object();
      if (L) ov["grid"]["L"] = *L;
      if (N) ov["grid"]["N"] = *N;
      if (tol) ov["solver"]["tol"] = *tol;
      if (k) ov["solver"]["states"] = *k;
      return cmd_spectrum(config, out, ov, svg);
    }
    if (mc->parsed()) {
      Json ov = Json::object();
      if (paths) ov["mc"]["paths"] = *paths;
      if (eps) ov["mc"]["eps"] = *eps;
      if (dt) ov["mc"]["dt"] = *dt;
      if (horizon) ov["mc"]["horizon"] = *horizon;
      if (seed) ov["mc"]["seed"] = *seed;
      if (radius) ov["hitting"]["radius"] = *radius;
      if (!eta_list.empty()) ov["hitting"]["eta"] = parse_list(eta_list, "/hitting/eta");
      if (!from_list.empty()) ov["hitting"]["from"] = parse_list(from_list, "/hitting/from");
      return cmd_mc(config, out, ov, svg);
    }
    if (decay->parsed()) return cmd_decay(config, out, phi_csv, spectrum_json, hitting_csv, svg);
    if (suite->parsed()) return cmd_suite(preset, only, out, workers);
  } catch (const ConfigError& e) {
    if (e.pointer().empty())
      std::fprintf(stderr, "config error: %s\n", e.message().c_str());
    else
      std::fprintf(stderr, "config error at %s: %s\n", e.pointer().c_str(), e.message().c_str());
    return 2;
  } catch (const InconclusiveError& e) {
    std::fprintf(stderr, "inconclusive: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
