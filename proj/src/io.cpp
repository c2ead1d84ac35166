#include "levy/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/crc.hpp>

namespace levy {

namespace {

namespace fs = std::filesystem;

std::string join(const std::string& at, const std::string& key) { return at + "/" + key; }

void require_object(const Json& j, const std::string& at) {
  if (!j.is_object()) throw ConfigError("expected an object", at);
}

/// Rejects keys outside `allowed` so typos surface as config errors instead of silent defaults.
void only_keys(const Json& j, const std::string& at, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError("unknown field", join(at, it.key()));
}

double number(const Json& j, const std::string& key, const std::string& at, std::optional<double> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("required field missing", join(at, key));
  }
  const Json& v = j.at(key);
  if (!v.is_number()) throw ConfigError("expected a number", join(at, key));
  double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("expected a finite number", join(at, key));
  return x;
}

long integer(const Json& j, const std::string& key, const std::string& at, std::optional<long> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("required field missing", join(at, key));
  }
  const Json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError("expected an integer", join(at, key));
  return v.get<long>();
}

std::string text(const Json& j, const std::string& key, const std::string& at,
                 std::optional<std::string> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("required field missing", join(at, key));
  }
  if (!j.at(key).is_string()) throw ConfigError("expected a string", join(at, key));
  return j.at(key).get<std::string>();
}

std::vector<double> numbers(const Json& j, const std::string& key, const std::string& at) {
  if (!j.contains(key)) throw ConfigError("required field missing", join(at, key));
  const Json& v = j.at(key);
  if (!v.is_array()) throw ConfigError("expected an array of numbers", join(at, key));
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError("expected a number", join(at, key) + "/" + std::to_string(i));
    out.push_back(v[i].get<double>());
  }
  return out;
}

void positive(double v, const std::string& at) {
  if (!(v > 0)) throw ConfigError("must be > 0", at);
}

/// Re-raises a ConfigError from a constructor under `at` unless it already carries a pointer.
template <class F>
auto scoped(const std::string& at, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError& e) {
    if (!e.pointer().empty()) throw ConfigError(e.message(), at + e.pointer().substr(e.pointer().rfind('/')));
    throw ConfigError(e.message(), at);
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), at);
  }
}

/// Finite numbers as JSON numbers, the rest as "inf", "-inf" or "nan".
Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json nums(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ProfileSpec profile_from_json(const Json& j, const std::string& at) {
  require_object(j, at);
  only_keys(j, at, {"family", "params"});
  std::string family = text(j, "family", at);
  Json p = j.contains("params") ? j.at("params") : Json::object();
  std::string pa = join(at, "params");
  require_object(p, pa);
  if (family == "polynomial") {
    only_keys(p, pa, {"gamma", "delta"});
    return Polynomial{number(p, "gamma", pa, 1.0), number(p, "delta", pa, 1.0)};
  }
  if (family == "subexponential") {
    only_keys(p, pa, {"gamma", "c", "beta", "delta"});
    return SubExponential{number(p, "gamma", pa, 1.0), number(p, "c", pa, 1.0), number(p, "beta", pa, 0.5),
                          number(p, "delta", pa, 0.0)};
  }
  if (family == "exponential") {
    only_keys(p, pa, {"gamma", "c", "delta"});
    return Exponential{number(p, "gamma", pa, 1.0), number(p, "c", pa, 1.0), number(p, "delta", pa, 0.0)};
  }
  if (family == "superexponential") {
    only_keys(p, pa, {"gamma", "c", "beta", "delta"});
    return SuperExponential{number(p, "gamma", pa, 1.0), number(p, "c", pa, 1.0), number(p, "beta", pa, 2.0),
                            number(p, "delta", pa, 0.0)};
  }
  if (family == "table") {
    only_keys(p, pa, {"radii", "values"});
    return UserTable{numbers(p, "radii", pa), numbers(p, "values", pa)};
  }
  throw ConfigError("unknown profile family '" + family + "'", join(at, "family"));
}

Json profile_to_json(const ProfileSpec& spec) {
  return std::visit(
      [](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Polynomial>)
          return {{"family", "polynomial"}, {"params", {{"gamma", p.gamma}, {"delta", p.delta}}}};
        else if constexpr (std::is_same_v<T, SubExponential>)
          return {{"family", "subexponential"},
                  {"params", {{"gamma", p.gamma}, {"c", p.c}, {"beta", p.beta}, {"delta", p.delta}}}};
        else if constexpr (std::is_same_v<T, Exponential>)
          return {{"family", "exponential"}, {"params", {{"gamma", p.gamma}, {"c", p.c}, {"delta", p.delta}}}};
        else if constexpr (std::is_same_v<T, SuperExponential>)
          return {{"family", "superexponential"},
                  {"params", {{"gamma", p.gamma}, {"c", p.c}, {"beta", p.beta}, {"delta", p.delta}}}};
        else
          return {{"family", "table"}, {"params", {{"radii", p.radii}, {"values", p.values}}}};
      },
      spec);
}

LevyModel preset_from_json(const Json& p, const std::string& at) {
  require_object(p, at);
  std::string name = text(p, "name", at);
  int d = static_cast<int>(integer(p, "dimension", at, 1));
  if (d < 1 || d > 3) throw ConfigError("dimension must be 1, 2 or 3", join(at, "dimension"));
  if (name == "stable") {
    only_keys(p, at, {"name", "dimension", "alpha", "diffusion"});
    double alpha = number(p, "alpha", at, 1.0);
    if (!(alpha > 0 && alpha < 2)) throw ConfigError("alpha must lie in (0,2)", join(at, "alpha"));
    return scoped(at, [&] { return presets::stable(d, alpha, number(p, "diffusion", at, 0.0)); });
  }
  if (name == "relativistic") {
    only_keys(p, at, {"name", "dimension", "mass"});
    double mass = number(p, "mass", at, 1.0);
    positive(mass, join(at, "mass"));
    return presets::relativistic(d, mass);
  }
  if (name == "diffusion") {
    only_keys(p, at, {"name", "dimension", "a"});
    double a = number(p, "a", at, 1.0);
    positive(a, join(at, "a"));
    return presets::diffusion_dominated(d, a);
  }
  throw ConfigError("unknown preset '" + name + "'", join(at, "name"));
}

}  // namespace

Json parse_json(const std::string& s) {
  try {
    return Json::parse(s);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

LevyModel model_from_json(const Json& j, const std::string& at) {
  require_object(j, at);
  if (j.contains("preset")) {
    only_keys(j, at, {"preset", "name"});
    LevyModel m = preset_from_json(j.at("preset"), join(at, "preset"));
    if (j.contains("name")) m.name = text(j, "name", at);
    return m;
  }
  only_keys(j, at, {"dimension", "diffusion", "scale", "profile", "comparability", "closed_form", "name"});
  long d = integer(j, "dimension", at);
  if (d < 1 || d > 3) throw ConfigError("dimension must be 1, 2 or 3", join(at, "dimension"));
  double a = number(j, "diffusion", at, 0.0);
  if (a < 0) throw ConfigError("must be >= 0", join(at, "diffusion"));
  double scale = number(j, "scale", at, 1.0);
  positive(scale, join(at, "scale"));
  if (!j.contains("profile")) throw ConfigError("required field missing", join(at, "profile"));
  ProfileSpec spec = profile_from_json(j.at("profile"), join(at, "profile"));
  Profile prof = scoped(join(at, "profile"), [&] { return Profile(spec, static_cast<int>(d)); });
  LevyModel m(static_cast<int>(d), a, prof, scale);
  m.name = j.contains("name") ? text(j, "name", at) : prof.family();

  if (j.contains("comparability")) {
    std::string ca = join(at, "comparability");
    const Json& c = j.at("comparability");
    require_object(c, ca);
    only_keys(c, ca, {"c26", "c27"});
    scoped(ca, [&] {
      m.set_comparability(number(c, "c26", ca, 1.0), number(c, "c27", ca, 1.0));
      return 0;
    });
  }

  auto* poly = std::get_if<Polynomial>(&spec);
  bool stable_shape = poly && poly->gamma == poly->delta && poly->gamma > 0 && poly->gamma < 2;
  if (j.contains("closed_form")) {
    std::string ca = join(at, "closed_form");
    const Json& c = j.at("closed_form");
    require_object(c, ca);
    only_keys(c, ca, {"kind", "alpha", "mass"});
    std::string kind = text(c, "kind", ca);
    if (kind == "stable") {
      double alpha = number(c, "alpha", ca, poly ? poly->gamma : 1.0);
      if (!stable_shape || alpha != poly->gamma)
        throw ConfigError("stable closed form needs a polynomial profile with gamma = delta = alpha",
                          join(ca, "alpha"));
      m.set_closed_form({ClosedForm::Kind::stable, alpha, 0.0});
    } else if (kind == "relativistic") {
      double mass = number(c, "mass", ca, 1.0);
      positive(mass, join(ca, "mass"));
      m.set_closed_form({ClosedForm::Kind::relativistic, number(c, "alpha", ca, 1.0), mass});
    } else if (kind != "none") {
      throw ConfigError("unknown closed form '" + kind + "'", join(ca, "kind"));
    }
  } else if (stable_shape) {
    // a single power law is a multiple of the stable intensity
    m.set_closed_form({ClosedForm::Kind::stable, poly->gamma, 0.0});
  }
  return m;
}

Json model_to_json(const LevyModel& m) {
  const auto& cf = m.closed_form();
  if (m.name == "relativistic" && cf.kind == ClosedForm::Kind::relativistic)
    return {{"preset", {{"name", "relativistic"}, {"dimension", m.dim()}, {"mass", cf.mass}}}};
  Json j;
  j["name"] = m.name;
  j["dimension"] = m.dim();
  j["diffusion"] = m.diffusion();
  j["scale"] = m.scale();
  j["profile"] = profile_to_json(m.profile().spec());
  j["comparability"] = {{"c26", m.c26()}, {"c27", m.c27()}};
  switch (cf.kind) {
    case ClosedForm::Kind::none: j["closed_form"] = {{"kind", "none"}}; break;
    case ClosedForm::Kind::stable: j["closed_form"] = {{"kind", "stable"}, {"alpha", cf.alpha}}; break;
    case ClosedForm::Kind::relativistic:
      j["closed_form"] = {{"kind", "relativistic"}, {"alpha", cf.alpha}, {"mass", cf.mass}};
      break;
  }
  return j;
}

Potential potential_from_json(const Json& j, const std::string& at) {
  require_object(j, at);
  std::string kind = text(j, "kind", at);
  if (kind == "well") {
    only_keys(j, at, {"kind", "a", "b"});
    double b = number(j, "b", at, 1.0);
    positive(b, join(at, "b"));
    return Potential(pot::Well{number(j, "a", at, 1.0), b});
  }
  if (kind == "coulomb") {
    only_keys(j, at, {"kind", "a1", "a2", "beta1", "beta2"});
    return Potential(pot::Coulomb{number(j, "a1", at, 1.0), number(j, "a2", at, 1.0), number(j, "beta1", at, 0.5),
                                  number(j, "beta2", at, 1.0)});
  }
  if (kind == "yukawa") {
    only_keys(j, at, {"kind", "a1", "a2", "beta1", "beta2", "b"});
    return Potential(pot::Yukawa{number(j, "a1", at, 1.0), number(j, "a2", at, 1.0), number(j, "beta1", at, 0.5),
                                 number(j, "beta2", at, 1.0), number(j, "b", at, 1.0)});
  }
  if (kind == "poschl_teller") {
    only_keys(j, at, {"kind", "a", "b"});
    return Potential(pot::PoschlTeller{number(j, "a", at, 1.0), number(j, "b", at, 1.0)});
  }
  if (kind == "morse") {
    only_keys(j, at, {"kind", "a", "b", "r0"});
    return Potential(pot::Morse{number(j, "a", at, 1.0), number(j, "b", at, 1.0), number(j, "r0", at, 1.0)});
  }
  if (kind == "confining_power") {
    only_keys(j, at, {"kind", "beta"});
    double beta = number(j, "beta", at, 1.0);
    positive(beta, join(at, "beta"));
    return Potential(pot::ConfiningPower{beta});
  }
  if (kind == "table") {
    only_keys(j, at, {"kind", "radii", "values"});
    auto r = numbers(j, "radii", at);
    auto v = numbers(j, "values", at);
    if (r.size() < 2 || r.size() != v.size())
      throw ConfigError("needs at least two radii and one value per radius", join(at, "values"));
    for (std::size_t i = 1; i < r.size(); ++i)
      if (!(r[i] > r[i - 1])) throw ConfigError("radii must be increasing", join(at, "radii") + "/" + std::to_string(i));
    return Potential(pot::Table{r, v});
  }
  if (kind == "free") {
    only_keys(j, at, {"kind"});
    return Potential(pot::Free{});
  }
  throw ConfigError("unknown potential kind '" + kind + "'", join(at, "kind"));
}

Json potential_to_json(const Potential& v) {
  return std::visit(
      [](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, pot::Well>)
          return {{"kind", "well"}, {"a", p.a}, {"b", p.b}};
        else if constexpr (std::is_same_v<T, pot::Coulomb>)
          return {{"kind", "coulomb"}, {"a1", p.a1}, {"a2", p.a2}, {"beta1", p.beta1}, {"beta2", p.beta2}};
        else if constexpr (std::is_same_v<T, pot::Yukawa>)
          return {{"kind", "yukawa"}, {"a1", p.a1}, {"a2", p.a2}, {"beta1", p.beta1}, {"beta2", p.beta2}, {"b", p.b}};
        else if constexpr (std::is_same_v<T, pot::PoschlTeller>)
          return {{"kind", "poschl_teller"}, {"a", p.a}, {"b", p.b}};
        else if constexpr (std::is_same_v<T, pot::Morse>)
          return {{"kind", "morse"}, {"a", p.a}, {"b", p.b}, {"r0", p.r0}};
        else if constexpr (std::is_same_v<T, pot::ConfiningPower>)
          return {{"kind", "confining_power"}, {"beta", p.beta}};
        else if constexpr (std::is_same_v<T, pot::Table>)
          return {{"kind", "table"}, {"radii", p.radii}, {"values", p.values}};
        else
          return {{"kind", "free"}};
      },
      v.spec());
}

Grid1D grid_from_json(const Json& j, const std::string& at) {
  require_object(j, at);
  only_keys(j, at, {"L", "N"});
  double L = number(j, "L", at, 128.0);
  positive(L, join(at, "L"));
  long N = integer(j, "N", at, 1 << 14);
  if (N < 8 || N > (1L << 24) || !is_power_of_two(N))
    throw ConfigError("must be a power of two between 8 and 2^24", join(at, "N"));
  return Grid1D(L, static_cast<int>(N));
}

PathConfig path_config_from_json(const Json& j, const std::string& at) {
  require_object(j, at);
  only_keys(j, at, {"paths", "eps", "dt", "horizon", "seed", "sampler", "workers", "auto_horizon"});
  PathConfig c;
  c.n_paths = integer(j, "paths", at, c.n_paths);
  if (c.n_paths < 1) throw ConfigError("must be >= 1", join(at, "paths"));
  c.epsilon = number(j, "eps", at, c.epsilon);
  positive(c.epsilon, join(at, "eps"));
  c.dt = number(j, "dt", at, c.dt);
  positive(c.dt, join(at, "dt"));
  c.horizon = number(j, "horizon", at, c.horizon);
  positive(c.horizon, join(at, "horizon"));
  long seed = integer(j, "seed", at, static_cast<long>(c.seed));
  if (seed < 0) throw ConfigError("must be >= 0", join(at, "seed"));
  c.seed = static_cast<std::uint64_t>(seed);
  std::string s = text(j, "sampler", at, std::string(to_string(c.sampler)));
  if (s == to_string(Sampler::compound_poisson_gaussian))
    c.sampler = Sampler::compound_poisson_gaussian;
  else if (s == to_string(Sampler::exact_stable))
    c.sampler = Sampler::exact_stable;
  else
    throw ConfigError("unknown sampler '" + s + "'", join(at, "sampler"));
  c.workers = static_cast<int>(integer(j, "workers", at, 0));
  if (j.contains("auto_horizon")) {
    if (!j.at("auto_horizon").is_boolean()) throw ConfigError("expected a boolean", join(at, "auto_horizon"));
    c.auto_horizon = j.at("auto_horizon").get<bool>();
  }
  return c;
}

Json path_config_to_json(const PathConfig& c) {
  return {{"paths", c.n_paths},   {"eps", c.epsilon},   {"dt", c.dt},
          {"horizon", c.horizon}, {"seed", c.seed},     {"sampler", to_string(c.sampler)},
          {"workers", c.workers}, {"auto_horizon", c.auto_horizon}};
}

ExperimentConfig experiment_from_json(const Json& j, const std::string& base_dir) {
  require_object(j, "");
  only_keys(j, "", {"model", "potential", "grid", "solver", "mc", "hitting", "windows", "fit", "cap", "seed",
                    "conditions", "output_dir"});
  ExperimentConfig e;
  e.raw = j;
  auto resolve = [&](const std::string& key) -> Json {
    const Json& v = j.at(key);
    if (!v.is_string()) return v;
    fs::path p(v.get<std::string>());
    if (p.is_relative()) p = fs::path(base_dir) / p;
    try {
      return load_json_file(p.string());
    } catch (const ConfigError& err) {
      throw ConfigError(err.message(), "/" + key);
    }
  };
  if (j.contains("model")) {
    Json mj = resolve("model");
    e.model = model_from_json(mj, "/model");
    e.raw["model"] = mj;
  }
  if (j.contains("potential")) {
    Json pj = resolve("potential");
    e.potential = potential_from_json(pj, "/potential");
    e.raw["potential"] = pj;
  }
  if (j.contains("grid")) e.grid = grid_from_json(j.at("grid"), "/grid");
  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    require_object(s, "/solver");
    only_keys(s, "/solver", {"tol", "max_iter", "states"});
    e.solver.tol = number(s, "tol", "/solver", e.solver.tol);
    positive(e.solver.tol, "/solver/tol");
    e.solver.max_iter = static_cast<int>(integer(s, "max_iter", "/solver", e.solver.max_iter));
    if (e.solver.max_iter < 1) throw ConfigError("must be >= 1", "/solver/max_iter");
    e.states = static_cast<int>(integer(s, "states", "/solver", 1));
    if (e.states < 1 || e.states > 64) throw ConfigError("must lie in [1, 64]", "/solver/states");
  }
  if (j.contains("mc")) e.mc = path_config_from_json(j.at("mc"), "/mc");
  if (j.contains("seed")) {
    long seed = integer(j, "seed", "");
    if (seed < 0) throw ConfigError("must be >= 0", "/seed");
    e.mc.seed = static_cast<std::uint64_t>(seed);
  }
  if (j.contains("hitting")) {
    const Json& h = j.at("hitting");
    require_object(h, "/hitting");
    only_keys(h, "/hitting", {"from", "radius", "eta"});
    if (h.contains("from")) e.from = numbers(h, "from", "/hitting");
    e.radius = number(h, "radius", "/hitting", e.radius);
    positive(e.radius, "/hitting/radius");
    if (h.contains("eta")) e.eta = numbers(h, "eta", "/hitting");
    for (std::size_t i = 0; i < e.eta.size(); ++i) positive(e.eta[i], "/hitting/eta/" + std::to_string(i));
  }
  if (j.contains("windows")) {
    const Json& w = j.at("windows");
    if (!w.is_array()) throw ConfigError("expected an array of [lo, hi] pairs", "/windows");
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::string wa = "/windows/" + std::to_string(i);
      if (!w[i].is_array() || w[i].size() != 2 || !w[i][0].is_number() || !w[i][1].is_number())
        throw ConfigError("expected [lo, hi]", wa);
      Window win{w[i][0].get<double>(), w[i][1].get<double>()};
      if (!(win.lo > 0 && win.hi > win.lo)) throw ConfigError("needs 0 < lo < hi", wa);
      e.windows.push_back(win);
    }
  }
  if (j.contains("fit")) {
    const Json& f = j.at("fit");
    require_object(f, "/fit");
    only_keys(f, "/fit", {"family", "beta", "delta", "log_spaced"});
    std::string fam = text(f, "family", "/fit", std::string("power"));
    if (fam == "power")
      e.fit.family = FitFamily::power;
    else if (fam == "stretched_exp")
      e.fit.family = FitFamily::stretched_exp;
    else if (fam == "exp")
      e.fit.family = FitFamily::exp;
    else
      throw ConfigError("unknown fit family '" + fam + "'", "/fit/family");
    if (f.contains("beta")) e.fit.beta = number(f, "beta", "/fit");
    if (f.contains("delta")) e.fit.delta = number(f, "delta", "/fit");
    if (f.contains("log_spaced")) {
      if (!f.at("log_spaced").is_boolean()) throw ConfigError("expected a boolean", "/fit/log_spaced");
      e.fit.log_spaced = f.at("log_spaced").get<bool>();
    }
  }
  if (j.contains("conditions")) e.conditions = conditions_from_json(j.at("conditions"), "/conditions");
  e.cap = number(j, "cap", "", e.cap);
  if (!(e.cap > 1)) throw ConfigError("must be > 1", "/cap");
  e.output_dir = text(j, "output_dir", "", e.output_dir);
  return e;
}

ConditionsConfig conditions_from_json(const Json& j, const std::string& at) {
  require_object(j, at);
  only_keys(j, at, {"c4", "c9", "c10", "theta", "eta", "kappa1", "k1_s", "k3_s", "smallness_s", "smallness_s1",
                    "cond1_r1"});
  ConditionsConfig c;
  auto opt_pos = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key)) return std::nullopt;
    double v = number(j, key, at);
    positive(v, join(at, key));
    return v;
  };
  c.c4 = opt_pos("c4");
  c.k3.c4 = c.c4;
  c.k3.c9 = opt_pos("c9");
  c.k3.c10 = opt_pos("c10");
  c.k3.theta = number(j, "theta", at, 0.0);
  if (c.k3.theta < 0) throw ConfigError("must be >= 0", join(at, "theta"));
  c.options.eta = opt_pos("eta");
  c.options.kappa1 = number(j, "kappa1", at, c.options.kappa1);
  if (c.options.kappa1 < 2) throw ConfigError("must be >= 2", join(at, "kappa1"));
  auto radii = [&](const char* key, std::vector<double>& out) {
    if (!j.contains(key)) return;
    out = numbers(j, key, at);
    if (out.empty()) throw ConfigError("must not be empty", join(at, key));
    for (std::size_t i = 0; i < out.size(); ++i)
      if (!(out[i] > 0)) throw ConfigError("must be > 0", join(at, key) + "/" + std::to_string(i));
  };
  radii("k1_s", c.options.k1_s);
  radii("k3_s", c.options.k3_s);
  radii("smallness_s", c.options.smallness_s);
  radii("smallness_s1", c.options.smallness_s1);
  radii("cond1_r1", c.options.cond1_r1);
  return c;
}

std::string crc32_hex(const std::string& bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", crc.checksum());
  return buf;
}

std::string config_hash(const Json& j) { return crc32_hex(j.dump()); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& s) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << s;
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::pass: return 0;
    case Verdict::fail: return 1;
    case Verdict::inconclusive: return 3;
  }
  return 1;
}

// ---- reports

Json to_json(const SpectrumResult& r) {
  Json j;
  j["method"] = r.method;
  j["grid"] = {{"L", r.grid.L}, {"N", r.grid.N}};
  j["eigenvalues"] = nums(r.eigenvalues);
  j["residuals"] = nums(r.residuals);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["floor"] = num(r.floor);
  j["no_discrete_ground_state"] = r.no_discrete_ground_state;
  j["fewer_than_requested"] = r.fewer_than_requested;
  j["min_phi0"] = num(r.min_phi0);
  if (!r.mu.empty()) {
    Json mu = Json::array();
    for (auto& [rr, v] : r.mu) mu.push_back({{"r", rr}, {"mu", num(v)}});
    j["mu"] = mu;
  }
  return j;
}

Json to_json(const K1Result& r) {
  return {{"s", r.s}, {"value", num(r.value)}, {"x_at", r.x_at}, {"x_max", r.x_max}, {"stabilized", r.stabilized}};
}

Json to_json(const K3Bound& r) {
  return {{"s", r.s},
          {"value", num(r.value)},
          {"terms", {num(r.terms[0]), num(r.terms[1]), num(r.terms[2])}},
          {"green_diagnostic", num(r.green_diagnostic)}};
}

Json to_json(const JumpParingAudit& r) {
  return {{"c7", num(r.c7)},
          {"x_at", r.x_at},
          {"last_doubling_growth", num(r.last_doubling_growth)},
          {"verdict", to_string(r.verdict)}};
}

Json to_json(const HIngredients& r) {
  return {{"s1", r.s1},
          {"s2", r.s2},
          {"k2_main", num(r.k2_main)},
          {"k2_inner", num(r.k2_inner)},
          {"c3_small", num(r.c3_small)},
          {"c3_large", num(r.c3_large)},
          {"k3", num(r.k3)},
          {"exit_mean", num(r.exit_mean)},
          {"c13", num(r.c13)},
          {"nu_sup_quarter", num(r.nu_sup_quarter)},
          {"nu_sup_sixteenth", num(r.nu_sup_sixteenth)},
          {"h1", num(r.h1)},
          {"h2", num(r.h2)}};
}

Json to_json(const Eta0Result& r) {
  return {{"value", num(r.value)},
          {"lo", num(r.lo)},
          {"hi", num(r.hi)},
          {"conservative", num(r.conservative)},
          {"c5", r.c5},
          {"k1_2", num(r.k1_2)},
          {"k2_23", num(r.k2_23)},
          {"k1_stabilized", r.k1_stabilized},
          {"best", to_json(r.best)},
          {"upper", to_json(r.upper)}};
}

Json to_json(const Cond1Result& r) {
  Json j = {{"r1", r.r1},
            {"r2", r.r2},
            {"r3", r.r3},
            {"eta", r.eta},
            {"lhs", num(r.lhs)},
            {"lhs_hi", num(r.lhs_hi)},
            {"lhs_conservative", num(r.lhs_conservative)},
            {"margin", num(r.margin)},
            {"verdict", to_string(r.verdict)}};
  if (r.c14) {
    j["c14"] = num(*r.c14);
    j["R"] = num(r.R);
  }
  return j;
}

Json to_json(const SmallnessReport& r) {
  Json j = {{"kappa1", r.kappa1},
            {"s", r.s_set},
            {"product", nums(r.product)},
            {"killing", to_string(r.killing)},
            {"killing_margin", num(r.killing_margin)},
            {"s1", r.s1_set},
            {"limsup", nums(r.limsup)},
            {"s_tail", r.s_tail},
            {"bounded", to_string(r.bounded)},
            {"bounded_margin", num(r.bounded_margin)}};
  if (r.kappa2) j["kappa2"] = *r.kappa2;
  return j;
}

Json to_json(const SubexpProbe& r) {
  Json pts = Json::array();
  for (auto& p : r.points)
    pts.push_back({{"r", p.r}, {"ratio", num(p.ratio)}, {"ci_halfwidth", num(p.ci_halfwidth)}, {"method", p.method}});
  return {{"points", pts}, {"classification", r.classification}};
}

Json to_json(const ConditionReport& r) {
  Json j;
  Json k1 = Json::array();
  for (auto& k : r.k1_samples) k1.push_back(to_json(k));
  j["k1"] = k1;
  Json k2 = Json::array();
  for (auto& [s, v] : r.k2_samples) k2.push_back({{"s1", s[0]}, {"s2", s[1]}, {"s3", num(s[2])}, {"value", num(v)}});
  j["k2"] = k2;
  Json k3 = Json::array();
  for (auto& k : r.k3_upper) k3.push_back(to_json(k));
  j["k3_upper"] = k3;
  j["jump_paring"] = to_json(r.jump_paring);
  j["h"] = to_json(r.h);
  j["eta0"] = to_json(r.eta0);
  j["smallness"] = to_json(r.smallness);
  Json c1 = Json::array();
  for (auto& c : r.cond1) c1.push_back(to_json(c));
  j["cond1"] = c1;
  j["kappa2"] = num(r.kappa2);
  Json v = Json::array();
  for (auto& it : r.verdicts)
    v.push_back({{"name", it.name}, {"verdict", to_string(it.verdict)}, {"margin", num(it.margin)}, {"note", it.note}});
  j["verdicts"] = v;
  return j;
}

Json to_json(const HittingEstimate& r) {
  return {{"x", r.x},
          {"r", r.r},
          {"eta", r.eta},
          {"value", num(r.value)},
          {"ci_halfwidth", num(r.ci_halfwidth)},
          {"hit_fraction", r.hit_fraction},
          {"censored_fraction", r.censored_fraction},
          {"horizon", r.horizon},
          {"censoring_resolved", r.censoring_resolved}};
}

Json to_json(const RatioStats& r) {
  return {{"min", num(r.min)},
          {"max", num(r.max)},
          {"median", num(r.median)},
          {"log_min", num(r.log_min)},
          {"log_max", num(r.log_max)},
          {"log_median", num(r.log_median)},
          {"log_first", num(r.log_first)},
          {"log_last", num(r.log_last)},
          {"cap", r.cap},
          {"comparable", r.comparable},
          {"nodes", r.nodes}};
}

Json to_json(const FitResult& r) {
  return {{"family", to_string(r.family)}, {"amplitude", num(r.amplitude)}, {"rate", num(r.rate)},
          {"beta", num(r.beta)},           {"power", num(r.power)},         {"r2", num(r.r2)},
          {"rms", num(r.rms)},             {"n", r.n}};
}

Json to_json(const RegimeResult& r) {
  Json c = Json::array();
  for (auto x : r.candidates) c.push_back(to_string(x));
  return {{"regime", to_string(r.regime)}, {"candidates", c}, {"reason", r.reason}};
}

Json to_json(const LowerBoundCertificate& r) {
  return {{"K", num(r.K)},
          {"radius", num(r.radius)},
          {"c5", r.c5},
          {"c6", r.c6},
          {"mass_inside", num(r.mass_inside)},
          {"survival", num(r.survival)},
          {"pass", r.pass},
          {"worst_margin", num(r.worst_margin)}};
}

Json to_json(const OverlayReport& r) {
  return {{"c_hat", num(r.c_hat)}, {"ratios", nums(r.ratios)}, {"spread", num(r.spread)}, {"stability", r.stability}};
}

Json to_json(const DecayReport& r) {
  Json j = {{"window", {r.window.lo, r.window.hi}},
            {"ratio", to_json(r.ratio)},
            {"fit", to_json(r.fit)},
            {"regime", to_json(r.regime)},
            {"notes", r.notes}};
  if (r.lower) j["lower_bound"] = to_json(*r.lower);
  return j;
}

Json to_json(const DominationReport& r) {
  Json rows = Json::array();
  for (auto& row : r.rows)
    rows.push_back({{"t", row.t},
                    {"lower_margin", num(row.lower_margin)},
                    {"upper_margin", num(row.upper_margin)},
                    {"worst_x_lower", row.worst_x_lower},
                    {"worst_x_upper", row.worst_x_upper},
                    {"pass", row.pass}});
  return {{"s", r.s},
          {"sigma_total", num(r.sigma.total)},
          {"sigma_sup", num(r.sigma.sup)},
          {"tol", r.tol},
          {"rows", rows},
          {"kernel", {{"x", r.kernel_x}, {"g1", nums(r.kernel_g1)}, {"g2", nums(r.kernel_g2)}, {"pass", r.kernel_pass}}},
          {"pass", r.pass}};
}

Json to_json(const std::vector<SmallevRow>& rows) {
  Json a = Json::array();
  for (auto& r : rows)
    a.push_back({{"r", r.r},
                 {"lambda0", num(r.lambda0)},
                 {"sup_vplus", num(r.sup_vplus)},
                 {"inf_vminus", num(r.inf_vminus)},
                 {"mu", num(r.mu)},
                 {"bound", num(r.bound)},
                 {"margin", num(r.margin)},
                 {"pass", r.pass}});
  return a;
}

// ---- tables and charts

void Table::add(const std::string& name, std::vector<double> values) {
  if (!columns.empty() && values.size() != columns.front().size())
    throw ConfigError("column '" + name + "' length differs from the table");
  header.push_back(name);
  columns.push_back(std::move(values));
}

std::size_t Table::rows() const { return columns.empty() ? 0 : columns.front().size(); }

std::string Table::csv() const {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += "\n";
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + fmt(columns[c][i]);
    out += "\n";
  }
  return out;
}

void Table::write(const std::string& path) const { write_file(path, csv()); }

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return columns[c];
  throw ConfigError("CSV has no column '" + name + "'");
}

Table read_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  Table t;
  if (!std::getline(in, line)) throw ConfigError("empty CSV '" + path + "'");
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  }
  t.columns.assign(t.header.size(), {});
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ls, cell, ',')) {
      if (c >= t.header.size()) throw ConfigError(path + ": too many fields on line " + std::to_string(row));
      try {
        t.columns[c].push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError(path + ": not a number on line " + std::to_string(row) + ": '" + cell + "'");
      }
      ++c;
    }
    if (c != t.header.size()) throw ConfigError(path + ": too few fields on line " + std::to_string(row));
  }
  return t;
}

Table overlay_table(const LevyModel& m, const std::vector<double>& x, const std::vector<double>& phi, Window w,
                    const FitResult& fit) {
  std::vector<double> xs, ps;
  window_slice(x, phi, w, xs, ps);
  std::vector<double> lr(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) lr[i] = std::log(std::abs(ps[i])) - m.log_nu_radial(xs[i]);
  double logc = 0;
  if (!lr.empty()) {
    auto tmp = lr;
    std::nth_element(tmp.begin(), tmp.begin() + tmp.size() / 2, tmp.end());
    logc = tmp[tmp.size() / 2];
  }
  std::vector<double> cnu(xs.size()), ratio(xs.size()), curve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    cnu[i] = std::exp(logc + m.log_nu_radial(xs[i]));
    ratio[i] = std::exp(lr[i]);
    double lx = std::log(xs[i]), lf = fit.amplitude;
    switch (fit.family) {
      case FitFamily::power: lf -= fit.power * lx; break;
      case FitFamily::stretched_exp: lf -= fit.rate * std::pow(xs[i], fit.beta) + fit.power * lx; break;
      case FitFamily::exp: lf -= fit.rate * xs[i] + fit.power * lx; break;
    }
    curve[i] = fit.n > 0 ? std::exp(lf) : NAN;
  }
  Table t;
  t.add("x", xs);
  t.add("phi", ps);
  t.add("c_nu", cnu);
  t.add("ratio", ratio);
  t.add("fit", curve);
  return t;
}

std::string svg_chart(const std::vector<Series>& series, bool log_x, bool log_y, const std::string& title) {
  const double W = 640, H = 400, ml = 60, mr = 150, mt = 30, mb = 40;
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0) && (!log_y || y > 0);
  };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (usable(s.x[i], s.y[i])) {
        x0 = std::min(x0, tx(s.x[i]));
        x1 = std::max(x1, tx(s.x[i]));
        y0 = std::min(y0, ty(s.y[i]));
        y1 = std::max(y1, ty(s.y[i]));
      }
  if (!(x1 > x0)) x0 -= 0.5, x1 += 0.5;
  if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
  if (!std::isfinite(x0)) x0 = 0, x1 = 1;
  if (!std::isfinite(y0)) y0 = 0, y1 = 1;
  auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double v) { return H - mb - (ty(v) - y0) / (y1 - y0) * (H - mt - mb); };
  auto esc = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '&') o += "&amp;";
      else if (c == '<') o += "&lt;";
      else if (c == '>') o += "&gt;";
      else o += c;
    }
    return o;
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                W, H, W, H);
  out += buf;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%.0f\" y=\"%.0f\" width=\"%.0f\" height=\"%.0f\" fill=\"none\" stroke=\"black\"/>\n",
                ml, mt, W - ml - mr, H - mt - mb);
  out += buf;
  if (!title.empty()) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"20\" font-size=\"14\" font-family=\"sans-serif\">", ml);
    out += buf + esc(title) + "</text>\n";
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.0f\" y=\"%.0f\" font-size=\"11\" font-family=\"sans-serif\">%s%.4g .. %.4g</text>\n", ml,
                H - 12, log_x ? "log10 x: " : "x: ", x0, x1);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.0f\" y=\"%.0f\" font-size=\"11\" font-family=\"sans-serif\">%s%.4g .. %.4g</text>\n",
                W - mr + 8, H - 12, log_y ? "log10 y: " : "y: ", y0, y1);
  out += buf;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* col = colors[k % 6];
    out += "<polyline fill=\"none\" stroke=\"";
    out += col;
    out += "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", first ? "" : " ", px(s.x[i]), py(s.y[i]));
      out += buf;
      first = false;
    }
    out += "\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"%.0f\" font-size=\"12\" font-family=\"sans-serif\" fill=\"%s\">",
                  W - mr + 8, mt + 16 + 16.0 * k, col);
    out += buf + esc(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

// ---- manifest

RunManifest::RunManifest(const Json& config) : hash_(config_hash(config)) {}

void RunManifest::stage(const std::string& name, double seconds) { stages_.emplace_back(name, seconds); }

void RunManifest::verdict(const std::string& name, Verdict v) { verdicts_.emplace_back(name, v); }

void RunManifest::file(const std::string& path) {
  std::string bytes = read_file(path);
  files_.push_back({path, bytes.size(), crc32_hex(bytes)});
}

void RunManifest::emit(const std::string& path, const std::string& s) {
  write_file(path, s);
  files_.push_back({path, s.size(), crc32_hex(s)});
}

Verdict RunManifest::overall() const {
  bool inconclusive = false;
  for (auto& [n, v] : verdicts_) {
    if (v == Verdict::fail) return Verdict::fail;
    if (v == Verdict::inconclusive) inconclusive = true;
  }
  return inconclusive ? Verdict::inconclusive : Verdict::pass;
}

Json RunManifest::to_json() const {
  Json j;
  j["version"] = kVersion;
  j["config_hash"] = hash_;
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["created"] = buf;
  Json st = Json::array();
  for (auto& [n, s] : stages_) st.push_back({{"stage", n}, {"seconds", s}});
  j["stages"] = st;
  Json v = Json::object();
  for (auto& [n, x] : verdicts_) v[n] = to_string(x);
  j["verdicts"] = v;
  j["overall"] = to_string(overall());
  Json f = Json::array();
  for (auto& e : files_) f.push_back({{"path", e.path}, {"bytes", e.bytes}, {"crc32", e.crc32}});
  j["files"] = f;
  return j;
}

}  // namespace levy
