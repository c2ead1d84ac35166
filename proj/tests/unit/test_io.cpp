#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "levy/io.hpp"

using namespace levy;
namespace fs = std::filesystem;

namespace {

std::string pointer_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<no error>";
}

fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("levytk_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("models survive a JSON round trip") {
  for (const auto& m : {presets::stable(1, 1.5), presets::polynomial(1, 0.5, 2), presets::subexponential(1, 1, 1, 0.5, 0),
                        presets::exponential(1, 1, 1, 2, 0.1), presets::superexponential(1, 1, 1, 2, 0),
                        presets::relativistic(1, 1.0), presets::diffusion_dominated(1, 0.5)}) {
    auto j = model_to_json(m);
    auto back = model_from_json(j);
    CHECK(back.dim() == m.dim());
    CHECK(back.diffusion() == m.diffusion());
    CHECK(back.profile().family() == m.profile().family());
    for (double k : {0.5, 2.0}) CHECK(back.psi(k) == doctest::Approx(m.psi(k)).epsilon(1e-10));
    CHECK(model_to_json(back) == j);
  }
}

TEST_CASE("explicit and preset model documents") {
  auto m = model_from_json(parse_json(R"({"dimension": 1, "profile": {"family": "polynomial", "params": {"gamma": 1, "delta": 1}}})"));
  CHECK(m.nu_radial(2) == doctest::Approx(0.25));
  CHECK(m.closed_form().kind == ClosedForm::Kind::stable);
  auto r = model_from_json(parse_json(R"({"preset": {"name": "relativistic", "dimension": 1, "mass": 2}})"));
  CHECK(r.psi(1) == doctest::Approx(std::sqrt(5.0) - 2).epsilon(1e-12));
}

TEST_CASE("configuration errors carry JSON pointers") {
  CHECK(pointer_of([] {
          model_from_json(parse_json(
              R"({"dimension": 1, "profile": {"family": "polynomial", "params": {}}, "comparability": {"c26": -1, "c27": 1}})"));
        }) == "/comparability/c26");
  CHECK(pointer_of([] { model_from_json(parse_json(R"({"dimension": 1, "profile": {"family": "gaussian"}})")); }) ==
        "/profile/family");
  CHECK(pointer_of([] { model_from_json(parse_json(R"({"dimension": 1, "colour": 3, "profile": {"family": "polynomial"}})")); }) ==
        "/colour");
  CHECK(pointer_of([] { experiment_from_json(parse_json(R"({"grid": {"L": 64, "N": 1000}})")); }) == "/grid/N");
  CHECK(pointer_of([] { potential_from_json(parse_json(R"({"kind": "well", "a": "deep"})"), "/potential"); }) ==
        "/potential/a");
  CHECK(pointer_of([] { parse_json("{\"model\": "); }) == "");
  CHECK_THROWS_AS(parse_json("[1, 2"), ConfigError);
}

TEST_CASE("potentials survive a JSON round trip") {
  std::vector<PotentialSpec> vs = {pot::Well{2, 1},          pot::Coulomb{1, 2, 0.5, 1},   pot::Yukawa{1, 1, 0.5, 1, 2},
                               pot::PoschlTeller{3, 1},  pot::Morse{1, 2, 1.5},        pot::ConfiningPower{1},
                               pot::Table{{0, 1, 2}, {-1, -0.5, 0}}, pot::Free{}};
  for (const auto& spec : vs) {
    Potential v(spec);
    auto back = potential_from_json(potential_to_json(v));
    CHECK(back.kind() == v.kind());
    for (double r : {0.3, 1.0, 2.5}) CHECK(back(r) == doctest::Approx(v(r)));
  }
}

TEST_CASE("experiment defaults") {
  auto e = experiment_from_json(parse_json("{}"));
  CHECK_FALSE(e.model.has_value());
  CHECK(e.grid.L == 128);
  CHECK(e.from == std::vector<double>{8, 16, 32});
  auto p = path_config_from_json(path_config_to_json(e.mc));
  CHECK(p.seed == e.mc.seed);
  CHECK(p.sampler == e.mc.sampler);
}

TEST_CASE("hashes and checksums") {
  CHECK(crc32_hex("123456789") == "cbf43926");
  CHECK(config_hash(parse_json(R"({"a": 1, "b": [1, 2]})")) == config_hash(parse_json(R"({"b": [1, 2], "a": 1})")));
  CHECK(config_hash(parse_json(R"({"a": 1})")) != config_hash(parse_json(R"({"a": 2})")));
}

TEST_CASE("non-finite numbers in reports") {
  K1Result r;
  r.value = INFINITY;
  auto j = to_json(r);
  CHECK(j["value"] == "inf");
  CHECK(parse_json(j.dump())["value"] == "inf");
}

TEST_CASE("CSV tables") {
  Table empty;
  empty.add("x", {});
  empty.add("phi", {});
  CHECK(empty.csv() == "x,phi\n");

  auto dir = scratch_dir("csv");
  Table t;
  t.add("x", {1, 2.5});
  t.add("y", {0.1, 1e-300});
  t.write((dir / "t.csv").string());
  auto back = read_csv((dir / "t.csv").string());
  CHECK(back.header == t.header);
  CHECK(back.column("y") == t.column("y"));
  CHECK_THROWS_AS(back.column("z"), ConfigError);
  write_file((dir / "bad.csv").string(), "x,y\n1,abc\n");
  CHECK_THROWS_AS(read_csv((dir / "bad.csv").string()), ConfigError);
}

TEST_CASE("overlay table") {
  auto m = presets::polynomial(1, 1, 1);
  std::vector<double> x, phi;
  for (int i = -200; i < 200; ++i) {
    x.push_back(0.25 * i);
    phi.push_back(i == 0 ? 1.0 : 0.5 * m.nu_radial(std::abs(0.25 * i)));
  }
  FitResult fit;
  auto t = overlay_table(m, x, phi, {10, 20}, fit);
  CHECK(t.header == std::vector<std::string>{"x", "phi", "c_nu", "ratio", "fit"});
  CHECK(t.rows() == 41);
  for (double r : t.column("ratio")) CHECK(r == doctest::Approx(0.5));
  auto none = overlay_table(m, x, phi, {100, 120}, fit);
  CHECK(none.rows() == 0);
  CHECK(none.csv() == "x,phi,c_nu,ratio,fit\n");
}

TEST_CASE("SVG charts are deterministic") {
  std::vector<Series> s = {{"phi", {1, 2, 4, 8}, {1, 0.25, 0.0625, 0.015625}}, {"nu", {1, 2, 4, 8}, {2, 0.5, 0.125, 0.03}}};
  auto a = svg_chart(s, true, true, "decay");
  auto b = svg_chart(s, true, true, "decay");
  CHECK(a == b);
  CHECK(a.rfind("<svg", 0) == 0);
  CHECK(a.find("phi") != std::string::npos);
  CHECK(svg_chart(s, false, true) != a);
}

TEST_CASE("run manifest") {
  auto dir = scratch_dir("manifest");
  RunManifest rm(parse_json(R"({"seed": 1})"));
  rm.emit((dir / "a.txt").string(), "hello");
  rm.stage("solve", 0.5);
  rm.verdict("ratio", Verdict::pass);
  CHECK(rm.overall() == Verdict::pass);
  rm.verdict("fit", Verdict::inconclusive);
  CHECK(rm.overall() == Verdict::inconclusive);
  rm.verdict("other", Verdict::fail);
  CHECK(rm.overall() == Verdict::fail);
  auto j = rm.to_json();
  CHECK(j["files"][0]["bytes"] == 5);
  CHECK(j["files"][0]["crc32"] == crc32_hex("hello"));
  CHECK(j["config_hash"] == config_hash(parse_json(R"({"seed": 1})")));
  CHECK(j["overall"] == "fail");
  CHECK(read_file((dir / "a.txt").string()) == "hello");
}

TEST_CASE("exit codes") {
  CHECK(exit_code(Verdict::pass) == 0);
  CHECK(exit_code(Verdict::fail) == 1);
  CHECK(exit_code(Verdict::inconclusive) == 3);
}
