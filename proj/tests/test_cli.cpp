#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "calabi/cli.hpp"
#include "calabi/qh_algebra.hpp"
#include "calabi/qh_io.hpp"
#include "calabi/reeb.hpp"
#include "oracles.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = calabi::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(CALABI_TEST_DATA) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("calabi_test_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string text_of(const json& element) { return element.at("text").get<std::string>(); }

}  // namespace

TEST_CASE("algebra commands") {
  auto inv = run({"algebra", "CP2blowup", "invert", "euler"});
  REQUIRE(inv.code == 0);
  CHECK(text_of(inv.report()["inverse"]) == "-12/283 P s^4 + 9/283 A s^3 + 73/283 B s^3 + 16/283 s^2");
  CHECK(inv.report()["check"] == "[M]");

  CHECK(text_of(run({"algebra", "CP2blowup", "euler"}).report()["euler_class"]) == "4P - A s^-1");
  CHECK(text_of(run({"algebra", "S2xS2", "euler"}).report()["euler_class"]) == "4P");

  const auto ss = run({"algebra", "S2xS2", "semisimple"}).report();
  CHECK(ss["semisimple"] == true);
  CHECK(ss["witness"].get<std::string>().find("E = 4P") != std::string::npos);
  CHECK(run({"algebra", "nilpotent", "semisimple"}).report()["semisimple"] == false);

  // Same element as "sP", written with the power of s after the class.
  CHECK(run({"algebra", "S2", "invert", "P"}).report()["inverse"] == run({"algebra", "S2", "eval", "sP"}).report()["element"]);
  const auto zd = run({"algebra", "S2xS2", "invert", "A - B"});
  CHECK(zd.code == 0);
  CHECK(zd.report()["invertible"] == false);
  CHECK(zd.report()["reason"] == "NOT_INVERTIBLE");
  CHECK(text_of(run({"algebra", "S2xS2", "eval", "(A - B)(A + B)"}).report()["element"]) == "0");
  CHECK(run({"algebra", "CP3", "table"}).report()["products"].size() == 10);
  CHECK(run({"algebra", "S2", "table", "--omega", "3/2"}).report()["Omega"] == "3/2");

  for (const char* name : {"S2", "CP1", "CP4", "S2xS2", "CP2blowup"}) {
    const auto p = run({"algebra", name, "props"});
    CHECK_MESSAGE(p.code == 0, name);
    CHECK(p.report()["ok"] == true);
  }

  CHECK(run({"algebra", "K3", "euler"}).code == 2);
  CHECK(run({"algebra", "S2", "invert", "Q"}).code == 2);
  CHECK(run({"algebra", "S2", "invert"}).code == 2);
  CHECK(run({"algebra", "S2", "dance"}).code == 2);
}

TEST_CASE("algebra definition files") {
  const auto alg = calabi::qh::builtin_algebra("S2xS2");
  json def = calabi::qh::algebra_to_json(alg);
  const auto good = (scratch() / "s2xs2.json").string();
  std::ofstream(good) << def.dump();
  const auto r = run({"algebra", good, "semisimple"});
  REQUIRE(r.code == 0);
  CHECK(text_of(r.report()["euler_class"]) == "4P");

  def["N"] = 3;
  const auto wrong = (scratch() / "wrong_grading.json").string();
  std::ofstream(wrong) << def.dump();
  const auto p = run({"algebra", wrong, "props"});
  CHECK(p.code == 2);
  CHECK(p.report()["ok"] == false);

  const auto broken = (scratch() / "broken.json").string();
  std::ofstream(broken) << "{\"basis\": [";
  const auto b = run({"algebra", broken, "euler"});
  CHECK(b.code == 2);
  CHECK(json::parse(b.err)["error"] == "ParseError");
}

TEST_CASE("two-bump golden files") {
  const auto mu = run({"mu", data("two_bump.json"), "--w", data("two_bump_w.json"), "--normalize", "--zeta", "--check-W"});
  REQUIRE(mu.code == 0);
  CHECK(mu.out == slurp(data("two_bump_mu.golden.json")));
  const auto tree = run({"tree", data("two_bump.json"), "--normalize"});
  REQUIRE(tree.code == 0);
  CHECK(tree.out == slurp(data("two_bump_tree.golden.json")));
}

TEST_CASE("two-bump golden values agree with the oracles") {
  const json golden = json::parse(slurp(data("two_bump_mu.golden.json")));
  const auto w = calabi::profile_from_json(json::parse(slurp(data("two_bump_w.json"))));
  const auto f = calabi::reeb::normalize_mean(calabi::reeb::load_field(data("two_bump.json")));

  const double integral = oracle::integral(f, w);
  CHECK(std::abs(golden["integral_term"].get<double>() - integral) < 1e-9);

  const auto t = calabi::reeb::build_reeb_tree(f);
  const auto scan = oracle::phi_zoom(t, 10000, 2);
  const double median_level = calabi::reeb::push_forward_value(t, scan.argmin);
  CHECK(std::abs(golden["median"]["level"].get<double>() - median_level) < 1e-6);
  CHECK(std::abs(golden["mu"].get<double>() - (integral - w(median_level))) < 1e-6);

  const double c0 = *std::max_element(f.values.begin(), f.values.end()) - *std::min_element(f.values.begin(), f.values.end());
  const double zeta = std::abs(oracle::integral(f, calabi::Profile1D::identity()) - median_level) / c0;
  CHECK(std::abs(golden["zeta_lower"].get<double>() - zeta) < 1e-6);
  CHECK(golden["in_W"]["ok"] == true);

  // Tree golden: Y shape with measures equal to the clipped areas at the saddle level.
  const json tree = json::parse(slurp(data("two_bump_tree.golden.json")));
  REQUIRE(tree["edges"].size() == 3);
  double saddle = -INFINITY;
  for (const auto& e : tree["edges"]) saddle = std::max(saddle, e["level_range"][0].get<double>());
  std::vector<double> measures;
  for (const auto& e : tree["edges"]) measures.push_back(e["measure"].get<double>());
  std::sort(measures.rbegin(), measures.rend());
  const double below = oracle::sublevel_area(f, saddle);
  auto above = oracle::superlevel_component_areas(f, saddle);
  REQUIRE(above.size() == 2);
  std::vector<double> expected{below, above[0], above[1]};
  std::sort(expected.rbegin(), expected.rend());
  for (int i = 0; i < 3; ++i) CHECK(std::abs(measures[i] - expected[i]) < 1e-9);
}

TEST_CASE("mu on height fields") {
  const auto mesh = (scratch() / "height.json").string();
  REQUIRE(run({"generate", "icosphere", "--level", "4", "--field", "height", "-o", mesh}).code == 0);
  const auto r = run({"mu", mesh, "--normalize", "--zeta", "--check-W"});
  REQUIRE(r.code == 0);
  const auto j = r.report();
  CHECK(std::abs(j["mu"].get<double>()) < 1e-9);
  CHECK(j["zeta_lower"].get<double>() < 1e-9);
  CHECK(j["in_W"]["ok"] == false);
  CHECK(j["in_W"]["reasons"][0].get<std::string>().find("bisecting zero level") != std::string::npos);

  const auto bumped = (scratch() / "bumped.json").string();
  REQUIRE(run({"generate", "icosphere", "--level", "4", "--field", "perturbed-height", "-o", bumped}).code == 0);
  const auto p = run({"mu", bumped, "--normalize", "--zeta", "--check-W"}).report();
  CHECK(p["in_W"]["ok"] == true);
  CHECK(p["zeta_lower"].get<double>() > 0);

  // Batch evaluation in parallel matches one-by-one runs.
  const auto batch = run({"mu", mesh, bumped, "--normalize", "--zeta", "--jobs", "2"});
  REQUIRE(batch.code == 0);
  const auto arr = batch.report();
  REQUIRE(arr.is_array());
  CHECK(arr[0] == run({"mu", mesh, "--normalize", "--zeta"}).report());
  CHECK(arr[1] == run({"mu", bumped, "--normalize", "--zeta"}).report());

  // The bumped field has a nonzero mean, so zeta refuses it without --normalize.
  const auto raw = run({"mu", bumped, "--zeta"});
  CHECK(raw.code == 2);
  CHECK(json::parse(raw.err)["error"] == "DomainError");
}

TEST_CASE("OFF meshes and oracle samples") {
  const auto off = (scratch() / "tb.off").string(), vals = (scratch() / "tb.txt").string();
  REQUIRE(run({"generate", "icosphere", "--level", "2", "--field", "two-bump", "--format", "off", "-o", off,
               "--values-out", vals}).code == 0);
  const auto r = run({"mu", off, "--values", vals, "--oracle-samples", "200000"});
  REQUIRE(r.code == 0);
  const auto j = r.report();
  CHECK(j["oracle"]["seed"] == 42);
  CHECK(std::abs(j["oracle"]["integral_estimate"].get<double>() - j["integral_term"].get<double>()) < 5e-3);
  CHECK(run({"mu", off}).code == 2);
  CHECK(run({"mu", off, "--values", vals, "--values", vals}).code == 2);
}

TEST_CASE("seed handling") {
  const auto a = run({"algebra", "S2", "props"}).report();
  CHECK(a["seed"] == 42);
  ::setenv("CALABI_SEED", "7", 1);
  CHECK(calabi::cli::seed_from_environment() == 7);
  CHECK(run({"algebra", "S2", "props"}).report()["seed"] == 7);
  CHECK(run({"algebra", "S2", "props", "--seed", "9"}).report()["seed"] == 9);
  ::setenv("CALABI_SEED", "x", 1);
  CHECK(calabi::cli::seed_from_environment() == 42);
  ::unsetenv("CALABI_SEED");
}

TEST_CASE("family commands") {
  const auto three = run({"family", "annulus", "--eps", "0.02,0.05,0.08", "--bumps", "0.01", "--rank"});
  REQUIRE(three.code == 0);
  CHECK(three.report()["rank"] == 3);
  const auto five = run({"family", "disk", "--eps", "0.55,0.6,0.7,0.8,0.9", "--bumps", "0.02", "--rank"});
  CHECK(five.report()["rank"] == 5);

  const auto zero = run({"family", "disk", "--eps", "0.7", "--profile", "0"});
  REQUIRE(zero.code == 0);
  CHECK(zero.report()["matrix"] == json::parse("[[0.0]]"));

  const auto away = run({"family", "annulus", "--eps", "0.02", "--profile", R"({"bump":[0.07,0.01,2]})"}).report();
  CHECK(away["matrix"][0][0].get<double>() == doctest::Approx(away["calabi"][0].get<double>()));
  CHECK(away["calabi"][0].get<double>() == doctest::Approx(0.02));

  const auto bad = run({"family", "annulus", "--eps", "0.3", "--bumps", "0.01"});
  CHECK(bad.code == 2);
  CHECK(json::parse(bad.err)["error"] == "DomainError");
  CHECK(run({"family", "annulus", "--eps", "0.05"}).code == 2);
  CHECK(run({"family", "ring", "--eps", "0.05", "--bumps", "0.01"}).code == 2);
}

TEST_CASE("tree command") {
  const auto mesh = (scratch() / "tb.json").string(), csv = (scratch() / "tb.csv").string();
  REQUIRE(run({"generate", "icosphere", "--level", "2", "--field", "two-bump", "-o", mesh}).code == 0);
  const auto r = run({"tree", mesh, "--csv", csv, "--samples", "8"});
  REQUIRE(r.code == 0);
  CHECK(r.report()["edges"].size() == 3);
  const std::string rows = slurp(csv);
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 1 + 3 * 9);

  const auto height = (scratch() / "seg.json").string();
  REQUIRE(run({"generate", "octahedron", "-o", height}).code == 0);
  CHECK(run({"tree", height}).report()["edges"].size() == 1);

  const auto torus = (scratch() / "torus.json").string();
  REQUIRE(run({"generate", "torus", "--field", "zero", "-o", torus}).code == 0);
  const auto t = run({"tree", torus});
  CHECK(t.code == 2);
  CHECK(json::parse(t.err)["error"] == "NotASphere");
  CHECK(run({"tree", (scratch() / "missing.json").string()}).code == 2);
}

TEST_CASE("usage and output") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"generate", "cube"}).code == 2);

  const auto path = (scratch() / "report.json").string();
  const auto r = run({"algebra", "S2", "euler", "-o", path});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(text_of(json::parse(slurp(path))["euler_class"]) == "2P");

  // Deterministic output.
  CHECK(run({"algebra", "CP2blowup", "props"}).out == run({"algebra", "CP2blowup", "props"}).out);

  const json j{{"a", 0.1 + 0.2}, {"b", {1.0 / 3.0, -0.0}}, {"c", 5}, {"d", "x"}};
  const auto rj = calabi::cli::rounded(j);
  CHECK(rj["a"].get<double>() == 0.3);
  CHECK(rj["b"][0].get<double>() == 0.333333333333);
  CHECK(rj["b"].dump() == "[0.333333333333,0.0]");
  CHECK(rj["c"] == 5);
  CHECK(rj["d"] == "x");
}
