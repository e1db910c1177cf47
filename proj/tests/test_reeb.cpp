#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <doctest.h>

#include "calabi/error.hpp"
#include "calabi/fixtures.hpp"
#include "calabi/reeb.hpp"
#include "oracles.hpp"

using namespace calabi;
using namespace calabi::reeb;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::DomainError;
}

// Sum of a few Gaussians on the sphere with random centres and signs.
std::vector<double> gaussian_sum(const Mesh& m, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0, 1);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::uniform_int_distribution<int> count(2, 5);
  const int k = count(rng);
  std::vector<Point3> centres;
  std::vector<double> amp, width;
  for (int i = 0; i < k; ++i) {
    Point3 c{g(rng), g(rng), g(rng)};
    const double r = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    for (double& x : c) x /= r;
    centres.push_back(c);
    amp.push_back(g(rng));
    width.push_back(u(rng));
  }
  std::vector<double> out;
  for (const auto& p : m.vertices) {
    double v = 0;
    for (int i = 0; i < k; ++i) {
      const double dx = p[0] - centres[i][0], dy = p[1] - centres[i][1], dz = p[2] - centres[i][2];
      v += amp[i] * std::exp(-(dx * dx + dy * dy + dz * dz) / width[i]);
    }
    out.push_back(v);
  }
  return out;
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("calabi_test_reeb_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

const ScalarFieldOnSphere& two_bump() {
  static const ScalarFieldOnSphere f = [] {
    const Mesh m = fixtures::icosphere(4);
    return fixtures::make(m, fixtures::two_bump_values(m));
  }();
  return f;
}

std::size_t saddle_vertex(const MeasuredTree& t) {
  for (std::size_t v = 0; v < t.vertices.size(); ++v)
    if (t.incident[v].size() == 3) return v;
  FAIL("no saddle");
  return 0;
}

}  // namespace

TEST_CASE("octahedron loads with ties separated by index") {
  const Mesh m = fixtures::octahedron();
  const auto f = make_field(m, fixtures::height_values(m));
  CHECK(f.triangles.size() == 8);
  double total = 0;
  for (double a : f.triangle_areas) total += a;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.perturbed_vertices == std::vector<std::size_t>{1, 2, 3});
  CHECK(f.levels[0] == 0.0);
  CHECK(f.levels[0] < f.levels[1]);
  CHECK(f.levels[1] < f.levels[2]);
  CHECK(f.levels[2] < f.levels[3]);
  CHECK(f.levels[3] < f.levels[4]);
  CHECK(f.values[3] == 0.0);
  const auto t = build_reeb_tree(f);
  CHECK(t.vertices.size() == 2);
  CHECK(t.edges.size() == 1);
}

TEST_CASE("all-equal values are ordered by index") {
  const Mesh m = fixtures::octahedron();
  const auto f = make_field(m, std::vector<double>(6, 1.0));
  for (std::size_t v = 1; v < 6; ++v) CHECK(f.levels[v - 1] < f.levels[v]);
  CHECK(f.perturbed_vertices.size() == 5);
}

TEST_CASE("invalid complexes and data") {
  const Mesh oct = fixtures::octahedron();
  const std::vector<double> vals(6, 0.0);
  CHECK(code_of([&] { make_field(fixtures::torus(8, 6), std::vector<double>(48, 0.0)); }) == ErrorCode::NotASphere);

  Mesh twice = oct;
  for (auto p : oct.vertices) twice.vertices.push_back(p);
  for (auto t : oct.triangles) twice.triangles.push_back({t[0] + 6, t[1] + 6, t[2] + 6});
  twice.vertex_count = 12;
  CHECK(code_of([&] { make_field(twice, std::vector<double>(12, 0.0)); }) == ErrorCode::NotASphere);

  Mesh open = oct;
  open.triangles.pop_back();
  CHECK(code_of([&] { make_field(open, vals); }) == ErrorCode::NotASphere);

  Mesh spare = oct;
  spare.vertices.push_back({2, 2, 2});
  spare.vertex_count = 7;
  CHECK(code_of([&] { make_field(spare, std::vector<double>(7, 0.0)); }) == ErrorCode::NotASphere);

  std::vector<double> areas(8, 1.0);
  areas[3] = 0.0;
  CHECK(code_of([&] { make_field(oct, vals, areas); }) == ErrorCode::DegenerateTriangle);
  areas[3] = -1.0;
  CHECK(code_of([&] { make_field(oct, vals, areas); }) == ErrorCode::DegenerateTriangle);

  Mesh flat = oct;
  flat.vertices[4] = {0.5, 0.5, 0};  // on the segment from vertex 0 to vertex 2
  CHECK(code_of([&] { make_field(flat, vals); }) == ErrorCode::DegenerateTriangle);

  Mesh repeat = oct;
  repeat.triangles[0] = {0, 0, 4};
  CHECK(code_of([&] { make_field(repeat, vals); }) == ErrorCode::DegenerateTriangle);

  Mesh bad_index = oct;
  bad_index.triangles[0] = {0, 2, 40};
  CHECK(code_of([&] { make_field(bad_index, vals); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { make_field(oct, std::vector<double>(5, 0.0)); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { make_field(oct, {0, 0, 0, 0, 0, NAN}); }) == ErrorCode::ParseError);
}

TEST_CASE("OFF parsing") {
  std::istringstream good("OFF\n# octahedron\n6 8 12\n1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1\n0 0 -1\n"
                          "3 0 2 4\n3 2 1 4\n3 1 3 4\n3 3 0 4\n3 2 0 5\n3 1 2 5\n3 3 1 5\n3 0 3 5\n");
  const Mesh m = read_off(good);
  CHECK(m.vertices.size() == 6);
  CHECK(m.triangles.size() == 8);
  CHECK(m.triangles[5] == Triangle{1, 2, 5});

  for (const char* bad : {"OFF\n3 1 0\n0 0 0\n", "PLY\n", "OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n4 0 1 2 3\n",
                          "OFF\n3 1 0\n0 0 0\n1 x 0\n0 1 0\n3 0 1 2\n", "OFF\n-3 1 0\n"}) {
    std::istringstream in(bad);
    CHECK(code_of([&] { read_off(in); }) == ErrorCode::ParseError);
  }
}

TEST_CASE("file round trips") {
  const auto dir = scratch_dir();
  const Mesh m = fixtures::octahedron();
  const std::vector<double> vals{0.1, -0.2, 0.3, -0.4, 0.5, -0.6};

  std::ostringstream off;
  off << "OFF\n6 8 0\n";
  for (const auto& p : m.vertices) off << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  for (const auto& t : m.triangles) off << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  write(dir / "oct.off", off.str());
  write(dir / "vals.txt", "0.1 -0.2 0.3\n-0.4 0.5 -0.6\n");
  write(dir / "vals.json", R"({"values": [0.1, -0.2, 0.3, -0.4, 0.5, -0.6]})");
  write(dir / "vals_array.json", "[0.1, -0.2, 0.3, -0.4, 0.5, -0.6]");

  for (const char* values_file : {"vals.txt", "vals.json", "vals_array.json"}) {
    const auto f = load_field((dir / "oct.off").string(), (dir / values_file).string());
    CHECK(f.values == vals);
    CHECK(f.triangles == m.triangles);
  }

  const auto f = make_field(m, vals);
  write(dir / "field.json", field_to_json(f).dump());
  const auto g = load_field((dir / "field.json").string());
  CHECK(g.values == f.values);
  CHECK(g.triangle_areas == f.triangle_areas);
  // Values file overrides inline values.
  const auto h = load_field((dir / "field.json").string(), (dir / "vals.txt").string());
  CHECK(h.values == vals);

  // Explicit areas without positions.
  nlohmann::json abstract{{"triangles", field_to_json(f)["triangles"]}, {"values", vals}, {"areas", std::vector<double>(8, 2.0)}};
  const auto a = field_from_json(abstract);
  CHECK(a.vertices.empty());
  CHECK(a.triangle_areas[0] == doctest::Approx(0.125));
  CHECK(field_to_json(a).contains("areas"));

  CHECK(code_of([&] { load_field((dir / "oct.off").string()); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { load_field((dir / "missing.json").string()); }) == ErrorCode::ParseError);
  write(dir / "broken.json", "{\"vertices\": [");
  CHECK(code_of([&] { load_field((dir / "broken.json").string()); }) == ErrorCode::ParseError);
  write(dir / "bad_vals.txt", "1 2 three");
  CHECK(code_of([&] { read_values_file((dir / "bad_vals.txt").string()); }) == ErrorCode::ParseError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("height field on a fine round sphere is the Lebesgue segment") {
  const Mesh m = fixtures::icosphere(5);
  REQUIRE(m.triangles.size() >= 10000);
  const auto f = fixtures::make(m, fixtures::height_values(m));
  const auto t = build_reeb_tree(f);
  REQUIRE(t.vertices.size() == 2);
  REQUIRE(t.edges.size() == 1);
  const auto& e = t.edges[0];
  CHECK(e.level_lo() == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(e.level_hi() == doctest::Approx(0.5).epsilon(1e-12));
  for (const auto& v : t.vertices) CHECK(v.kind == NodeKind::Extremum);
  for (int k = 0; k <= 20; ++k) {
    const double level = -0.5 + k / 20.0;
    CHECK(std::abs(e.cumulative_at(level) - (level + 0.5)) < 1e-3);
  }
  CHECK(std::abs(push_forward_value(t, TreePoint::on_edge(0, 0.5))) < 1e-3);
  CHECK(std::abs(tree_integral(t, Profile1D::identity())) < 1e-12);
}

TEST_CASE("two-bump field gives a Y whose edges match exact clipped areas") {
  const auto& f = two_bump();
  const auto t = build_reeb_tree(f);
  REQUIRE(t.vertices.size() == 4);
  REQUIRE(t.edges.size() == 3);
  const std::size_t s = saddle_vertex(t);
  CHECK(t.vertices[s].kind == NodeKind::SaddleComponent);
  const double c = t.vertices[s].level;

  std::vector<double> upper;
  double lower = -1;
  for (std::size_t e : t.incident[s]) {
    if (t.edges[e].upper == s) lower = t.edges[e].measure;
    else upper.push_back(t.edges[e].measure);
  }
  std::sort(upper.rbegin(), upper.rend());
  REQUIRE(upper.size() == 2);
  CHECK(lower == doctest::Approx(oracle::sublevel_area(f, c)).epsilon(1e-9));
  const auto comps = oracle::superlevel_component_areas(f, c);
  REQUIRE(comps.size() == 2);
  CHECK(std::abs(upper[0] - comps[0]) < 1e-9);
  CHECK(std::abs(upper[1] - comps[1]) < 1e-9);

  // Monte-Carlo classification by level and superlevel component.
  const auto labels = oracle::superlevel_labels(f, c);
  std::map<std::size_t, double> hits;
  double below = 0;
  const std::size_t n = 4'000'000;
  for (const auto& smp : oracle::monte_carlo(f, n, 42)) {
    if (smp.level <= c) below += 1;
    else hits[oracle::triangle_label(f, labels, smp.triangle)] += 1;
  }
  std::vector<double> mc;
  for (const auto& [l, h] : hits) mc.push_back(h / n);
  std::sort(mc.rbegin(), mc.rend());
  REQUIRE(mc.size() == 2);
  CHECK(std::abs(below / n - lower) < 1e-3);
  CHECK(std::abs(mc[0] - upper[0]) < 1e-3);
  CHECK(std::abs(mc[1] - upper[1]) < 1e-3);
}

TEST_CASE("push-forward values") {
  const auto& f = two_bump();
  const auto t = build_reeb_tree(f);
  for (std::size_t v = 0; v < t.vertices.size(); ++v)
    if (t.incident[v].size() == 1 && t.edges[t.incident[v][0]].upper == v) {
      CHECK(push_forward_value(t, TreePoint::vertex(v)) == f.levels[t.vertices[v].mesh_vertex]);
    }
  CHECK(push_forward_value(t, TreePoint::vertex(saddle_vertex(t))) == t.vertices[saddle_vertex(t)].level);
  const double fmax = *std::max_element(f.levels.begin(), f.levels.end());
  bool found_max = false;
  for (const auto& v : t.vertices) found_max = found_max || v.level == fmax;
  CHECK(found_max);

  // Edge points: the level L at offset t has exactly t of the edge below it.
  const std::size_t s = saddle_vertex(t);
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    const auto& te = t.edges[e];
    for (double frac : {0.1, 0.37, 0.5, 0.9}) {
      const double off = frac * te.measure;
      const double level = push_forward_value(t, TreePoint::on_edge(e, off));
      CHECK(te.cumulative_at(level) == doctest::Approx(off).epsilon(1e-12));
      if (te.upper == s) {
        CHECK(oracle::sublevel_area(f, level) == doctest::Approx(off).epsilon(1e-9));
      } else {
        // Area of the superlevel component at this level above the edge.
        const auto comps = oracle::superlevel_component_areas(f, level);
        const double target = te.measure - off;
        double best = INFINITY;
        for (double a : comps) best = std::min(best, std::abs(a - target));
        CHECK(best < 1e-9);
      }
    }
  }
}

TEST_CASE("tree integrals against oracles") {
  const auto& f = two_bump();
  const auto t = build_reeb_tree(f);
  CHECK(tree_integral(t, Profile1D::constant(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(tree_integral(t, Profile1D::identity()) - mesh_quadrature(f, Profile1D::identity())) < 1e-12);
  CHECK(std::abs(tree_integral(t, Profile1D::affine(-2, 0.3)) - mesh_quadrature(f, Profile1D::affine(-2, 0.3))) < 1e-12);

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> xs, ys;
    double x = f.min_level() - 0.05;
    for (int i = 0; i < 6; ++i) {
      x += 0.05 + 0.25 * (u(rng) + 1) / 2;
      xs.push_back(x);
      ys.push_back(u(rng));
    }
    const auto w = Profile1D::piecewise_linear(xs, ys, u(rng), u(rng));
    CHECK(std::abs(tree_integral(t, w) - oracle::integral(f, w)) < 1e-9);
  }

  // Monte Carlo with 10^6 samples.
  const auto w = Profile1D::piecewise_linear({-0.3, 0.2, 0.6}, {1.0, -0.5, 2.0});
  double acc = 0, acc_id = 0;
  const auto samples = oracle::monte_carlo(f, 1'000'000, 42);
  for (const auto& smp : samples) {
    acc += w(smp.level);
    acc_id += smp.level;
  }
  CHECK(std::abs(tree_integral(t, w) - acc / samples.size()) < 1e-3);
  CHECK(std::abs(tree_integral(t, Profile1D::identity()) - acc_id / samples.size()) < 1e-3);

  const auto cosine = Profile1D::callable([](double x) { return std::cos(3 * x); }, "cos3");
  double acc_cos = 0;
  for (const auto& smp : samples) acc_cos += cosine(smp.level);
  CHECK(std::abs(tree_integral(t, cosine) - acc_cos / samples.size()) < 1e-3);
}

TEST_CASE("random fields: tree invariants") {
  const Mesh m = fixtures::icosphere(3);
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 12; ++trial) {
    CAPTURE(trial);
    const auto f = fixtures::make(m, gaussian_sum(m, rng));
    const auto t = build_reeb_tree(f);
    const std::size_t nv = t.vertices.size();
    REQUIRE(t.edges.size() + 1 == nv);

    // Connected, hence acyclic.
    std::vector<bool> seen(nv, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t e : t.incident[v]) {
        const std::size_t u = t.other_end(e, v);
        if (!seen[u]) {
          seen[u] = true;
          ++reached;
          stack.push_back(u);
        }
      }
    }
    CHECK(reached == nv);
    CHECK(std::abs(t.total_measure() - 1.0) < 1e-12);

    // Profiles: contiguous, continuous, strictly increasing, ending at the measure.
    for (const auto& e : t.edges) {
      CHECK(e.measure > 0);
      CHECK(e.level_lo() == t.vertices[e.lower].level);
      CHECK(e.level_hi() == t.vertices[e.upper].level);
      double cum = 0;
      for (std::size_t i = 0; i < e.profile.size(); ++i) {
        const auto& p = e.profile[i];
        if (i > 0) CHECK(p.lo == e.profile[i - 1].hi);
        CHECK(std::abs(p.cum_before - cum) <= 1e-15 + 1e-12 * cum);
        CHECK(p.c1 >= 0);
        CHECK(p.c1 + 2 * p.c2 * (p.hi - p.lo) >= -1e-12);
        CHECK(p.mass() > 0);
        cum += p.mass();
      }
      CHECK(std::abs(cum - e.measure) <= 1e-12 * std::max(1.0, e.measure));
      double prev = -1;
      for (int k = 1; k < 64; ++k) {
        const double level = e.level_lo() + (e.level_hi() - e.level_lo()) * k / 64.0;
        const double c = e.cumulative_at(level);
        CHECK(c > prev);
        prev = c;
        CHECK(e.level_at(c) == doctest::Approx(level).epsilon(1e-8));
      }
    }

    // Leaves <-> PL extrema, interior vertices <-> PL saddles.
    const auto types = oracle::link_types(f);
    std::set<std::size_t> extrema, saddles, leaves, interior;
    for (std::size_t v = 0; v < f.vertex_count(); ++v) {
      if (types[v].lower_runs == 0 || types[v].upper_runs == 0) extrema.insert(v);
      else if (types[v].lower_runs >= 2) saddles.insert(v);
    }
    for (std::size_t v = 0; v < nv; ++v) {
      const std::size_t deg = t.incident[v].size();
      if (deg == 1) {
        leaves.insert(t.vertices[v].mesh_vertex);
        CHECK(t.vertices[v].kind == NodeKind::Extremum);
      } else {
        interior.insert(t.vertices[v].mesh_vertex);
        CHECK(t.vertices[v].kind == NodeKind::SaddleComponent);
        CHECK(deg == static_cast<std::size_t>(types[t.vertices[v].mesh_vertex].lower_runs) + 1);
      }
    }
    CHECK(leaves == extrema);
    CHECK(interior == saddles);

    // Pushforward identity with exact PL quadrature.
    CHECK(std::abs(tree_integral(t, Profile1D::identity()) - mesh_quadrature(f, Profile1D::identity())) < 1e-12);
  }
}

TEST_CASE("subdividing the mesh leaves edge measures unchanged") {
  const Mesh m = fixtures::icosphere(2);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    const auto values = trial == 0 ? fixtures::two_bump_values(m) : gaussian_sum(m, rng);
    const auto [fine, fine_values] = fixtures::subdivide(m, values);
    const auto a = build_reeb_tree(fixtures::make(m, values));
    const auto b = build_reeb_tree(fixtures::make(fine, fine_values));
    REQUIRE(a.edges.size() == b.edges.size());
    auto key = [](const MeasuredTree& t) {
      std::vector<std::array<double, 3>> out;
      for (const auto& e : t.edges) out.push_back({e.level_lo(), e.level_hi(), e.measure});
      std::sort(out.begin(), out.end());
      return out;
    };
    const auto ka = key(a), kb = key(b);
    for (std::size_t i = 0; i < ka.size(); ++i) {
      CHECK(ka[i][0] == kb[i][0]);
      CHECK(ka[i][1] == kb[i][1]);
      CHECK(std::abs(ka[i][2] - kb[i][2]) < 1e-9);
    }
  }
}

TEST_CASE("explicit trees") {
  const auto t = make_tree({0.0, 1.0, 2.0, 3.0}, {{0, 1, 0.5}, {2, 1, 0.25}, {1, 3, 0.25}});
  CHECK(t.edges[1].lower == 1);
  CHECK(t.edges[1].upper == 2);
  CHECK(t.total_measure() == doctest::Approx(1.0));
  CHECK(t.vertices[1].kind == NodeKind::SaddleComponent);
  CHECK(t.edges[0].cumulative_at(0.5) == doctest::Approx(0.25));
  CHECK(t.edges[0].level_at(0.125) == doctest::Approx(0.25));
  CHECK_THROWS_AS(make_tree({0.0, 1.0}, {{0, 5, 1.0}}), Error);
  CHECK_THROWS_AS(make_tree({0.0, 1.0, 2.0}, {{0, 1, 1.0}}), Error);
  CHECK_THROWS_AS(make_tree({0.0, 0.0}, {{0, 1, 1.0}}), Error);
}

TEST_CASE("tree output") {
  const auto t = build_reeb_tree(two_bump());
  const auto j = tree_to_json(t);
  CHECK(j["vertices"].size() == 4);
  CHECK(j["edges"].size() == 3);
  CHECK(j["total_measure"].get<double>() == doctest::Approx(1.0));
  std::size_t saddles = 0;
  for (const auto& v : j["vertices"]) saddles += v["kind"] == "SADDLE_COMPONENT";
  CHECK(saddles == 1);
  for (const auto& e : j["edges"]) CHECK(e["level_range"][0].get<double>() < e["level_range"][1].get<double>());

  const std::string csv = tree_to_csv(t, 4);
  CHECK(csv.rfind("edge,level,cumulative\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 5);
}
