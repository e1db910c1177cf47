#include "calabi/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "calabi/error.hpp"
#include "calabi/fixtures.hpp"
#include "calabi/qh_algebra.hpp"
#include "calabi/qh_io.hpp"
#include "calabi/quasimorphism.hpp"
#include "calabi/reeb.hpp"

namespace calabi::cli {

using nlohmann::json;

nlohmann::json rounded(const nlohmann::json& j) {
  switch (j.type()) {
    case json::value_t::object: {
      json out = json::object();
      for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = rounded(it.value());
      return out;
    }
    case json::value_t::array: {
      json out = json::array();
      for (const auto& x : j) out.push_back(rounded(x));
      return out;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) return nullptr;
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.12g", v);
      const double r = std::strtod(buf, nullptr);
      return r == 0.0 ? 0.0 : r;
    }
    default:
      return j;
  }
}

std::uint64_t seed_from_environment() {
  if (const char* s = std::getenv("CALABI_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end != s && *end == '\0') return v;
  }
  return kDefaultSeed;
}

namespace {

struct Settings {
  std::string output;
  std::uint64_t seed = kDefaultSeed;
};

void emit(const json& j, const Settings& s, std::ostream& out) {
  const std::string text = rounded(j).dump(2) + "\n";
  if (s.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(s.output);
  if (!f) throw Error(ErrorCode::ParseError, "cannot write " + s.output);
  f << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, "bad " + what + ": " + e.what());
  }
}

// ------------------------------------------------------------- algebra

qh::FrobeniusAlgebra load_algebra(const std::string& source) {
  if (source.ends_with(".json") || std::filesystem::is_regular_file(source))
    return qh::algebra_from_json(parse_json_text(slurp(source), "algebra file"));
  return qh::builtin_algebra(source);
}

json algebra_header(const qh::FrobeniusAlgebra& alg) {
  json basis = json::array();
  for (const auto& b : alg.basis()) basis.push_back({{"name", b.name}, {"degree", b.degree}});
  return {{"algebra", alg.name()},
          {"basis", basis},
          {"n", alg.half_dimension()},
          {"N", alg.chern_number()},
          {"Omega", laurent::to_string(alg.omega())}};
}

json props_report(const qh::FrobeniusAlgebra& alg, std::uint64_t seed, bool& all_ok) {
  json checks = json::array();
  all_ok = true;
  auto add = [&](const std::string& name, bool ok, const std::string& detail) {
    checks.push_back({{"name", name}, {"ok", ok}, {"detail", detail}});
    all_ok = all_ok && ok;
  };
  for (const auto& c : qh::check_invariants(alg)) add(c.name, c.ok, c.detail);

  const auto inferred = qh::infer_chern_number(alg);
  add("chern number", inferred && *inferred == alg.chern_number(),
      "stored " + std::to_string(alg.chern_number()) + ", fitted " + (inferred ? std::to_string(*inferred) : "none"));

  // c([M]) = 0 on classical classes and c(s a) = c(a) + Omega.
  bool classical_ok = true;
  for (std::size_t i = 0; i < alg.dim(); ++i) {
    const auto c = qh::spectral_invariant_identity(alg, alg.basis_element(i));
    classical_ok = classical_ok && c && *c == 0;
  }
  add("identity invariant on classical classes", classical_ok, "c(e_i, 1) = 0 for every basis class");
  std::mt19937_64 rng(seed);
  std::size_t shift_ok = 0;
  constexpr std::size_t kShiftSamples = 100;
  for (std::size_t k = 0; k < kShiftSamples; ++k) {
    const auto a = qh::random_element(alg, rng);
    const auto c = qh::spectral_invariant_identity(alg, a);
    const auto cs = qh::spectral_invariant_identity(alg, laurent::FieldElement::s() * a);
    if ((!c && !cs) || (c && cs && *cs == *c + alg.omega())) ++shift_ok;
  }
  add("identity invariant shift by s", shift_ok == kShiftSamples,
      std::to_string(shift_ok) + "/" + std::to_string(kShiftSamples) + " samples");

  const auto chi = qh::characteristic_exponent_check(alg, 1000, seed);
  add("characteristic exponent axioms", chi.ok(),
      std::to_string(chi.pairs) + " pairs, " + std::to_string(chi.strict_checks) + " strict" +
          (chi.ok() ? std::string() : "; first violation: " + chi.violations.front()));
  return checks;
}

int cmd_algebra(const std::string& source, const std::string& action, const std::string& element,
                const std::string& omega, const Settings& s, std::ostream& out) {
  auto alg = load_algebra(source);
  if (!omega.empty()) alg = alg.with_omega(laurent::parse_rational(omega));
  json j = algebra_header(alg);
  int code = kExitOk;
  if (action == "table") {
    json products = json::array();
    for (std::size_t a = 0; a < alg.dim(); ++a)
      for (std::size_t b = a; b < alg.dim(); ++b)
        products.push_back({{"left", alg.basis()[a].name},
                            {"right", alg.basis()[b].name},
                            {"product", qh::to_string(alg, alg.product(a, b))}});
    j["products"] = products;
    j["definition"] = qh::algebra_to_json(alg);
  } else if (action == "euler") {
    j["euler_class"] = qh::element_to_json(alg, qh::euler_class(alg));
  } else if (action == "eval") {
    if (element.empty()) throw Error(ErrorCode::ParseError, "eval needs an element");
    j["element"] = qh::element_to_json(alg, qh::parse_element(alg, element));
  } else if (action == "invert") {
    if (element.empty()) throw Error(ErrorCode::ParseError, "invert needs an element");
    const auto a = qh::parse_element(alg, element);
    j["element"] = qh::element_to_json(alg, a);
    const auto inv = qh::invert_element(alg, a);
    j["invertible"] = inv.has_value();
    if (inv) {
      j["inverse"] = qh::element_to_json(alg, *inv);
      j["check"] = qh::to_string(alg, qh::quantum_mul(alg, a, *inv));
    } else {
      j["inverse"] = nullptr;
      j["reason"] = "NOT_INVERTIBLE";
    }
  } else if (action == "semisimple") {
    const auto v = qh::is_semisimple(alg);
    j["semisimple"] = v.semisimple;
    j["euler_class"] = qh::element_to_json(alg, v.euler_class);
    j["euler_inverse"] = v.euler_inverse ? qh::element_to_json(alg, *v.euler_inverse) : json(nullptr);
    j["witness"] = v.witness;
  } else if (action == "props") {
    bool ok = true;
    j["checks"] = props_report(alg, s.seed, ok);
    j["ok"] = ok;
    j["seed"] = s.seed;
    if (!ok) code = kExitValidation;
  } else {
    throw Error(ErrorCode::UnknownName, "unknown algebra action " + action);
  }
  emit(j, s, out);
  return code;
}

// ------------------------------------------------------------------ mu

Profile1D parse_profile(const std::string& text) {
  if (text == "identity") return Profile1D::identity();
  try {
    return profile_from_json(json::parse(text));
  } catch (const json::exception&) {
    if (std::filesystem::is_regular_file(text)) return profile_from_json(parse_json_text(slurp(text), "profile file"));
    throw Error(ErrorCode::ParseError, "profile is neither JSON nor a readable file: " + text);
  }
}

struct MuOptions {
  std::vector<std::string> meshes;
  std::vector<std::string> values;
  std::string w = "identity";
  bool normalize = false;
  bool zeta = false;
  bool check_w = false;
  double eps_bisect = kEpsBisect;
  std::size_t oracle_samples = 0;
  unsigned jobs = 1;
};

json mu_one(const MuOptions& o, const Profile1D& w, std::size_t i, std::uint64_t seed) {
  const auto values = o.values.empty() ? std::nullopt : std::optional<std::string>(o.values[i]);
  const auto loaded = reeb::load_field(o.meshes[i], values);
  const auto field = o.normalize ? reeb::normalize_mean(loaded) : loaded;
  const auto tree = reeb::build_reeb_tree(field);
  auto rep = mu_autonomous(tree, w);
  if (o.zeta) rep.zeta_lower = zeta_lower_bound(field, tree).zeta_lower;
  if (o.check_w) rep.in_W = in_class_W(field, tree, o.eps_bisect);
  json j = to_json(rep);
  j["field"] = {{"vertices", field.vertex_count()},
                {"triangles", field.triangles.size()},
                {"mean", reeb::field_mean(loaded)},
                {"normalized", o.normalize},
                {"perturbed_vertices", field.perturbed_vertices.size()}};
  j["tree"] = {{"vertices", tree.vertices.size()}, {"edges", tree.edges.size()}};
  if (o.check_w) j["eps_bisect"] = o.eps_bisect;
  if (o.oracle_samples > 0)
    j["oracle"] = {{"samples", o.oracle_samples},
                   {"seed", seed},
                   {"integral_estimate", reeb::sampled_integral(field, w, o.oracle_samples, seed)}};
  return j;
}

int cmd_mu(const MuOptions& o, const Settings& s, std::ostream& out) {
  if (!o.values.empty() && o.values.size() != o.meshes.size())
    throw Error(ErrorCode::ParseError, "give one --values file per mesh or none");
  const Profile1D w = parse_profile(o.w);
  const std::size_t n = o.meshes.size();
  std::vector<json> reports(n);
  std::vector<std::optional<Error>> failures(n);
  std::vector<std::string> crashes(n);
  std::size_t next = 0;
  std::mutex lock;
  auto worker = [&] {
    while (true) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> g(lock);
        if (next >= n) return;
        i = next++;
      }
      try {
        reports[i] = mu_one(o, w, i, s.seed);
      } catch (const Error& e) {
        failures[i] = e;
      } catch (const std::exception& e) {
        crashes[i] = e.what();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(o.jobs, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i]) throw Error(failures[i]->code(), o.meshes[i] + ": " + failures[i]->what());
    if (!crashes[i].empty()) throw std::runtime_error(o.meshes[i] + ": " + crashes[i]);
  }
  emit(n == 1 ? reports[0] : json(reports), s, out);
  return kExitOk;
}

// -------------------------------------------------------------- family

struct FamilyOptions {
  std::string variant;
  std::vector<double> eps;
  std::vector<std::string> profiles;
  std::optional<double> bump_width;
  double bump_peak = 1.0;
  bool rank = false;
  double rank_tol = 1e-9;
};

int cmd_family(const FamilyOptions& o, const Settings& s, std::ostream& out) {
  FamilyVariant v;
  if (o.variant == "annulus") v = FamilyVariant::Annulus;
  else if (o.variant == "disk") v = FamilyVariant::Disk;
  else throw Error(ErrorCode::UnknownName, "family variant must be annulus or disk");
  if (o.profiles.empty() == !o.bump_width) throw Error(ErrorCode::ParseError, "give either --profile or --bumps");
  if (o.eps.empty()) throw Error(ErrorCode::DomainError, "need at least one eps");

  std::vector<Profile1D> H;
  if (o.bump_width) {
    for (double e : o.eps)
      H.push_back(Profile1D::triangle_bump(v == FamilyVariant::Annulus ? e : 1.0 / (2.0 * e), *o.bump_width, o.bump_peak));
  } else {
    for (const auto& p : o.profiles) H.push_back(parse_profile(p));
  }
  const double domain_hi = v == FamilyVariant::Annulus ? 0.1 : 1.0;
  json j{{"variant", o.variant}, {"eps", o.eps}};
  j["profiles"] = json::array();
  j["calabi"] = json::array();
  for (const auto& h : H) {
    j["profiles"].push_back(to_json(h));
    j["calabi"].push_back(h.integrate(0.0, domain_hi));
  }
  if (o.rank) {
    const auto rep = linear_independence(o.eps, H, v, o.rank_tol);
    j["matrix"] = rep.matrix;
    j["rank"] = rep.rank;
    j["singular_values"] = rep.singular_values;
    j["tolerance"] = rep.tolerance;
  } else {
    json m = json::array();
    for (double e : o.eps) {
      json row = json::array();
      for (const auto& h : H) row.push_back(v == FamilyVariant::Annulus ? mu_epsilon_annulus(h, e) : mu_epsilon_disk(h, e));
      m.push_back(row);
    }
    j["matrix"] = m;
  }
  emit(j, s, out);
  return kExitOk;
}

// ---------------------------------------------------------------- tree

int cmd_tree(const std::string& mesh, const std::optional<std::string>& values, bool normalize,
             const std::string& csv, std::size_t samples, const Settings& s, std::ostream& out) {
  auto field = reeb::load_field(mesh, values);
  if (normalize) field = reeb::normalize_mean(field);
  const auto tree = reeb::build_reeb_tree(field);
  json j = reeb::tree_to_json(tree);
  j["perturbed_vertices"] = field.perturbed_vertices;
  if (!csv.empty()) {
    std::ofstream f(csv);
    if (!f) throw Error(ErrorCode::ParseError, "cannot write " + csv);
    f << reeb::tree_to_csv(tree, samples);
    j["csv"] = csv;
  }
  emit(j, s, out);
  return kExitOk;
}

// ------------------------------------------------------------ generate

int cmd_generate(const std::string& shape, int level, std::size_t major, std::size_t minor, const std::string& field,
                 const std::string& format, const std::string& values_out, const Settings& s, std::ostream& out) {
  reeb::Mesh m;
  if (shape == "icosphere") m = fixtures::icosphere(level);
  else if (shape == "octahedron") m = fixtures::octahedron();
  else if (shape == "torus") m = fixtures::torus(major, minor);
  else throw Error(ErrorCode::UnknownName, "unknown shape " + shape);
  const std::vector<double> values =
      field == "zero" ? std::vector<double>(m.vertices.size(), 0.0) : fixtures::named_values(field, m);

  if (format == "off") {
    if (s.output.empty() || values_out.empty()) throw Error(ErrorCode::ParseError, "OFF output needs --output and --values-out");
    std::ofstream f(s.output), v(values_out);
    if (!f || !v) throw Error(ErrorCode::ParseError, "cannot write output files");
    f.precision(17);
    v.precision(17);
    f << "OFF\n" << m.vertices.size() << ' ' << m.triangles.size() << " 0\n";
    for (const auto& p : m.vertices) f << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
    for (const auto& t : m.triangles) f << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (double x : values) v << x << '\n';
    return kExitOk;
  }
  if (format != "json") throw Error(ErrorCode::UnknownName, "format must be json or off");
  json j;
  j["vertices"] = json::array();
  for (const auto& p : m.vertices) j["vertices"].push_back({p[0], p[1], p[2]});
  j["triangles"] = json::array();
  for (const auto& t : m.triangles) j["triangles"].push_back({t[0], t[1], t[2]});
  j["values"] = values;
  // Full precision: the mesh is data, not a report.
  const std::string text = j.dump() + "\n";
  if (s.output.empty()) {
    out << text;
  } else {
    std::ofstream f(s.output);
    if (!f) throw Error(ErrorCode::ParseError, "cannot write " + s.output);
    f << text;
  }
  return kExitOk;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum homology algebras and the Calabi quasimorphism on the 2-sphere", "calabi"};
  app.require_subcommand(1);
  app.fallthrough();
  Settings settings;
  settings.seed = seed_from_environment();
  std::optional<std::uint64_t> seed_flag;
  app.add_option("-o,--output", settings.output, "Write the report here instead of stdout");
  app.add_option("--seed", seed_flag, "Random seed (default 42, or CALABI_SEED)");

  std::function<int()> action;

  auto* alg = app.add_subcommand("algebra", "Quantum homology algebra computations");
  std::string alg_source, alg_action, alg_element, alg_omega;
  alg->add_option("algebra", alg_source, "Built-in name (S2, CP<n>, S2xS2, CP2blowup, nilpotent) or definition file")
      ->required();
  alg->add_option("action", alg_action, "table | euler | eval <expr> | invert <expr> | semisimple | props")->required();
  alg->add_option("element", alg_element, "Element expression, e.g. \"4P - A s^-1\" or euler");
  alg->add_option("--omega", alg_omega, "Omega as p/q (default 1)");
  alg->callback([&] { action = [&] { return cmd_algebra(alg_source, alg_action, alg_element, alg_omega, settings, out); }; });

  auto* mu = app.add_subcommand("mu", "Calabi quasimorphism of H = w o F");
  MuOptions mo;
  mu->add_option("mesh", mo.meshes, "Mesh files (JSON with values, or OFF with --values)")->required();
  mu->add_option("--values", mo.values, "Values file per mesh");
  mu->add_option("--w", mo.w, "Profile w: identity, JSON or a JSON file");
  mu->add_flag("--normalize", mo.normalize, "Subtract the mean of F first");
  mu->add_flag("--zeta", mo.zeta, "Report the zeta lower bound");
  mu->add_flag("--check-W", mo.check_w, "Report membership in the class W");
  mu->add_option("--eps-bisect", mo.eps_bisect, "Tolerance for the bisecting zero level")->check(CLI::PositiveNumber);
  mu->add_option("--oracle-samples", mo.oracle_samples, "Monte-Carlo estimate of the integral term with this many samples");
  mu->add_option("--jobs", mo.jobs, "Fields evaluated in parallel")->check(CLI::PositiveNumber);
  mu->callback([&] { action = [&] { return cmd_mu(mo, settings, out); }; });

  auto* fam = app.add_subcommand("family", "mu_eps families on the annulus and the disk");
  FamilyOptions fo;
  std::optional<double> bumps;
  fam->add_option("variant", fo.variant, "annulus | disk")->required();
  fam->add_option("--eps", fo.eps, "Comma-separated eps values")->delimiter(',')->required();
  fam->add_option("--profile", fo.profiles, "Profile H (JSON), repeatable");
  fam->add_option("--bumps", bumps, "One triangle bump of this half-width at each eps")->check(CLI::PositiveNumber);
  fam->add_option("--peak", fo.bump_peak, "Peak of the generated bumps");
  fam->add_flag("--rank", fo.rank, "Numerical rank of the matrix");
  fam->add_option("--rank-tol", fo.rank_tol, "Relative singular-value cut-off")->check(CLI::PositiveNumber);
  fam->callback([&] {
    fo.bump_width = bumps;
    action = [&] { return cmd_family(fo, settings, out); };
  });

  auto* tree = app.add_subcommand("tree", "Measured Reeb tree of a field");
  std::string tree_mesh, tree_csv;
  std::optional<std::string> tree_values;
  bool tree_normalize = false;
  std::size_t tree_samples = 16;
  tree->add_option("mesh", tree_mesh, "Mesh file")->required();
  tree->add_option("--values", tree_values, "Values file");
  tree->add_flag("--normalize", tree_normalize, "Subtract the mean of F first");
  tree->add_option("--csv", tree_csv, "Write edge,level,cumulative rows here");
  tree->add_option("--samples", tree_samples, "CSV rows per edge")->check(CLI::PositiveNumber);
  tree->callback([&] {
    action = [&] { return cmd_tree(tree_mesh, tree_values, tree_normalize, tree_csv, tree_samples, settings, out); };
  });

  auto* gen = app.add_subcommand("generate", "Write a fixture mesh with field values");
  std::string gen_shape, gen_field = "height", gen_format = "json", gen_values_out;
  int gen_level = 3;
  std::size_t gen_major = 16, gen_minor = 8;
  gen->add_option("shape", gen_shape, "icosphere | octahedron | torus")->required();
  gen->add_option("--level", gen_level, "Icosphere subdivision level")->check(CLI::Range(0, 7));
  gen->add_option("--major", gen_major, "Torus segments around the axis");
  gen->add_option("--minor", gen_minor, "Torus segments around the tube");
  gen->add_option("--field", gen_field, "height | two-bump | perturbed-height | zero");
  gen->add_option("--format", gen_format, "json | off");
  gen->add_option("--values-out", gen_values_out, "Values file for OFF output");
  gen->callback([&] {
    action = [&] {
      return cmd_generate(gen_shape, gen_level, gen_major, gen_minor, gen_field, gen_format, gen_values_out, settings, out);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    report_error(err, "UsageError", e.what());
    return kExitValidation;
  }
  if (seed_flag) settings.seed = *seed_flag;

  try {
    return action();
  } catch (const Error& e) {
    report_error(err, std::string(to_string(e.code())), e.what());
    return e.code() == ErrorCode::InternalTopologyError ? kExitInternal : kExitValidation;
  } catch (const std::exception& e) {
    report_error(err, "InternalError", e.what());
    return kExitInternal;
  }
}

}  // namespace calabi::cli
