#include "calabi/reeb.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

#include "calabi/error.hpp"

namespace calabi::reeb {

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  // Returns the new root.
  std::size_t unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[a] = b;
    return b;
  }
};

double triangle_area(const Point3& a, const Point3& b, const Point3& c) {
  const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
  const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
  const double cx = uy * vz - uz * vy, cy = uz * vx - ux * vz, cz = ux * vy - uy * vx;
  return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
}

void check_sphere(std::size_t n, const std::vector<Triangle>& tris) {
  if (tris.empty()) throw Error(ErrorCode::NotASphere, "mesh has no triangles");
  std::map<std::pair<std::size_t, std::size_t>, int> edge_count;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> link(n);
  UnionFind uf(n);
  std::vector<bool> used(n, false);
  for (const auto& t : tris) {
    for (int k = 0; k < 3; ++k) {
      const std::size_t a = t[k], b = t[(k + 1) % 3], c = t[(k + 2) % 3];
      ++edge_count[{std::min(a, b), std::max(a, b)}];
      link[a].push_back({b, c});
      used[a] = true;
      uf.unite(a, b);
    }
  }
  for (const auto& [e, count] : edge_count) {
    if (count != 2)
      throw Error(ErrorCode::NotASphere, "edge (" + std::to_string(e.first) + ", " + std::to_string(e.second) +
                                             ") lies on " + std::to_string(count) + " triangles");
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!used[v]) throw Error(ErrorCode::NotASphere, "vertex " + std::to_string(v) + " lies on no triangle");
    if (uf.find(v) != uf.find(0)) throw Error(ErrorCode::NotASphere, "mesh is disconnected");
    // The link must be a single cycle.
    std::map<std::size_t, std::size_t> local;
    for (const auto& [b, c] : link[v]) {
      local.emplace(b, local.size());
      local.emplace(c, local.size());
    }
    UnionFind luf(local.size());
    std::size_t joined = 0;
    for (const auto& [b, c] : link[v])
      if (luf.find(local[b]) != luf.find(local[c])) {
        luf.unite(local[b], local[c]);
        ++joined;
      }
    if (local.size() != link[v].size() || joined + 1 != local.size())
      throw Error(ErrorCode::NotASphere, "vertex " + std::to_string(v) + " is not a manifold point");
  }
  const long chi = static_cast<long>(n) - static_cast<long>(edge_count.size()) + static_cast<long>(tris.size());
  if (chi != 2) throw Error(ErrorCode::NotASphere, "Euler characteristic is " + std::to_string(chi) + ", expected 2");
}

// Sort by (value, index) and push each value at least delta above its
// predecessor. delta = 2^-50 * scale is a few ulps of any value in play.
void perturb(ScalarFieldOnSphere& f) {
  const std::size_t n = f.values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return f.values[a] != f.values[b] ? f.values[a] < f.values[b] : a < b;
  });
  const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
  const double scale = std::max({*hi - *lo, std::abs(*lo), std::abs(*hi), 1e-300});
  const double delta = std::ldexp(scale, -50);
  f.levels = f.values;
  f.perturbed_vertices.clear();
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t v = order[k];
    const double floor = f.levels[order[k - 1]] + delta;
    if (f.levels[v] < floor) {
      f.levels[v] = floor;
      f.perturbed_vertices.push_back(v);
    }
  }
  std::sort(f.perturbed_vertices.begin(), f.perturbed_vertices.end());
}

std::vector<std::vector<std::size_t>> vertex_neighbours(std::size_t n, const std::vector<Triangle>& tris) {
  std::vector<std::vector<std::size_t>> nb(n);
  for (const auto& t : tris)
    for (int k = 0; k < 3; ++k) {
      nb[t[k]].push_back(t[(k + 1) % 3]);
      nb[t[k]].push_back(t[(k + 2) % 3]);
    }
  for (auto& list : nb) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return nb;
}

void erase_value(std::vector<std::size_t>& v, std::size_t x) {
  v.erase(std::find(v.begin(), v.end(), x));
}

void replace_value(std::vector<std::size_t>& v, std::size_t from, std::size_t to) {
  *std::find(v.begin(), v.end(), from) = to;
}

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Augmented contour tree on the mesh vertices (join tree + split tree,
// merged by leaf peeling). Returns adjacency lists.
std::vector<std::vector<std::size_t>> contour_tree(const ScalarFieldOnSphere& f) {
  const std::size_t n = f.vertex_count();
  const auto nb = vertex_neighbours(n, f.triangles);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f.levels[a] < f.levels[b]; });
  std::vector<std::size_t> rank(n);
  for (std::size_t k = 0; k < n; ++k) rank[order[k]] = k;

  std::vector<std::size_t> jt_down(n, kNone), st_up(n, kNone);
  std::vector<std::vector<std::size_t>> jt_up(n), st_down(n);
  {
    UnionFind uf(n);
    std::vector<std::size_t> lowest(n);
    for (std::size_t k = n; k-- > 0;) {
      const std::size_t v = order[k];
      lowest[v] = v;
      for (std::size_t u : nb[v]) {
        if (rank[u] < rank[v]) continue;
        const std::size_t ru = uf.find(u);
        if (ru == uf.find(v)) continue;
        const std::size_t top = lowest[ru];
        jt_down[top] = v;
        jt_up[v].push_back(top);
        lowest[uf.unite(ru, v)] = v;
      }
    }
  }
  {
    UnionFind uf(n);
    std::vector<std::size_t> highest(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t v = order[k];
      highest[v] = v;
      for (std::size_t u : nb[v]) {
        if (rank[u] > rank[v]) continue;
        const std::size_t ru = uf.find(u);
        if (ru == uf.find(v)) continue;
        const std::size_t bottom = highest[ru];
        st_up[bottom] = v;
        st_down[v].push_back(bottom);
        highest[uf.unite(ru, v)] = v;
      }
    }
  }

  std::vector<std::vector<std::size_t>> ct(n);
  std::vector<bool> gone(n, false);
  auto upper_leaf = [&](std::size_t v) { return jt_up[v].empty() && st_down[v].size() == 1; };
  auto lower_leaf = [&](std::size_t v) { return st_down[v].empty() && jt_up[v].size() == 1; };
  std::deque<std::size_t> queue;
  for (std::size_t v = 0; v < n; ++v)
    if (upper_leaf(v) || lower_leaf(v)) queue.push_back(v);
  std::size_t remaining = n;
  while (remaining > 1) {
    if (queue.empty()) throw Error(ErrorCode::InternalTopologyError, "contour tree merge stalled");
    const std::size_t v = queue.front();
    queue.pop_front();
    if (gone[v]) continue;
    std::size_t u;
    if (upper_leaf(v)) {
      u = jt_down[v];
      if (u == kNone) throw Error(ErrorCode::InternalTopologyError, "leaf without a neighbour");
      erase_value(jt_up[u], v);
      const std::size_t d = st_down[v].front(), p = st_up[v];
      st_up[d] = p;
      if (p != kNone) replace_value(st_down[p], v, d);
    } else if (lower_leaf(v)) {
      u = st_up[v];
      if (u == kNone) throw Error(ErrorCode::InternalTopologyError, "leaf without a neighbour");
      erase_value(st_down[u], v);
      const std::size_t a = jt_up[v].front(), q = jt_down[v];
      jt_down[a] = q;
      if (q != kNone) replace_value(jt_up[q], v, a);
    } else {
      continue;
    }
    ct[v].push_back(u);
    ct[u].push_back(v);
    gone[v] = true;
    --remaining;
    if (!gone[u] && (upper_leaf(u) || lower_leaf(u))) queue.push_back(u);
  }
  return ct;
}

struct ArcData {
  double c1 = 0.0;
  double c2 = 0.0;
};

}  // namespace

double ScalarFieldOnSphere::min_level() const { return *std::min_element(levels.begin(), levels.end()); }
double ScalarFieldOnSphere::max_level() const { return *std::max_element(levels.begin(), levels.end()); }

ScalarFieldOnSphere make_field(const Mesh& mesh, std::vector<double> values,
                               std::optional<std::vector<double>> areas) {
  const std::size_t n = values.size();
  if (n == 0) throw Error(ErrorCode::ParseError, "field has no values");
  if (!mesh.vertices.empty() && mesh.vertices.size() != n)
    throw Error(ErrorCode::ParseError, "got " + std::to_string(n) + " values for " +
                                           std::to_string(mesh.vertices.size()) + " vertices");
  if (mesh.vertex_count != 0 && mesh.vertex_count != n)
    throw Error(ErrorCode::ParseError, "value count does not match vertex count");
  for (double v : values)
    if (!std::isfinite(v)) throw Error(ErrorCode::ParseError, "field values must be finite");
  for (const auto& t : mesh.triangles) {
    for (std::size_t i : t)
      if (i >= n) throw Error(ErrorCode::ParseError, "triangle index " + std::to_string(i) + " out of range");
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw Error(ErrorCode::DegenerateTriangle, "triangle repeats a vertex");
  }
  check_sphere(n, mesh.triangles);

  ScalarFieldOnSphere f;
  f.vertices = mesh.vertices;
  f.triangles = mesh.triangles;
  f.values = std::move(values);
  if (areas) {
    if (areas->size() != f.triangles.size()) throw Error(ErrorCode::ParseError, "one area per triangle expected");
    f.triangle_areas = std::move(*areas);
  } else {
    if (mesh.vertices.empty()) throw Error(ErrorCode::ParseError, "need vertex positions or explicit areas");
    for (const auto& t : f.triangles)
      f.triangle_areas.push_back(triangle_area(f.vertices[t[0]], f.vertices[t[1]], f.vertices[t[2]]));
  }
  double total = 0.0, biggest = 0.0;
  for (double a : f.triangle_areas) {
    if (!std::isfinite(a) || a < 0) throw Error(ErrorCode::DegenerateTriangle, "triangle area must be positive");
    total += a;
    biggest = std::max(biggest, a);
  }
  for (std::size_t t = 0; t < f.triangle_areas.size(); ++t)
    if (!(f.triangle_areas[t] > 1e-14 * biggest))
      throw Error(ErrorCode::DegenerateTriangle, "triangle " + std::to_string(t) + " has zero area");
  for (double& a : f.triangle_areas) a /= total;
  perturb(f);
  return f;
}

double field_mean(const ScalarFieldOnSphere& f) {
  double m = 0.0;
  for (std::size_t t = 0; t < f.triangles.size(); ++t) {
    const auto& tri = f.triangles[t];
    m += f.triangle_areas[t] * (f.values[tri[0]] + f.values[tri[1]] + f.values[tri[2]]) / 3.0;
  }
  return m;
}

ScalarFieldOnSphere normalize_mean(const ScalarFieldOnSphere& field) {
  ScalarFieldOnSphere f = field;
  const double m = field_mean(f);
  for (double& v : f.values) v -= m;
  perturb(f);
  return f;
}

// ------------------------------------------------------------------ files

Mesh read_off(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  std::size_t pos = 0;
  auto next = [&]() -> const std::string& {
    if (pos >= tokens.size()) throw Error(ErrorCode::ParseError, "OFF file ended early");
    return tokens[pos++];
  };
  auto number = [&]() {
    const std::string& t = next();
    try {
      std::size_t used = 0;
      double d = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return d;
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad number in OFF file: " + t);
    }
  };
  auto count = [&]() {
    const double d = number();
    if (d < 0 || d != std::floor(d)) throw Error(ErrorCode::ParseError, "bad count in OFF file");
    return static_cast<std::size_t>(d);
  };
  if (next() != "OFF") throw Error(ErrorCode::ParseError, "missing OFF header");
  Mesh m;
  const std::size_t nv = count(), nf = count();
  (void)count();
  m.vertex_count = nv;
  m.vertices.resize(nv);
  for (auto& p : m.vertices)
    for (double& c : p) c = number();
  for (std::size_t f = 0; f < nf; ++f) {
    if (count() != 3) throw Error(ErrorCode::ParseError, "only triangular faces are supported");
    Triangle t{};
    for (auto& i : t) i = count();
    m.triangles.push_back(t);
  }
  return m;
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Mesh mesh_from_json(const nlohmann::json& j) {
  Mesh m;
  if (j.contains("vertices")) {
    for (const auto& p : j.at("vertices")) {
      if (!p.is_array() || p.size() != 3) throw Error(ErrorCode::ParseError, "vertices must be [x, y, z]");
      m.vertices.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
    m.vertex_count = m.vertices.size();
  }
  for (const auto& t : j.at("triangles")) {
    if (!t.is_array() || t.size() != 3) throw Error(ErrorCode::ParseError, "triangles must be [i, j, k]");
    Triangle tri{};
    for (int k = 0; k < 3; ++k) {
      const long long i = t[k].get<long long>();
      if (i < 0) throw Error(ErrorCode::ParseError, "negative triangle index");
      tri[k] = static_cast<std::size_t>(i);
    }
    m.triangles.push_back(tri);
  }
  return m;
}

}  // namespace

Mesh read_mesh_file(const std::string& path) {
  if (ends_with(path, ".json")) {
    try {
      return mesh_from_json(nlohmann::json::parse(slurp(path)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("bad mesh JSON: ") + e.what());
    }
  }
  std::istringstream in(slurp(path));
  return read_off(in);
}

std::vector<double> read_values_file(const std::string& path) {
  const std::string text = slurp(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    try {
      auto j = nlohmann::json::parse(text);
      if (j.is_object()) j = j.at("values");
      return j.get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("bad values JSON: ") + e.what());
    }
  }
  std::istringstream in(text);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad value: " + tok);
    }
  }
  return out;
}

ScalarFieldOnSphere field_from_json(const nlohmann::json& j) {
  try {
    Mesh m = mesh_from_json(j);
    std::optional<std::vector<double>> areas;
    if (j.contains("areas")) areas = j.at("areas").get<std::vector<double>>();
    return make_field(m, j.at("values").get<std::vector<double>>(), std::move(areas));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad field JSON: ") + e.what());
  }
}

ScalarFieldOnSphere load_field(const std::string& mesh_path, const std::optional<std::string>& values_path) {
  if (ends_with(mesh_path, ".json")) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(slurp(mesh_path));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("bad mesh JSON: ") + e.what());
    }
    if (values_path) j["values"] = read_values_file(*values_path);
    return field_from_json(j);
  }
  if (!values_path) throw Error(ErrorCode::ParseError, "an OFF mesh needs a values file");
  return make_field(read_mesh_file(mesh_path), read_values_file(*values_path));
}

nlohmann::json field_to_json(const ScalarFieldOnSphere& f) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& p : f.vertices) j["vertices"].push_back({p[0], p[1], p[2]});
  j["triangles"] = nlohmann::json::array();
  for (const auto& t : f.triangles) j["triangles"].push_back({t[0], t[1], t[2]});
  j["values"] = f.values;
  if (f.vertices.empty()) j["areas"] = f.triangle_areas;
  return j;
}

// ------------------------------------------------------------------- tree

double TreeEdge::cumulative_at(double level) const {
  if (level <= level_lo()) return 0.0;
  if (level >= level_hi()) return measure;
  auto it = std::upper_bound(profile.begin(), profile.end(), level,
                             [](double x, const ProfilePiece& p) { return x < p.hi; });
  if (it == profile.end()) return measure;
  const double t = level - it->lo;
  return it->cum_before + it->c1 * t + it->c2 * t * t;
}

double TreeEdge::level_at(double offset) const {
  if (offset <= 0) return level_lo();
  if (offset >= measure) return level_hi();
  auto it = std::upper_bound(profile.begin(), profile.end(), offset,
                             [](double x, const ProfilePiece& p) { return x < p.cum_before + p.mass(); });
  if (it == profile.end()) return level_hi();
  const double r = offset - it->cum_before;
  const double width = it->hi - it->lo;
  double t;
  const double disc = it->c1 * it->c1 + 4.0 * it->c2 * r;
  if (it->c2 == 0.0) {
    t = it->c1 > 0 ? r / it->c1 : 0.0;
  } else {
    const double root = std::sqrt(std::max(0.0, disc));
    const double denom = it->c1 + root;
    t = denom > 0 ? 2.0 * r / denom : width;
  }
  return it->lo + std::clamp(t, 0.0, width);
}

std::size_t MeasuredTree::other_end(std::size_t edge, std::size_t vertex) const {
  const auto& e = edges[edge];
  return e.lower == vertex ? e.upper : e.lower;
}

double MeasuredTree::total_measure() const {
  double s = 0.0;
  for (const auto& e : edges) s += e.measure;
  return s;
}

namespace {

void finish_vertices(MeasuredTree& t) {
  t.incident.assign(t.vertices.size(), {});
  for (auto& v : t.vertices) v.up_degree = v.down_degree = 0;
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    t.incident[t.edges[e].lower].push_back(e);
    t.incident[t.edges[e].upper].push_back(e);
    ++t.vertices[t.edges[e].lower].up_degree;
    ++t.vertices[t.edges[e].upper].down_degree;
  }
  for (auto& v : t.vertices)
    v.kind = v.up_degree + v.down_degree == 1 ? NodeKind::Extremum : NodeKind::SaddleComponent;
}

// Edges of zero measure are collapsed to their lower endpoint; regular
// (one up, one down) vertices that this leaves behind are spliced out.
void contract_zero_edges(MeasuredTree& t) {
  bool changed = false;
  for (;;) {
    auto it = std::find_if(t.edges.begin(), t.edges.end(), [](const TreeEdge& e) { return !(e.measure > 0); });
    if (it == t.edges.end()) break;
    changed = true;
    const std::size_t keep = it->lower, drop = it->upper;
    t.edges.erase(it);
    for (auto& e : t.edges) {
      if (e.lower == drop) e.lower = keep;
      if (e.upper == drop) e.upper = keep;
    }
    t.vertices[drop].mesh_vertex = kNone;
  }
  if (!changed) return;
  finish_vertices(t);
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    if (t.vertices[v].mesh_vertex == kNone || t.vertices[v].up_degree != 1 || t.vertices[v].down_degree != 1) continue;
    const std::size_t a = t.incident[v][0], b = t.incident[v][1];
    const std::size_t below = t.edges[a].upper == v ? a : b, above = below == a ? b : a;
    TreeEdge& lo = t.edges[below];
    for (auto piece : t.edges[above].profile) {
      piece.cum_before += lo.measure;
      lo.profile.push_back(piece);
    }
    lo.measure += t.edges[above].measure;
    lo.upper = t.edges[above].upper;
    t.edges.erase(t.edges.begin() + static_cast<std::ptrdiff_t>(above));
    t.vertices[v].mesh_vertex = kNone;
    finish_vertices(t);
  }
  // Compact the vertex list.
  std::vector<std::size_t> remap(t.vertices.size(), kNone);
  std::vector<TreeVertex> kept;
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    if (t.vertices[v].mesh_vertex == kNone) continue;
    remap[v] = kept.size();
    kept.push_back(t.vertices[v]);
  }
  t.vertices = std::move(kept);
  for (auto& e : t.edges) {
    e.lower = remap[e.lower];
    e.upper = remap[e.upper];
  }
  finish_vertices(t);
}

}  // namespace

MeasuredTree make_tree(const std::vector<double>& levels, const std::vector<ExplicitEdge>& edges) {
  MeasuredTree t;
  for (std::size_t v = 0; v < levels.size(); ++v) t.vertices.push_back({NodeKind::Extremum, levels[v], v, 0, 0});
  for (const auto& e : edges) {
    if (e.u >= levels.size() || e.v >= levels.size()) throw Error(ErrorCode::DimensionMismatch, "edge endpoint out of range");
    const bool swap = levels[e.u] > levels[e.v];
    TreeEdge te;
    te.lower = swap ? e.v : e.u;
    te.upper = swap ? e.u : e.v;
    te.measure = e.measure;
    const double lo = levels[te.lower], hi = levels[te.upper];
    if (!(hi > lo)) throw Error(ErrorCode::DomainError, "edge endpoints need distinct levels");
    te.profile.push_back({lo, hi, e.measure / (hi - lo), 0.0, 0.0});
    t.edges.push_back(std::move(te));
  }
  if (t.edges.size() + 1 != t.vertices.size()) throw Error(ErrorCode::InternalTopologyError, "not a tree");
  finish_vertices(t);
  return t;
}

MeasuredTree build_reeb_tree(const ScalarFieldOnSphere& f) {
  const std::size_t n = f.vertex_count();
  const auto ct = contour_tree(f);
  const auto& L = f.levels;

  // Root at the global minimum; arcs are named by their child vertex.
  const std::size_t root =
      static_cast<std::size_t>(std::min_element(L.begin(), L.end()) - L.begin());
  std::vector<std::size_t> parent(n, kNone), depth(n, 0);
  {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{root};
    seen[root] = true;
    std::size_t visited = 0;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      ++visited;
      for (std::size_t u : ct[v]) {
        if (seen[u]) continue;
        seen[u] = true;
        parent[u] = v;
        depth[u] = depth[v] + 1;
        stack.push_back(u);
      }
    }
    std::size_t arcs = 0;
    for (const auto& a : ct) arcs += a.size();
    if (visited != n || arcs != 2 * (n - 1))
      throw Error(ErrorCode::InternalTopologyError, "contour graph is not a spanning tree");
  }

  std::vector<ArcData> arc(n);
  std::vector<std::size_t> up_path, down_path;
  // Spread `k * ((L - a)^2)'`-type densities over the monotone path x -> y.
  auto deposit = [&](std::size_t x, std::size_t y, auto&& coeffs) {
    up_path.clear();
    down_path.clear();
    std::size_t p = x, q = y;
    while (p != q) {
      if (depth[p] >= depth[q]) {
        up_path.push_back(p);
        p = parent[p];
      } else {
        down_path.push_back(q);
        q = parent[q];
      }
    }
    for (std::size_t c : up_path) {
      const double lo = std::min(L[c], L[parent[c]]), hi = std::max(L[c], L[parent[c]]);
      if (lo < L[x] || hi > L[y]) throw Error(ErrorCode::InternalTopologyError, "non-monotone contour path");
      coeffs(arc[c], lo);
    }
    for (std::size_t c : down_path) {
      const double lo = std::min(L[c], L[parent[c]]), hi = std::max(L[c], L[parent[c]]);
      if (lo < L[x] || hi > L[y]) throw Error(ErrorCode::InternalTopologyError, "non-monotone contour path");
      coeffs(arc[c], lo);
    }
  };

  for (std::size_t t = 0; t < f.triangles.size(); ++t) {
    std::array<std::size_t, 3> v = f.triangles[t];
    std::sort(v.begin(), v.end(), [&](std::size_t a, std::size_t b) { return L[a] < L[b]; });
    const double a = L[v[0]], b = L[v[1]], c = L[v[2]], area = f.triangle_areas[t];
    // Below b: area(L) = A (L - a)^2 / ((b - a)(c - a)).
    const double k_lo = area / ((b - a) * (c - a));
    deposit(v[0], v[1], [&](ArcData& d, double lo) {
      d.c1 += 2.0 * k_lo * (lo - a);
      d.c2 += k_lo;
    });
    // Above b: area above L is A (c - L)^2 / ((c - a)(c - b)).
    const double k_hi = area / ((c - a) * (c - b));
    deposit(v[1], v[2], [&](ArcData& d, double lo) {
      d.c1 += 2.0 * k_hi * (c - lo);
      d.c2 -= k_hi;
    });
  }

  // Contract regular nodes.
  std::vector<std::size_t> up_deg(n, 0), down_deg(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t u : ct[v]) (L[u] > L[v] ? up_deg[v] : down_deg[v])++;
  auto regular = [&](std::size_t v) { return up_deg[v] == 1 && down_deg[v] == 1; };

  MeasuredTree tree;
  std::vector<std::size_t> node_of(n, kNone);
  for (std::size_t k = 0; k < n; ++k) {
    if (regular(k)) continue;
    node_of[k] = tree.vertices.size();
    tree.vertices.push_back({NodeKind::Extremum, f.levels[k], k, 0, 0});
  }
  auto arc_child = [&](std::size_t x, std::size_t y) { return parent[x] == y ? x : y; };
  for (std::size_t k = 0; k < n; ++k) {
    if (node_of[k] == kNone) continue;
    for (std::size_t start : ct[k]) {
      if (L[start] < L[k]) continue;
      TreeEdge e;
      e.lower = node_of[k];
      e.measure = 0.0;
      std::size_t prev = k, cur = start;
      for (;;) {
        const ArcData& d = arc[arc_child(prev, cur)];
        ProfilePiece piece{L[prev], L[cur], d.c1, d.c2, e.measure};
        e.measure += piece.mass();
        e.profile.push_back(piece);
        if (!regular(cur)) break;
        const std::size_t next = *std::find_if(ct[cur].begin(), ct[cur].end(), [&](std::size_t u) { return L[u] > L[cur]; });
        prev = cur;
        cur = next;
      }
      e.upper = node_of[cur];
      tree.edges.push_back(std::move(e));
    }
  }
  finish_vertices(tree);
  contract_zero_edges(tree);
  if (tree.edges.size() + 1 != tree.vertices.size())
    throw Error(ErrorCode::InternalTopologyError, "Reeb graph is not a tree");
  return tree;
}

double push_forward_value(const MeasuredTree& tree, const TreePoint& point) {
  if (point.kind == TreePoint::Kind::Vertex) return tree.vertices.at(point.id).level;
  return tree.edges.at(point.id).level_at(point.offset);
}

double tree_integral(const MeasuredTree& tree, const Profile1D& w) {
  double total = 0.0;
  for (const auto& e : tree.edges)
    for (const auto& p : e.profile) total += w.integrate_linear_weight(p.lo, p.hi, p.c1, 2.0 * p.c2);
  return total;
}

double mesh_quadrature(const ScalarFieldOnSphere& f, const Profile1D& w) {
  double total = 0.0;
  for (std::size_t t = 0; t < f.triangles.size(); ++t) {
    const auto& tri = f.triangles[t];
    total += f.triangle_areas[t] * (w(f.levels[tri[0]]) + w(f.levels[tri[1]]) + w(f.levels[tri[2]])) / 3.0;
  }
  return total;
}

double sampled_integral(const ScalarFieldOnSphere& f, const Profile1D& w, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw Error(ErrorCode::DomainError, "need at least one sample");
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(f.triangle_areas.begin(), f.triangle_areas.end());
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto& tri = f.triangles[pick(rng)];
    double a = u01(rng), b = u01(rng);
    if (a + b > 1.0) {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    const double l0 = f.levels[tri[0]];
    total += w(l0 + a * (f.levels[tri[1]] - l0) + b * (f.levels[tri[2]] - l0));
  }
  return total / static_cast<double>(samples);
}

std::string to_string(NodeKind k) { return k == NodeKind::Extremum ? "EXTREMUM" : "SADDLE_COMPONENT"; }

nlohmann::json tree_to_json(const MeasuredTree& tree) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (std::size_t v = 0; v < tree.vertices.size(); ++v) {
    const auto& tv = tree.vertices[v];
    j["vertices"].push_back(
        {{"id", v}, {"kind", to_string(tv.kind)}, {"level", tv.level}, {"mesh_vertex", tv.mesh_vertex}});
  }
  j["edges"] = nlohmann::json::array();
  for (std::size_t e = 0; e < tree.edges.size(); ++e) {
    const auto& te = tree.edges[e];
    j["edges"].push_back({{"id", e},
                          {"endpoints", {te.lower, te.upper}},
                          {"measure", te.measure},
                          {"level_range", {te.level_lo(), te.level_hi()}}});
  }
  j["total_measure"] = tree.total_measure();
  return j;
}

std::string tree_to_csv(const MeasuredTree& tree, std::size_t samples_per_edge) {
  std::ostringstream out;
  out.precision(12);
  out << "edge,level,cumulative\n";
  const std::size_t m = std::max<std::size_t>(samples_per_edge, 1);
  for (std::size_t e = 0; e < tree.edges.size(); ++e) {
    const auto& te = tree.edges[e];
    for (std::size_t k = 0; k <= m; ++k) {
      const double level = te.level_lo() + (te.level_hi() - te.level_lo()) * static_cast<double>(k) / static_cast<double>(m);
      out << e << ',' << level << ',' << te.cumulative_at(level) << '\n';
    }
  }
  return out.str();
}

}  // namespace calabi::reeb
