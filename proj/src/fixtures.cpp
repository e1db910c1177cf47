#include "calabi/fixtures.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "calabi/error.hpp"

namespace calabi::fixtures {

using reeb::Mesh;
using reeb::Point3;
using reeb::Triangle;

namespace {

Point3 normalized(const Point3& p) {
  const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  return {p[0] / r, p[1] / r, p[2] / r};
}

Mesh split(const Mesh& m, bool project, std::vector<std::pair<std::size_t, std::size_t>>* parents) {
  Mesh out;
  out.vertices = m.vertices;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> mid;
  auto midpoint = [&](std::size_t a, std::size_t b) {
    const auto key = std::minmax(a, b);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const Point3& p = m.vertices[a];
    const Point3& q = m.vertices[b];
    Point3 c{(p[0] + q[0]) / 2, (p[1] + q[1]) / 2, (p[2] + q[2]) / 2};
    out.vertices.push_back(project ? normalized(c) : c);
    if (parents) parents->push_back(key);
    return mid[key] = out.vertices.size() - 1;
  };
  for (const auto& t : m.triangles) {
    const std::size_t ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
    out.triangles.push_back({t[0], ab, ca});
    out.triangles.push_back({t[1], bc, ab});
    out.triangles.push_back({t[2], ca, bc});
    out.triangles.push_back({ab, bc, ca});
  }
  out.vertex_count = out.vertices.size();
  return out;
}

}  // namespace

Mesh octahedron() {
  Mesh m;
  m.vertices = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  m.triangles = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  m.vertex_count = 6;
  return m;
}

Mesh icosphere(int level) {
  const double phi = std::numbers::phi;
  Mesh m;
  m.vertices = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
                {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1},  {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& p : m.vertices) p = normalized(p);
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                 {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  m.vertex_count = m.vertices.size();
  for (int k = 0; k < level; ++k) m = split(m, true, nullptr);
  return m;
}

Mesh torus(std::size_t nu, std::size_t nv) {
  if (nu < 3 || nv < 3) throw Error(ErrorCode::DomainError, "torus needs at least 3 segments each way");
  const double big = 1.0, small = 0.35;
  Mesh m;
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < nv; ++j) {
      const double u = 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(nu);
      const double v = 2 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(nv);
      m.vertices.push_back({(big + small * std::cos(v)) * std::cos(u), (big + small * std::cos(v)) * std::sin(u),
                            small * std::sin(v)});
    }
  auto id = [&](std::size_t i, std::size_t j) { return (i % nu) * nv + (j % nv); };
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < nv; ++j) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  m.vertex_count = m.vertices.size();
  return m;
}

std::pair<Mesh, std::vector<double>> subdivide(const Mesh& mesh, const std::vector<double>& values) {
  std::vector<std::pair<std::size_t, std::size_t>> parents;
  Mesh out = split(mesh, false, &parents);
  std::vector<double> v = values;
  for (const auto& [a, b] : parents) v.push_back((values[a] + values[b]) / 2);
  return {std::move(out), std::move(v)};
}

std::vector<double> height_values(const Mesh& mesh) {
  std::vector<double> v;
  for (const auto& p : mesh.vertices) v.push_back(p[2] / 2);
  return v;
}

std::vector<double> two_bump_values(const Mesh& mesh) {
  std::vector<double> v;
  for (const auto& p : mesh.vertices) v.push_back(p[0] * p[0] + 0.3 * p[2]);
  return v;
}

std::vector<double> perturbed_height_values(const Mesh& mesh) {
  const double c = std::sqrt(0.5);
  const Point3 centre{c, 0.0, c};
  std::vector<double> v;
  for (const auto& p : mesh.vertices) {
    const double dx = p[0] - centre[0], dy = p[1] - centre[1], dz = p[2] - centre[2];
    v.push_back(p[2] / 2 + 0.05 * std::exp(-(dx * dx + dy * dy + dz * dz) / 0.1));
  }
  return v;
}

std::vector<double> named_values(const std::string& name, const Mesh& mesh) {
  if (name == "height") return height_values(mesh);
  if (name == "two-bump") return two_bump_values(mesh);
  if (name == "perturbed-height") return perturbed_height_values(mesh);
  throw Error(ErrorCode::UnknownName, "unknown field: " + name);
}

reeb::ScalarFieldOnSphere make(const Mesh& mesh, const std::vector<double>& values) {
  return reeb::make_field(mesh, values);
}

}  // namespace calabi::fixtures
