#pragma once

// Piecewise-linear scalar fields on triangulated spheres and their measured
// Reeb trees.

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "calabi/profile.hpp"

namespace calabi::reeb {

using Point3 = std::array<double, 3>;
using Triangle = std::array<std::size_t, 3>;

struct Mesh {
  std::vector<Point3> vertices;  // may be empty when areas are given explicitly
  std::vector<Triangle> triangles;
  std::size_t vertex_count = 0;
};

struct ScalarFieldOnSphere {
  std::vector<Point3> vertices;
  std::vector<Triangle> triangles;
  std::vector<double> values;          // as supplied
  std::vector<double> triangle_areas;  // normalized, sum 1
  // Strictly increasing in (value, index) order; equals `values` unless ties
  // had to be separated.
  std::vector<double> levels;
  std::vector<std::size_t> perturbed_vertices;

  std::size_t vertex_count() const { return values.size(); }
  double min_level() const;
  double max_level() const;
};

// Validates the complex (closed, connected, manifold, chi = 2) and areas.
// Areas come from vertex positions unless `areas` is given.
ScalarFieldOnSphere make_field(const Mesh& mesh, std::vector<double> values,
                               std::optional<std::vector<double>> areas = std::nullopt);

// F - integral(F); re-applies the tie perturbation.
ScalarFieldOnSphere normalize_mean(const ScalarFieldOnSphere& field);
// Integral of the PL field against the normalized area.
double field_mean(const ScalarFieldOnSphere& field);

Mesh read_off(std::istream& in);
Mesh read_mesh_file(const std::string& path);
// {"vertices", "triangles", "values", "areas"?}; values may also come from a
// separate file holding a JSON array or whitespace-separated numbers.
ScalarFieldOnSphere load_field(const std::string& mesh_path,
                               const std::optional<std::string>& values_path = std::nullopt);
ScalarFieldOnSphere field_from_json(const nlohmann::json& j);
nlohmann::json field_to_json(const ScalarFieldOnSphere& field);
std::vector<double> read_values_file(const std::string& path);

enum class NodeKind { Extremum, SaddleComponent };

struct TreeVertex {
  NodeKind kind;
  double level;
  std::size_t mesh_vertex;
  std::size_t down_degree;
  std::size_t up_degree;
};

// On a piece, cumulative measure from `lo` is c1*(L - lo) + c2*(L - lo)^2.
struct ProfilePiece {
  double lo;
  double hi;
  double c1;
  double c2;
  double cum_before;

  double mass() const { return c1 * (hi - lo) + c2 * (hi - lo) * (hi - lo); }
};

struct TreeEdge {
  std::size_t lower;
  std::size_t upper;
  double measure;
  std::vector<ProfilePiece> profile;

  double level_lo() const { return profile.front().lo; }
  double level_hi() const { return profile.back().hi; }
  // Measure of the part of the edge below `level` (clamped to the range).
  double cumulative_at(double level) const;
  // Inverse of cumulative_at on (0, measure).
  double level_at(double offset) const;
};

struct MeasuredTree {
  std::vector<TreeVertex> vertices;
  std::vector<TreeEdge> edges;
  std::vector<std::vector<std::size_t>> incident;  // edge ids per vertex

  std::size_t other_end(std::size_t edge, std::size_t vertex) const;
  double total_measure() const;
};

// Builds a tree from explicit data with Lebesgue-like (linear) profiles.
// Each edge is {u, v, measure}; the endpoint with the lower level is `lower`.
struct ExplicitEdge {
  std::size_t u;
  std::size_t v;
  double measure;
};
MeasuredTree make_tree(const std::vector<double>& levels, const std::vector<ExplicitEdge>& edges);

struct TreePoint {
  enum class Kind { Vertex, Edge };
  Kind kind = Kind::Vertex;
  std::size_t id = 0;
  double offset = 0.0;  // measure from the edge's lower end

  static TreePoint vertex(std::size_t v) { return {Kind::Vertex, v, 0.0}; }
  static TreePoint on_edge(std::size_t e, double t) { return {Kind::Edge, e, t}; }
};

MeasuredTree build_reeb_tree(const ScalarFieldOnSphere& field);

double push_forward_value(const MeasuredTree& tree, const TreePoint& point);

// Integral over the tree of w(level(x)) against the tree measure.
double tree_integral(const MeasuredTree& tree, const Profile1D& w);

// Sum over triangles of area * mean of w at the corners; exact for affine w.
double mesh_quadrature(const ScalarFieldOnSphere& field, const Profile1D& w);

// Mean of w(F) over uniform area samples.
double sampled_integral(const ScalarFieldOnSphere& field, const Profile1D& w, std::size_t samples,
                        std::uint64_t seed);

nlohmann::json tree_to_json(const MeasuredTree& tree);
// One row per edge sample: edge,level,cumulative.
std::string tree_to_csv(const MeasuredTree& tree, std::size_t samples_per_edge = 16);

std::string to_string(NodeKind k);

}  // namespace calabi::reeb
