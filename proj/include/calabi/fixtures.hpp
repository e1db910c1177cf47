#pragma once

// Meshes and fields used by the tests, the acceptance run and `calabi generate`.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "calabi/reeb.hpp"

namespace calabi::fixtures {

reeb::Mesh octahedron();
// Subdivided icosahedron projected to the unit sphere; 20 * 4^level triangles.
reeb::Mesh icosphere(int level);
reeb::Mesh torus(std::size_t major_segments, std::size_t minor_segments);

// 1-to-4 midpoint split without projection; values are interpolated, so the
// PL field is unchanged.
std::pair<reeb::Mesh, std::vector<double>> subdivide(const reeb::Mesh& mesh, const std::vector<double>& values);

// F = x3 / 2
std::vector<double> height_values(const reeb::Mesh& mesh);
// F = x1^2 + 0.3 x3: two maxima, one saddle, one minimum
std::vector<double> two_bump_values(const reeb::Mesh& mesh);
// x3 / 2 plus a Gaussian bump of height 0.05 at latitude 45 degrees
std::vector<double> perturbed_height_values(const reeb::Mesh& mesh);

// "height", "two-bump", "perturbed-height"
std::vector<double> named_values(const std::string& name, const reeb::Mesh& mesh);

reeb::ScalarFieldOnSphere make(const reeb::Mesh& mesh, const std::vector<double>& values);

}  // namespace calabi::fixtures
