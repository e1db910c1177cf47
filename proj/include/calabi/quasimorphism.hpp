#pragma once

// Median of a measured tree, the Calabi quasimorphism on autonomous
// Hamiltonians H = w o F, the class W and the mu_eps families.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "calabi/profile.hpp"
#include "calabi/reeb.hpp"

namespace calabi {

struct Median {
  reeb::TreePoint point;
  double level = 0.0;
  // One entry per component of T minus the point.
  std::vector<double> component_measures;
};

Median median(const reeb::MeasuredTree& tree);

struct WMembership {
  bool ok = true;
  std::vector<std::string> reasons;
  std::vector<std::string> notes;
};

constexpr double kEpsBisect = 1e-9;

// Conditions (a) Morse without merged saddles, (b) 0 a regular value,
// (c) no level-0 component splitting the area into halves.
WMembership in_class_W(const reeb::ScalarFieldOnSphere& field, double eps_bisect = kEpsBisect);
WMembership in_class_W(const reeb::ScalarFieldOnSphere& field, const reeb::MeasuredTree& tree,
                       double eps_bisect = kEpsBisect);

struct QuasimorphismReport {
  double mu = 0.0;
  double integral_term = 0.0;
  double median_term = 0.0;
  Median median;
  double c0_norm = 0.0;
  std::optional<double> zeta_lower;
  std::optional<WMembership> in_W;
};

QuasimorphismReport mu_autonomous(const reeb::ScalarFieldOnSphere& field, const Profile1D& w);
QuasimorphismReport mu_autonomous(const reeb::MeasuredTree& tree, const Profile1D& w);

// mu(w1 + w2) - mu(w1) - mu(w2)
double homomorphism_check(const reeb::ScalarFieldOnSphere& field, const Profile1D& w1, const Profile1D& w2);
double homomorphism_check(const reeb::MeasuredTree& tree, const Profile1D& w1, const Profile1D& w2);

// |mu(psi_F)| / (max F - min F) with w = id; expects a mean-zero field.
// Throws ZeroNorm for constant fields.
QuasimorphismReport zeta_lower_bound(const reeb::ScalarFieldOnSphere& field);
QuasimorphismReport zeta_lower_bound(const reeb::ScalarFieldOnSphere& field, const reeb::MeasuredTree& tree);

// int_0^0.1 H dp - H(eps), eps in (0, 0.1)
double mu_epsilon_annulus(const Profile1D& H, double eps);
// int_0^1 H dc - H(1 / (2 eps)) / eps, eps in (1/2, 1)
double mu_epsilon_disk(const Profile1D& H, double eps);

enum class FamilyVariant { Annulus, Disk };

struct IndependenceReport {
  std::vector<std::vector<double>> matrix;  // matrix[i][j] = mu_{eps_i}(H_j)
  std::vector<double> singular_values;
  std::size_t rank = 0;
  double tolerance = 0.0;
};

IndependenceReport linear_independence(const std::vector<double>& eps_list, const std::vector<Profile1D>& profiles,
                                       FamilyVariant variant, double relative_tolerance = 1e-9);

nlohmann::json to_json(const Median& m);
nlohmann::json to_json(const WMembership& w);
nlohmann::json to_json(const QuasimorphismReport& r);

}  // namespace calabi
