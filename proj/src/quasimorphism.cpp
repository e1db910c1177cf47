#include "calabi/quasimorphism.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/SVD>

#include "calabi/error.hpp"

namespace calabi {

using reeb::MeasuredTree;
using reeb::TreePoint;

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Tree rooted at vertex 0: parent edge and total measure strictly below.
struct Rooted {
  std::vector<std::size_t> parent_edge;
  std::vector<double> below;
};

Rooted root_tree(const MeasuredTree& t) {
  const std::size_t n = t.vertices.size();
  Rooted r{std::vector<std::size_t>(n, kNone), std::vector<double>(n, 0.0)};
  std::vector<std::size_t> order{0};
  std::vector<bool> seen(n, false);
  seen[0] = true;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t v = order[k];
    for (std::size_t e : t.incident[v]) {
      const std::size_t u = t.other_end(e, v);
      if (seen[u]) continue;
      seen[u] = true;
      r.parent_edge[u] = e;
      order.push_back(u);
    }
  }
  if (order.size() != n) throw Error(ErrorCode::InternalTopologyError, "measured tree is disconnected");
  for (std::size_t k = order.size(); k-- > 1;) {
    const std::size_t v = order[k];
    const std::size_t e = r.parent_edge[v];
    r.below[t.other_end(e, v)] += r.below[v] + t.edges[e].measure;
  }
  return r;
}

// Measure of the component of T minus {v} entered through edge e.
double component_through(const MeasuredTree& t, const Rooted& r, double total, std::size_t v, std::size_t e) {
  const std::size_t u = t.other_end(e, v);
  if (r.parent_edge[u] == e) return t.edges[e].measure + r.below[u];
  return total - r.below[v];
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(12);
  s << x;
  return s.str();
}

}  // namespace

Median median(const MeasuredTree& t) {
  if (t.vertices.empty()) throw Error(ErrorCode::DomainError, "empty tree");
  const Rooted r = root_tree(t);
  const double total = t.total_measure();
  const double half = total / 2;
  std::size_t v = 0;
  for (std::size_t steps = 0; steps <= t.vertices.size(); ++steps) {
    std::size_t heavy = kNone;
    double heavy_measure = 0.0;
    std::vector<double> comps;
    for (std::size_t e : t.incident[v]) {
      const double c = component_through(t, r, total, v, e);
      comps.push_back(c);
      if (c > half) {
        heavy = e;
        heavy_measure = c;
      }
    }
    if (heavy == kNone) {
      Median m;
      m.point = TreePoint::vertex(v);
      m.level = t.vertices[v].level;
      m.component_measures = std::move(comps);
      return m;
    }
    const auto& e = t.edges[heavy];
    const double step = heavy_measure - half;
    if (step < e.measure) {
      Median m;
      const double offset = e.lower == v ? step : e.measure - step;
      m.point = TreePoint::on_edge(heavy, offset);
      m.level = e.level_at(offset);
      m.component_measures = {total - heavy_measure + step, heavy_measure - step};
      return m;
    }
    v = t.other_end(heavy, v);
  }
  throw Error(ErrorCode::InternalTopologyError, "median search did not terminate");
}

QuasimorphismReport mu_autonomous(const MeasuredTree& tree, const Profile1D& w) {
  QuasimorphismReport rep;
  rep.integral_term = reeb::tree_integral(tree, w);
  rep.median = median(tree);
  rep.median_term = w(rep.median.level);
  rep.mu = rep.integral_term - rep.median_term;
  double lo = tree.vertices.front().level, hi = lo;
  for (const auto& v : tree.vertices) {
    lo = std::min(lo, v.level);
    hi = std::max(hi, v.level);
  }
  rep.c0_norm = w.max_on(lo, hi) - w.min_on(lo, hi);
  return rep;
}

QuasimorphismReport mu_autonomous(const reeb::ScalarFieldOnSphere& field, const Profile1D& w) {
  return mu_autonomous(reeb::build_reeb_tree(field), w);
}

double homomorphism_check(const MeasuredTree& tree, const Profile1D& w1, const Profile1D& w2) {
  return mu_autonomous(tree, w1 + w2).mu - mu_autonomous(tree, w1).mu - mu_autonomous(tree, w2).mu;
}

double homomorphism_check(const reeb::ScalarFieldOnSphere& field, const Profile1D& w1, const Profile1D& w2) {
  return homomorphism_check(reeb::build_reeb_tree(field), w1, w2);
}

WMembership in_class_W(const reeb::ScalarFieldOnSphere& field, const MeasuredTree& t, double eps_bisect) {
  WMembership out;
  const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
  const double range = *hi - *lo;
  const double mean = reeb::field_mean(field);
  if (std::abs(mean) > 1e-9 * std::max(range, 1e-300))
    out.reasons.push_back("field mean " + fmt(mean) + " is not zero; normalize first");
  if (!field.perturbed_vertices.empty())
    out.notes.push_back(std::to_string(field.perturbed_vertices.size()) +
                        " tied vertex values separated by index order");
  std::size_t zeros = 0;
  double first_zero_level = 0.0;
  for (std::size_t v = 0; v < field.values.size(); ++v) {
    if (field.values[v] != 0.0) continue;
    if (zeros++ == 0) first_zero_level = field.levels[v];
  }
  if (zeros > 0)
    out.notes.push_back(std::to_string(zeros) + " vertex value(s) exactly 0 before perturbation; (b) uses the "
                        "perturbed levels (first such vertex now at " + fmt(first_zero_level) + ")");

  // (a)
  for (std::size_t v = 0; v < t.vertices.size(); ++v) {
    const std::size_t degree = t.incident[v].size();
    if (degree > 3)
      out.reasons.push_back("degenerate saddle of degree " + std::to_string(degree) + " at level " +
                            fmt(t.vertices[v].level));
  }
  // (b)
  for (std::size_t v = 0; v < t.vertices.size(); ++v)
    if (t.vertices[v].level == 0.0)
      out.reasons.push_back("critical component at level 0 (tree vertex " + std::to_string(v) + ")");
  // (c)
  const Rooted r = root_tree(t);
  const double total = t.total_measure();
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    const auto& te = t.edges[e];
    if (!(te.level_lo() < 0.0 && 0.0 < te.level_hi())) continue;
    const double side = component_through(t, r, total, te.upper, e) - te.measure + te.cumulative_at(0.0);
    if (std::abs(side - total / 2) <= eps_bisect)
      out.reasons.push_back("bisecting zero level on tree edge " + std::to_string(e) + " (sides " + fmt(side) +
                            " / " + fmt(total - side) + ")");
  }
  out.ok = out.reasons.empty();
  return out;
}

WMembership in_class_W(const reeb::ScalarFieldOnSphere& field, double eps_bisect) {
  return in_class_W(field, reeb::build_reeb_tree(field), eps_bisect);
}

QuasimorphismReport zeta_lower_bound(const reeb::ScalarFieldOnSphere& field) {
  return zeta_lower_bound(field, reeb::build_reeb_tree(field));
}

QuasimorphismReport zeta_lower_bound(const reeb::ScalarFieldOnSphere& field, const MeasuredTree& tree) {
  const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
  const double norm = *hi - *lo;
  if (!(norm > 0)) throw Error(ErrorCode::ZeroNorm, "constant field has zero C0 norm");
  const double mean = reeb::field_mean(field);
  if (std::abs(mean) > 1e-9 * norm)
    throw Error(ErrorCode::DomainError, "zeta bound needs a mean-zero field (mean " + fmt(mean) + ")");
  QuasimorphismReport rep = mu_autonomous(tree, Profile1D::identity());
  rep.c0_norm = norm;
  rep.zeta_lower = std::abs(rep.mu) / norm;
  return rep;
}

namespace {

void require_support(const Profile1D& H, double a, double b, const char* where) {
  if (!H.is_piecewise_linear()) return;
  bool ok = H(a) == 0.0 && H(b) == 0.0 && H.left_slope() == 0.0 && H.right_slope() == 0.0;
  for (std::size_t i = 0; i < H.breakpoints().size(); ++i) {
    const double x = H.breakpoints()[i];
    if ((x <= a || x >= b) && H.values()[i] != 0.0) ok = false;
  }
  if (!ok) throw Error(ErrorCode::DomainError, std::string("profile must be supported inside ") + where);
}

}  // namespace

double mu_epsilon_annulus(const Profile1D& H, double eps) {
  if (!(eps > 0.0 && eps < 0.1)) throw Error(ErrorCode::DomainError, "annulus eps must lie in (0, 0.1), got " + fmt(eps));
  require_support(H, 0.0, 0.1, "(0, 0.1)");
  return H.integrate(0.0, 0.1) - H(eps);
}

double mu_epsilon_disk(const Profile1D& H, double eps) {
  if (!(eps > 0.5 && eps < 1.0)) throw Error(ErrorCode::DomainError, "disk eps must lie in (1/2, 1), got " + fmt(eps));
  require_support(H, 0.0, 1.0, "(0, 1)");
  return H.integrate(0.0, 1.0) - H(1.0 / (2.0 * eps)) / eps;
}

IndependenceReport linear_independence(const std::vector<double>& eps_list, const std::vector<Profile1D>& profiles,
                                       FamilyVariant variant, double relative_tolerance) {
  if (eps_list.empty()) throw Error(ErrorCode::DomainError, "need at least one eps");
  if (std::set<double>(eps_list.begin(), eps_list.end()).size() != eps_list.size())
    throw Error(ErrorCode::DomainError, "eps values must be distinct");
  if (profiles.size() < eps_list.size()) throw Error(ErrorCode::DomainError, "need at least as many profiles as eps values");
  IndependenceReport rep;
  const auto k = static_cast<Eigen::Index>(eps_list.size());
  const auto m = static_cast<Eigen::Index>(profiles.size());
  Eigen::MatrixXd M(k, m);
  rep.matrix.assign(eps_list.size(), std::vector<double>(profiles.size()));
  for (std::size_t i = 0; i < eps_list.size(); ++i)
    for (std::size_t j = 0; j < profiles.size(); ++j) {
      const double v = variant == FamilyVariant::Annulus ? mu_epsilon_annulus(profiles[j], eps_list[i])
                                                         : mu_epsilon_disk(profiles[j], eps_list[i]);
      rep.matrix[i][j] = v;
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  const double top = s.size() > 0 ? s(0) : 0.0;
  rep.tolerance = relative_tolerance * top;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    rep.singular_values.push_back(s(i));
    if (s(i) > rep.tolerance) ++rep.rank;
  }
  return rep;
}

nlohmann::json to_json(const Median& m) {
  nlohmann::json j;
  if (m.point.kind == TreePoint::Kind::Vertex) {
    j["vertex"] = m.point.id;
  } else {
    j["edge"] = m.point.id;
  }
  j["offset"] = m.point.offset;
  j["level"] = m.level;
  j["component_measures"] = m.component_measures;
  return j;
}

nlohmann::json to_json(const WMembership& w) {
  return {{"ok", w.ok}, {"reasons", w.reasons}, {"notes", w.notes}};
}

nlohmann::json to_json(const QuasimorphismReport& r) {
  nlohmann::json j;
  j["mu"] = r.mu;
  j["integral_term"] = r.integral_term;
  j["median_term"] = r.median_term;
  j["median"] = to_json(r.median);
  j["c0_norm"] = r.c0_norm;
  j["zeta_lower"] = r.zeta_lower ? nlohmann::json(*r.zeta_lower) : nlohmann::json(nullptr);
  j["in_W"] = r.in_W ? to_json(*r.in_W) : nlohmann::json(nullptr);
  return j;
}

}  // namespace calabi
