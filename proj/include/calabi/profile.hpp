#pragma once

// Real functions of one variable: the w in H = w o F, and the H(p) profiles
// of the annulus / disk families.

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace calabi {

class Profile1D {
 public:
  // Piecewise linear through (breakpoints[i], values[i]); outside the
  // breakpoint range it continues with the given slopes.
  static Profile1D piecewise_linear(std::vector<double> breakpoints, std::vector<double> values,
                                    double left_slope = 0.0, double right_slope = 0.0);
  static Profile1D constant(double c);
  static Profile1D identity();
  // a*x + b
  static Profile1D affine(double a, double b);
  // Tent of height `peak` on [center - half_width, center + half_width].
  static Profile1D triangle_bump(double center, double half_width, double peak = 1.0);
  static Profile1D callable(std::function<double(double)> f, std::string label);

  // The zero function.
  Profile1D() = default;

  double operator()(double x) const;

  bool is_piecewise_linear() const { return !fn_; }
  // For callables: known kinks inherited from piecewise-linear summands.
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }
  double left_slope() const { return left_slope_; }
  double right_slope() const { return right_slope_; }
  const std::string& label() const { return label_; }

  // Integral over [lo, hi] of w(x) * (d0 + d1 * (x - lo)). Exact for
  // piecewise-linear profiles; Gauss-Legendre on 64 panels for callables.
  double integrate_linear_weight(double lo, double hi, double d0, double d1) const;
  double integrate(double lo, double hi) const { return integrate_linear_weight(lo, hi, 1.0, 0.0); }

  // Extremes over [lo, hi]; exact for piecewise-linear profiles, sampled otherwise.
  double max_on(double lo, double hi) const;
  double min_on(double lo, double hi) const;

  friend Profile1D operator+(const Profile1D& a, const Profile1D& b);
  friend Profile1D operator*(double c, const Profile1D& a);
  friend Profile1D operator-(const Profile1D& a) { return -1.0 * a; }
  friend Profile1D operator-(const Profile1D& a, const Profile1D& b) { return a + (-b); }

 private:
  std::vector<double> breaks_{0.0};
  std::vector<double> values_{0.0};
  double left_slope_ = 0.0;
  double right_slope_ = 0.0;
  std::function<double(double)> fn_;
  std::string label_ = "constant";
};

// Accepted forms: "identity", {"constant": c}, {"affine": [a, b]},
// {"bump": [center, half_width, peak]},
// {"breakpoints": [...], "values": [...], "slopes": [left, right]}.
Profile1D profile_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Profile1D& p);

}  // namespace calabi
