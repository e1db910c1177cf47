#include "calabi/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "calabi/error.hpp"

namespace calabi {

Profile1D Profile1D::piecewise_linear(std::vector<double> breakpoints, std::vector<double> values,
                                      double left_slope, double right_slope) {
  if (breakpoints.empty() || breakpoints.size() != values.size())
    throw Error(ErrorCode::ParseError, "profile needs matching, non-empty breakpoints and values");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i]) || !std::isfinite(values[i]))
      throw Error(ErrorCode::ParseError, "profile entries must be finite");
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))
      throw Error(ErrorCode::ParseError, "profile breakpoints must be strictly increasing");
  }
  Profile1D p;
  p.breaks_ = std::move(breakpoints);
  p.values_ = std::move(values);
  p.left_slope_ = left_slope;
  p.right_slope_ = right_slope;
  p.fn_ = nullptr;
  p.label_ = "piecewise-linear";
  return p;
}

Profile1D Profile1D::constant(double c) {
  Profile1D p;
  p.breaks_ = {0.0};
  p.values_ = {c};
  p.label_ = "constant";
  return p;
}

Profile1D Profile1D::identity() { return affine(1.0, 0.0); }

Profile1D Profile1D::affine(double a, double b) {
  Profile1D p = constant(b);
  p.left_slope_ = p.right_slope_ = a;
  p.label_ = "affine";
  return p;
}

Profile1D Profile1D::triangle_bump(double center, double half_width, double peak) {
  if (!(half_width > 0)) throw Error(ErrorCode::DomainError, "bump half-width must be positive");
  return piecewise_linear({center - half_width, center, center + half_width}, {0.0, peak, 0.0});
}

Profile1D Profile1D::callable(std::function<double(double)> f, std::string label) {
  Profile1D p;
  p.breaks_.clear();
  p.values_.clear();
  p.fn_ = std::move(f);
  p.label_ = std::move(label);
  return p;
}

double Profile1D::operator()(double x) const {
  if (fn_) return fn_(x);
  if (x <= breaks_.front()) return values_.front() + left_slope_ * (x - breaks_.front());
  if (x >= breaks_.back()) return values_.back() + right_slope_ * (x - breaks_.back());
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - breaks_.begin());
  const double x0 = breaks_[j - 1], x1 = breaks_[j];
  const double t = (x - x0) / (x1 - x0);
  return values_[j - 1] + t * (values_[j] - values_[j - 1]);
}

namespace {

// 5-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 5> kGaussX = {0.04691007703066800, 0.23076534494715845, 0.5,
                                           0.76923465505284155, 0.95308992296933200};
constexpr std::array<double, 5> kGaussW = {0.11846344252809454, 0.23931433524968324,
                                           0.28444444444444444, 0.23931433524968324,
                                           0.11846344252809454};

}  // namespace

double Profile1D::integrate_linear_weight(double lo, double hi, double d0, double d1) const {
  if (!(hi > lo)) return 0.0;
  auto weight = [&](double x) { return d0 + d1 * (x - lo); };
  double total = 0.0;
  if (fn_) {
    // Panels restart at every known kink so each panel sees a smooth integrand.
    std::vector<double> cuts{lo};
    for (double b : breaks_)
      if (b > lo && b < hi) cuts.push_back(b);
    cuts.push_back(hi);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const int panels = std::max(4, static_cast<int>(std::ceil(64.0 * (cuts[c + 1] - cuts[c]) / (hi - lo))));
      const double h = (cuts[c + 1] - cuts[c]) / panels;
      for (int k = 0; k < panels; ++k) {
        const double a = cuts[c] + k * h;
        for (std::size_t g = 0; g < kGaussX.size(); ++g) {
          const double x = a + kGaussX[g] * h;
          total += kGaussW[g] * h * fn_(x) * weight(x);
        }
      }
    }
    return total;
  }
  // Simpson is exact for (linear) * (linear) on each piece.
  std::vector<double> cuts{lo};
  for (double b : breaks_)
    if (b > lo && b < hi) cuts.push_back(b);
  cuts.push_back(hi);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1], m = 0.5 * (a + b);
    total += (b - a) / 6.0 *
             ((*this)(a) * weight(a) + 4.0 * (*this)(m) * weight(m) + (*this)(b) * weight(b));
  }
  return total;
}

namespace {

template <class Pick>
double extreme_on(const Profile1D& p, double lo, double hi, Pick pick) {
  double best = pick(p(lo), p(hi));
  if (p.is_piecewise_linear()) {
    for (double b : p.breakpoints())
      if (b > lo && b < hi) best = pick(best, p(b));
    return best;
  }
  for (double b : p.breakpoints())
    if (b > lo && b < hi) best = pick(best, p(b));
  constexpr int kSamples = 4096;
  for (int k = 1; k < kSamples; ++k) best = pick(best, p(lo + (hi - lo) * k / kSamples));
  return best;
}

}  // namespace

double Profile1D::max_on(double lo, double hi) const {
  return extreme_on(*this, lo, hi, [](double a, double b) { return std::max(a, b); });
}

double Profile1D::min_on(double lo, double hi) const {
  return extreme_on(*this, lo, hi, [](double a, double b) { return std::min(a, b); });
}

Profile1D operator+(const Profile1D& a, const Profile1D& b) {
  if (a.is_piecewise_linear() && b.is_piecewise_linear()) {
    std::vector<double> xs = a.breaks_;
    xs.insert(xs.end(), b.breaks_.begin(), b.breaks_.end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = a(xs[i]) + b(xs[i]);
    return Profile1D::piecewise_linear(std::move(xs), std::move(ys), a.left_slope_ + b.left_slope_,
                                       a.right_slope_ + b.right_slope_);
  }
  Profile1D sum = Profile1D::callable([a, b](double x) { return a(x) + b(x); },
                                      "(" + a.label_ + " + " + b.label_ + ")");
  sum.breaks_ = a.breaks_;
  sum.breaks_.insert(sum.breaks_.end(), b.breaks_.begin(), b.breaks_.end());
  std::sort(sum.breaks_.begin(), sum.breaks_.end());
  sum.breaks_.erase(std::unique(sum.breaks_.begin(), sum.breaks_.end()), sum.breaks_.end());
  return sum;
}

Profile1D operator*(double c, const Profile1D& a) {
  if (a.is_piecewise_linear()) {
    Profile1D r = a;
    for (double& v : r.values_) v *= c;
    r.left_slope_ *= c;
    r.right_slope_ *= c;
    return r;
  }
  Profile1D r = Profile1D::callable([c, a](double x) { return c * a(x); }, "scaled " + a.label_);
  r.breaks_ = a.breaks_;
  return r;
}

Profile1D profile_from_json(const nlohmann::json& j) {
  try {
    if (j.is_string()) {
      if (j.get<std::string>() == "identity") return Profile1D::identity();
      throw Error(ErrorCode::ParseError, "unknown profile name: " + j.get<std::string>());
    }
    if (j.is_number()) return Profile1D::constant(j.get<double>());
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "profile must be a string, number or object");
    if (j.contains("constant")) return Profile1D::constant(j.at("constant").get<double>());
    if (j.contains("affine")) {
      const auto& ab = j.at("affine");
      if (!ab.is_array() || ab.size() != 2) throw Error(ErrorCode::ParseError, "affine needs [a, b]");
      return Profile1D::affine(ab[0].get<double>(), ab[1].get<double>());
    }
    if (j.contains("bump")) {
      const auto& b = j.at("bump");
      if (!b.is_array() || b.size() < 2 || b.size() > 3)
        throw Error(ErrorCode::ParseError, "bump needs [center, half_width, peak?]");
      return Profile1D::triangle_bump(b[0].get<double>(), b[1].get<double>(),
                                      b.size() == 3 ? b[2].get<double>() : 1.0);
    }
    if (j.contains("breakpoints")) {
      double left = 0.0, right = 0.0;
      if (j.contains("slopes")) {
        const auto& s = j.at("slopes");
        if (!s.is_array() || s.size() != 2) throw Error(ErrorCode::ParseError, "slopes needs [left, right]");
        left = s[0].get<double>();
        right = s[1].get<double>();
      }
      return Profile1D::piecewise_linear(j.at("breakpoints").get<std::vector<double>>(),
                                         j.at("values").get<std::vector<double>>(), left, right);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad profile: ") + e.what());
  }
  throw Error(ErrorCode::ParseError, "unrecognised profile object");
}

nlohmann::json to_json(const Profile1D& p) {
  if (!p.is_piecewise_linear()) return {{"callable", p.label()}};
  return {{"breakpoints", p.breakpoints()},
          {"values", p.values()},
          {"slopes", {p.left_slope(), p.right_slope()}}};
}

}  // namespace calabi
