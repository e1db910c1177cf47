#pragma once

// Exact arithmetic in the field k of Laurent-type series in s whose exponents
// are bounded above. Elements are stored as reduced rational functions
// num(s)/den(s) over the Gaussian rationals; expanding in descending powers
// of s recovers the series.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

namespace calabi::laurent {

using Rational = mpq_class;

Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

class Gaussian {
 public:
  Gaussian() = default;
  Gaussian(long re) : re_(re) {}  // NOLINT: integers embed implicitly
  Gaussian(Rational re) : re_(std::move(re)) {}  // NOLINT
  Gaussian(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  static Gaussian i() { return {Rational(0), Rational(1)}; }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  Gaussian conj() const { return {re_, -im_}; }
  Rational norm() const { return re_ * re_ + im_ * im_; }
  Gaussian inverse() const;

  Gaussian operator-() const { return {-re_, -im_}; }
  Gaussian& operator+=(const Gaussian& o);
  Gaussian& operator-=(const Gaussian& o);
  Gaussian& operator*=(const Gaussian& o);
  Gaussian& operator/=(const Gaussian& o);

  friend Gaussian operator+(Gaussian a, const Gaussian& b) { return a += b; }
  friend Gaussian operator-(Gaussian a, const Gaussian& b) { return a -= b; }
  friend Gaussian operator*(Gaussian a, const Gaussian& b) { return a *= b; }
  friend Gaussian operator/(Gaussian a, const Gaussian& b) { return a /= b; }
  friend bool operator==(const Gaussian& a, const Gaussian& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

std::string to_string(const Gaussian& z);

// Dense polynomial in s, coefficients in ascending order, no trailing zeros.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Gaussian> ascending);
  static Poly constant(const Gaussian& c);
  static Poly monomial(const Gaussian& c, int degree);

  // -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const Gaussian& lead() const { return coeffs_.back(); }
  Gaussian coeff(int power) const;
  const std::vector<Gaussian>& coeffs() const { return coeffs_; }

  // Lowest power with a non-zero coefficient; 0 for the zero polynomial.
  int low_degree() const;
  bool is_monomial() const { return !is_zero() && low_degree() == degree(); }

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const Gaussian& c) const;
  Poly shifted(int k) const;  // multiply by s^k, k >= 0
  Poly monic() const;

  friend bool operator==(const Poly& a, const Poly& b) = default;

  // a = q*b + r with deg r < deg b.
  static std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b);
  static Poly gcd(Poly a, Poly b);

 private:
  void trim();
  std::vector<Gaussian> coeffs_;
};

std::string to_string(const Poly& p);

// Top exponent of a Laurent expansion; NEG_INFINITY (empty) only for zero.
class Valuation {
 public:
  constexpr Valuation() = default;
  constexpr explicit Valuation(std::int64_t v) : value_(v) {}
  static constexpr Valuation neg_infinity() { return Valuation(); }

  constexpr bool is_neg_infinity() const { return !value_.has_value(); }
  constexpr std::int64_t value() const { return *value_; }

  friend constexpr bool operator==(const Valuation&, const Valuation&) = default;
  friend constexpr std::strong_ordering operator<=>(const Valuation& a, const Valuation& b) {
    if (a.is_neg_infinity() || b.is_neg_infinity())
      return b.is_neg_infinity() <=> a.is_neg_infinity();
    return *a.value_ <=> *b.value_;
  }
  // -inf absorbs.
  friend constexpr Valuation operator+(const Valuation& a, const Valuation& b) {
    if (a.is_neg_infinity() || b.is_neg_infinity()) return neg_infinity();
    return Valuation(*a.value_ + *b.value_);
  }

 private:
  std::optional<std::int64_t> value_;
};

std::string to_string(const Valuation& v);

struct ExpansionTerm {
  int exponent;
  Gaussian coeff;
  friend bool operator==(const ExpansionTerm&, const ExpansionTerm&) = default;
};

class FieldElement {
 public:
  FieldElement() : den_(Poly::constant(1)) {}
  FieldElement(long c) : FieldElement(Gaussian(c)) {}  // NOLINT
  FieldElement(const Gaussian& c);                      // NOLINT
  FieldElement(Poly num, Poly den);

  static FieldElement monomial(const Gaussian& c, int exponent);
  static FieldElement s() { return monomial(1, 1); }
  // Builds sum c_e s^e from (exponent, coefficient) pairs; exponents may be negative.
  static FieldElement from_laurent(const std::vector<ExpansionTerm>& terms);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_ == den_; }

  FieldElement operator-() const { return {-num_, den_}; }
  FieldElement& operator+=(const FieldElement& o);
  FieldElement& operator-=(const FieldElement& o);
  FieldElement& operator*=(const FieldElement& o);
  FieldElement& operator/=(const FieldElement& o);
  friend FieldElement operator+(FieldElement a, const FieldElement& b) { return a += b; }
  friend FieldElement operator-(FieldElement a, const FieldElement& b) { return a -= b; }
  friend FieldElement operator*(FieldElement a, const FieldElement& b) { return a *= b; }
  friend FieldElement operator/(FieldElement a, const FieldElement& b) { return a /= b; }
  // Reduced form with monic denominator is canonical, so equality is structural.
  friend bool operator==(const FieldElement& a, const FieldElement& b) = default;

  FieldElement inverse() const;
  Valuation valuation() const;

  // Coefficients of the descending expansion down to (and including) `floor`.
  std::vector<ExpansionTerm> truncated_expansion(int floor) const;

  // True when den is a power of s, i.e. the element is a finite Laurent sum.
  bool is_laurent_polynomial() const { return den_.is_monomial(); }
  // Only meaningful for Laurent polynomials; descending exponents.
  std::vector<ExpansionTerm> laurent_terms() const;
  // Coefficient of s^0 in the expansion (the tau map onto constants).
  Gaussian constant_term() const;

 private:
  void normalize();
  Poly num_;
  Poly den_;
};

FieldElement invert(const FieldElement& a);
Valuation valuation(const FieldElement& a);
std::vector<ExpansionTerm> truncated_expansion(const FieldElement& a, int floor);

// Human-readable form, e.g. "2s - 3 + s^-2" or "(s)/(s - 1)".
std::string to_string(const FieldElement& a);

// {"num": [[exp, "re", "im"], ...], "den": [[exp, "re", "im"], ...]}
nlohmann::json to_json(const FieldElement& a);
FieldElement field_element_from_json(const nlohmann::json& j);

}  // namespace calabi::laurent
