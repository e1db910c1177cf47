#pragma once

// Commutative Frobenius algebras over k presented by a table of structure
// constants: the even quantum homology of the example manifolds, plus any
// algebra loaded from a definition file.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "calabi/laurent.hpp"

namespace calabi::qh {

using laurent::FieldElement;
using laurent::Gaussian;
using laurent::Rational;
using laurent::Valuation;

struct BasisClass {
  std::string name;
  int degree = 0;  // homological degree, even
};

class AlgebraElement {
 public:
  AlgebraElement() = default;
  explicit AlgebraElement(std::size_t dim) : coords_(dim) {}
  explicit AlgebraElement(std::vector<FieldElement> coords) : coords_(std::move(coords)) {}

  std::size_t size() const { return coords_.size(); }
  const FieldElement& operator[](std::size_t i) const { return coords_[i]; }
  FieldElement& operator[](std::size_t i) { return coords_[i]; }
  const std::vector<FieldElement>& coords() const { return coords_; }

  bool is_zero() const;

  AlgebraElement operator-() const;
  AlgebraElement& operator+=(const AlgebraElement& o);
  AlgebraElement& operator-=(const AlgebraElement& o);
  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator*(const FieldElement& c, AlgebraElement a);
  friend bool operator==(const AlgebraElement&, const AlgebraElement&) = default;

 private:
  std::vector<FieldElement> coords_;
};

// Structure constants: products[i][j] holds the coordinates of e_i * e_j.
using ProductTable = std::vector<std::vector<AlgebraElement>>;
using IntersectionForm = std::vector<std::vector<Gaussian>>;

class FrobeniusAlgebra {
 public:
  FrobeniusAlgebra(std::string name, std::vector<BasisClass> basis, std::size_t unit_index,
                   ProductTable products, IntersectionForm intersection, int half_dimension,
                   int chern_number, Rational omega);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<BasisClass>& basis() const { return basis_; }
  std::size_t unit_index() const { return unit_; }
  const AlgebraElement& product(std::size_t i, std::size_t j) const { return products_[i][j]; }
  const Gaussian& intersection(std::size_t i, std::size_t j) const { return intersection_[i][j]; }
  int half_dimension() const { return n_; }
  int chern_number() const { return chern_; }
  const Rational& omega() const { return omega_; }

  FrobeniusAlgebra with_omega(Rational omega) const;

  std::optional<std::size_t> index_of(std::string_view class_name) const;
  AlgebraElement basis_element(std::size_t i) const;
  AlgebraElement unit() const { return basis_element(unit_); }
  // Basis element by name; throws UnknownName.
  AlgebraElement element(std::string_view class_name) const;
  AlgebraElement scalar(const FieldElement& c) const;

 private:
  std::string name_;
  std::vector<BasisClass> basis_;
  std::size_t unit_;
  ProductTable products_;
  IntersectionForm intersection_;
  int n_;
  int chern_;
  Rational omega_;
};

AlgebraElement quantum_mul(const FrobeniusAlgebra& alg, const AlgebraElement& a,
                           const AlgebraElement& b);
AlgebraElement power(const FrobeniusAlgebra& alg, const AlgebraElement& a, unsigned exponent);

FieldElement pairing_delta(const FrobeniusAlgebra& alg, const AlgebraElement& a,
                           const AlgebraElement& b);
// s^0 coefficient of pairing_delta.
Gaussian pairing_pi(const FrobeniusAlgebra& alg, const AlgebraElement& a, const AlgebraElement& b);

AlgebraElement euler_class(const FrobeniusAlgebra& alg);
// Same class computed from an arbitrary k-basis; used to confirm basis independence.
AlgebraElement euler_class(const FrobeniusAlgebra& alg, std::span<const AlgebraElement> basis);

// Multiplicative inverse, verified by back-multiplication; nullopt for
// zero divisors and non-units.
std::optional<AlgebraElement> invert_element(const FrobeniusAlgebra& alg, const AlgebraElement& a);

struct SemisimplicityVerdict {
  bool semisimple = false;
  AlgebraElement euler_class;
  std::optional<AlgebraElement> euler_inverse;
  std::string witness;
};

SemisimplicityVerdict is_semisimple(const FrobeniusAlgebra& alg);

// Coordinate-wise top exponent.
Valuation nu(const AlgebraElement& a);

// Omega * nu(a); nullopt stands for NEG_INFINITY (a = 0).
std::optional<Rational> spectral_invariant_identity(const FrobeniusAlgebra& alg,
                                                     const AlgebraElement& a);

struct CharacteristicExponentReport {
  std::size_t pairs = 0;
  std::size_t zero_axiom_checks = 0;
  std::size_t scalar_axiom_checks = 0;
  std::size_t max_axiom_checks = 0;
  std::size_t strict_checks = 0;  // pairs with nu(v1) != nu(v2)
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

CharacteristicExponentReport characteristic_exponent_check(const FrobeniusAlgebra& alg,
                                                           std::size_t samples,
                                                           std::uint64_t seed);

struct ValuationBoundReport {
  std::size_t drawn = 0;
  std::size_t invertible = 0;
  std::optional<std::int64_t> supremum;
  // Running supremum after each invertible sample.
  std::vector<std::int64_t> history;
  // The running supremum did not move over the second half of the samples.
  bool stabilized() const;
};

ValuationBoundReport valuation_sum_bound(const FrobeniusAlgebra& alg, std::size_t sample_count,
                                         std::uint64_t seed);

// "S2", "CPn" (with n), "CP<n>", "S2xS2", "CP2blowup"; also "nilpotent" for
// the undeformed cap-product algebra on {[M], P}.
FrobeniusAlgebra builtin_algebra(std::string_view name, int n = 0);

// N such that every structure-constant term c s^e e_l of e_i * e_j satisfies
// deg e_l + 2N e = deg e_i + deg e_j - 2n. nullopt if no positive N fits.
std::optional<int> infer_chern_number(const FrobeniusAlgebra& alg);

struct InvariantCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

// Commutativity, associativity, unit, grading, non-degeneracy and the
// Frobenius identity, all over basis elements (exhaustive, exact).
std::vector<InvariantCheck> check_invariants(const FrobeniusAlgebra& alg);

// Random sampling used by the property checks: coordinates are Laurent
// polynomials with exponents in [-3, 3] and small Gaussian-integer coefficients.
FieldElement random_field_element(std::mt19937_64& rng, double density = 0.5);
AlgebraElement random_element(const FrobeniusAlgebra& alg, std::mt19937_64& rng,
                              double density = 0.5);

// Dense linear algebra over k.
using Matrix = std::vector<std::vector<FieldElement>>;
std::optional<std::vector<FieldElement>> solve(Matrix a, std::vector<FieldElement> rhs);
std::optional<Matrix> inverse(const Matrix& a);

}  // namespace calabi::qh
