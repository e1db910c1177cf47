#include "calabi/qh_algebra.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "calabi/error.hpp"
#include "calabi/qh_io.hpp"

namespace calabi::qh {

// ---------------------------------------------------------- AlgebraElement

bool AlgebraElement::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](const FieldElement& c) { return c.is_zero(); });
}

AlgebraElement AlgebraElement::operator-() const {
  AlgebraElement r = *this;
  for (auto& c : r.coords_) c = -c;
  return r;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
  if (o.size() != size()) throw Error(ErrorCode::DimensionMismatch, "adding elements of different algebras");
  for (std::size_t i = 0; i < size(); ++i) coords_[i] += o.coords_[i];
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& o) {
  if (o.size() != size()) throw Error(ErrorCode::DimensionMismatch, "subtracting elements of different algebras");
  for (std::size_t i = 0; i < size(); ++i) coords_[i] -= o.coords_[i];
  return *this;
}

AlgebraElement operator*(const FieldElement& c, AlgebraElement a) {
  for (auto& x : a.coords_) x *= c;
  return a;
}

// -------------------------------------------------------- FrobeniusAlgebra

FrobeniusAlgebra::FrobeniusAlgebra(std::string name, std::vector<BasisClass> basis,
                                   std::size_t unit_index, ProductTable products,
                                   IntersectionForm intersection, int half_dimension,
                                   int chern_number, Rational omega)
    : name_(std::move(name)),
      basis_(std::move(basis)),
      unit_(unit_index),
      products_(std::move(products)),
      intersection_(std::move(intersection)),
      n_(half_dimension),
      chern_(chern_number),
      omega_(std::move(omega)) {
  const std::size_t d = basis_.size();
  if (d == 0) throw Error(ErrorCode::DimensionMismatch, "algebra needs a non-empty basis");
  if (unit_ >= d) throw Error(ErrorCode::DimensionMismatch, "unit index out of range");
  if (products_.size() != d || intersection_.size() != d)
    throw Error(ErrorCode::DimensionMismatch, "table size does not match basis");
  for (std::size_t i = 0; i < d; ++i) {
    if (products_[i].size() != d || intersection_[i].size() != d)
      throw Error(ErrorCode::DimensionMismatch, "table row size does not match basis");
    for (const auto& p : products_[i])
      if (p.size() != d) throw Error(ErrorCode::DimensionMismatch, "product vector size does not match basis");
  }
  if (sgn(omega_) <= 0) throw Error(ErrorCode::DomainError, "Omega must be positive");
}

FrobeniusAlgebra FrobeniusAlgebra::with_omega(Rational omega) const {
  FrobeniusAlgebra copy = *this;
  if (sgn(omega) <= 0) throw Error(ErrorCode::DomainError, "Omega must be positive");
  copy.omega_ = std::move(omega);
  return copy;
}

std::optional<std::size_t> FrobeniusAlgebra::index_of(std::string_view class_name) const {
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (basis_[i].name == class_name) return i;
  return std::nullopt;
}

AlgebraElement FrobeniusAlgebra::basis_element(std::size_t i) const {
  AlgebraElement e(dim());
  e[i] = FieldElement(1);
  return e;
}

AlgebraElement FrobeniusAlgebra::element(std::string_view class_name) const {
  auto idx = index_of(class_name);
  if (!idx) throw Error(ErrorCode::UnknownName, "no basis class named " + std::string(class_name));
  return basis_element(*idx);
}

AlgebraElement FrobeniusAlgebra::scalar(const FieldElement& c) const {
  AlgebraElement e(dim());
  e[unit_] = c;
  return e;
}

// -------------------------------------------------------------- operations

AlgebraElement quantum_mul(const FrobeniusAlgebra& alg, const AlgebraElement& a,
                           const AlgebraElement& b) {
  const std::size_t d = alg.dim();
  if (a.size() != d || b.size() != d)
    throw Error(ErrorCode::DimensionMismatch, "element size does not match algebra dimension");
  AlgebraElement out(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < d; ++j) {
      if (b[j].is_zero()) continue;
      const FieldElement ab = a[i] * b[j];
      const AlgebraElement& eij = alg.product(i, j);
      for (std::size_t l = 0; l < d; ++l)
        if (!eij[l].is_zero()) out[l] += ab * eij[l];
    }
  }
  return out;
}

AlgebraElement power(const FrobeniusAlgebra& alg, const AlgebraElement& a, unsigned exponent) {
  AlgebraElement out = alg.unit();
  for (unsigned k = 0; k < exponent; ++k) out = quantum_mul(alg, out, a);
  return out;
}

FieldElement pairing_delta(const FrobeniusAlgebra& alg, const AlgebraElement& a,
                           const AlgebraElement& b) {
  const std::size_t d = alg.dim();
  if (a.size() != d || b.size() != d)
    throw Error(ErrorCode::DimensionMismatch, "element size does not match algebra dimension");
  FieldElement out;
  for (std::size_t i = 0; i < d; ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < d; ++j) {
      const Gaussian& g = alg.intersection(i, j);
      if (g.is_zero() || b[j].is_zero()) continue;
      out += a[i] * b[j] * FieldElement(g);
    }
  }
  return out;
}

Gaussian pairing_pi(const FrobeniusAlgebra& alg, const AlgebraElement& a, const AlgebraElement& b) {
  return pairing_delta(alg, a, b).constant_term();
}

namespace {

using laurent::Poly;
using PolyMatrix = std::vector<std::vector<Poly>>;

// Fraction-free (Bareiss) determinant over Q(i)[s]; every division is exact.
Poly bareiss_det(PolyMatrix m) {
  const std::size_t n = m.size();
  if (n == 0) return Poly::constant(1);
  bool negate = false;
  Poly prev = Poly::constant(1);
  for (std::size_t k = 0; k < n; ++k) {
    std::optional<std::size_t> pivot;
    for (std::size_t r = k; r < n; ++r) {
      if (m[r][k].is_zero()) continue;
      if (!pivot || m[r][k].degree() < m[*pivot][k].degree()) pivot = r;
    }
    if (!pivot) return {};
    if (*pivot != k) {
      std::swap(m[k], m[*pivot]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Poly t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        m[i][j] = Poly::divmod(t, prev).first;
      }
      m[i][k] = Poly{};
    }
    prev = m[k][k];
  }
  return negate ? -m[n - 1][n - 1] : m[n - 1][n - 1];
}

Poly lcm(const Poly& a, const Poly& b) {
  if (a.is_monomial() && b.is_monomial()) return Poly::monomial(1, std::max(a.degree(), b.degree()));
  return Poly::divmod(a * b, Poly::gcd(a, b)).first.monic();
}

// Column k of the solution is num[k][i] / det, not reduced.
struct CramerSolution {
  std::vector<std::vector<Poly>> num;
  Poly det;
};

std::optional<CramerSolution> cramer(const Matrix& a, const std::vector<std::vector<FieldElement>>& rhs) {
  const std::size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n) throw Error(ErrorCode::DimensionMismatch, "matrix must be square");
  for (const auto& col : rhs)
    if (col.size() != n) throw Error(ErrorCode::DimensionMismatch, "rhs size mismatch");

  // Clear denominators row by row, then fraction-free determinants.
  PolyMatrix m(n, std::vector<Poly>(n));
  std::vector<std::vector<Poly>> b(rhs.size(), std::vector<Poly>(n));
  for (std::size_t r = 0; r < n; ++r) {
    Poly l = Poly::constant(1);
    for (const auto& x : a[r]) l = lcm(l, x.den());
    for (const auto& col : rhs) l = lcm(l, col[r].den());
    for (std::size_t c = 0; c < n; ++c)
      m[r][c] = a[r][c].num() * Poly::divmod(l, a[r][c].den()).first;
    for (std::size_t k = 0; k < rhs.size(); ++k)
      b[k][r] = rhs[k][r].num() * Poly::divmod(l, rhs[k][r].den()).first;
  }
  CramerSolution out;
  out.det = bareiss_det(m);
  if (out.det.is_zero()) return std::nullopt;
  out.num.assign(rhs.size(), std::vector<Poly>(n));
  for (std::size_t k = 0; k < rhs.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      PolyMatrix mi = m;
      for (std::size_t r = 0; r < n; ++r) mi[r][i] = b[k][r];
      out.num[k][i] = bareiss_det(std::move(mi));
    }
  }
  return out;
}

std::vector<std::vector<FieldElement>> identity_columns(std::size_t n) {
  std::vector<std::vector<FieldElement>> cols(n, std::vector<FieldElement>(n));
  for (std::size_t k = 0; k < n; ++k) cols[k][k] = FieldElement(1);
  return cols;
}

FieldElement poly_element(const Poly& p) { return FieldElement(p, Poly::constant(1)); }

}  // namespace

std::optional<std::vector<FieldElement>> solve(Matrix a, std::vector<FieldElement> rhs) {
  if (rhs.size() != a.size()) throw Error(ErrorCode::DimensionMismatch, "rhs size mismatch");
  auto sol = cramer(a, {rhs});
  if (!sol) return std::nullopt;
  std::vector<FieldElement> x(rhs.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = FieldElement(sol->num[0][i], sol->det);
  return x;
}

std::optional<Matrix> inverse(const Matrix& a) {
  const std::size_t n = a.size();
  auto sol = cramer(a, identity_columns(n));
  if (!sol) return std::nullopt;
  Matrix inv(n, std::vector<FieldElement>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) inv[i][j] = FieldElement(sol->num[j][i], sol->det);
  return inv;
}

AlgebraElement euler_class(const FrobeniusAlgebra& alg, std::span<const AlgebraElement> basis) {
  const std::size_t d = alg.dim();
  if (basis.size() != d) throw Error(ErrorCode::DimensionMismatch, "basis must have dim elements");
  Matrix gram(d, std::vector<FieldElement>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) gram[i][j] = pairing_delta(alg, basis[i], basis[j]);
  // G^-1 = num / det with num[i][j] the (j, i) entry.
  auto ginv = cramer(gram, identity_columns(d));
  if (!ginv) throw Error(ErrorCode::DegeneratePairing, "Gram matrix of Delta is singular over k");

  // Dual basis: e_i^# = sum_j (G^-1)_{ji} e_j, so that Delta(e_k, e_i^#) = delta_ki.
  // Accumulate det * E first, then divide once.
  AlgebraElement scaled(d);
  for (std::size_t i = 0; i < d; ++i) {
    AlgebraElement dual(d);
    for (std::size_t j = 0; j < d; ++j)
      if (!ginv->num[i][j].is_zero()) dual += poly_element(ginv->num[i][j]) * basis[j];
    scaled += quantum_mul(alg, basis[i], dual);
  }
  const FieldElement det_inv = poly_element(ginv->det).inverse();
  return det_inv * scaled;
}

AlgebraElement euler_class(const FrobeniusAlgebra& alg) {
  std::vector<AlgebraElement> basis;
  for (std::size_t i = 0; i < alg.dim(); ++i) basis.push_back(alg.basis_element(i));
  return euler_class(alg, basis);
}

namespace {

// Unreduced inverse num[i] / det, already checked by back-multiplication.
std::optional<CramerSolution> verified_inverse(const FrobeniusAlgebra& alg, const AlgebraElement& a) {
  const std::size_t d = alg.dim();
  if (a.size() != d) throw Error(ErrorCode::DimensionMismatch, "element size does not match algebra dimension");
  if (a.is_zero()) return std::nullopt;
  // Column j of the regular representation is a * e_j.
  Matrix mult(d, std::vector<FieldElement>(d));
  for (std::size_t j = 0; j < d; ++j) {
    AlgebraElement col = quantum_mul(alg, a, alg.basis_element(j));
    for (std::size_t i = 0; i < d; ++i) mult[i][j] = col[i];
  }
  std::vector<FieldElement> rhs(d);
  rhs[alg.unit_index()] = FieldElement(1);
  auto sol = cramer(mult, {rhs});
  if (!sol) return std::nullopt;
  // a * num == det * [M] is checked before dividing, so no gcds are needed here.
  AlgebraElement scaled(d);
  for (std::size_t i = 0; i < d; ++i) scaled[i] = poly_element(sol->num[0][i]);
  const FieldElement det = poly_element(sol->det);
  if (quantum_mul(alg, a, scaled) != det * alg.unit()) return std::nullopt;
  return sol;
}

}  // namespace

std::optional<AlgebraElement> invert_element(const FrobeniusAlgebra& alg, const AlgebraElement& a) {
  auto sol = verified_inverse(alg, a);
  if (!sol) return std::nullopt;
  AlgebraElement out(alg.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = FieldElement(sol->num[0][i], sol->det);
  return out;
}

SemisimplicityVerdict is_semisimple(const FrobeniusAlgebra& alg) {
  SemisimplicityVerdict v;
  v.euler_class = euler_class(alg);
  v.euler_inverse = invert_element(alg, v.euler_class);
  v.semisimple = v.euler_inverse.has_value();
  const std::string e = to_string(alg, v.euler_class);
  if (v.semisimple) {
    v.witness = "E = " + e + "; E^-1 = " + to_string(alg, *v.euler_inverse) + "; E * E^-1 = [M]";
  } else {
    v.witness = "E = " + e + " is not invertible: multiplication by E is singular";
  }
  return v;
}

Valuation nu(const AlgebraElement& a) {
  Valuation best = Valuation::neg_infinity();
  for (const auto& c : a.coords()) best = std::max(best, c.valuation());
  return best;
}

std::optional<Rational> spectral_invariant_identity(const FrobeniusAlgebra& alg,
                                                     const AlgebraElement& a) {
  if (a.size() != alg.dim()) throw Error(ErrorCode::DimensionMismatch, "element size does not match algebra dimension");
  const Valuation v = nu(a);
  if (v.is_neg_infinity()) return std::nullopt;
  return alg.omega() * Rational(static_cast<long>(v.value()));
}

// ----------------------------------------------------------------- sampling

FieldElement random_field_element(std::mt19937_64& rng, double density) {
  std::bernoulli_distribution keep(density);
  std::uniform_int_distribution<long> coef(-4, 4);
  std::uniform_int_distribution<long> den(1, 3);
  std::bernoulli_distribution complex(0.2);
  std::vector<laurent::ExpansionTerm> terms;
  for (int e = -3; e <= 3; ++e) {
    if (!keep(rng)) continue;
    Rational re(coef(rng), den(rng));
    re.canonicalize();
    Rational im = complex(rng) ? Rational(coef(rng)) : Rational(0);
    Gaussian c(re, im);
    if (!c.is_zero()) terms.push_back({e, c});
  }
  return FieldElement::from_laurent(terms);
}

AlgebraElement random_element(const FrobeniusAlgebra& alg, std::mt19937_64& rng, double density) {
  AlgebraElement a(alg.dim());
  for (std::size_t i = 0; i < alg.dim(); ++i) a[i] = random_field_element(rng, density);
  return a;
}

// ------------------------------------------------------- property reports

CharacteristicExponentReport characteristic_exponent_check(const FrobeniusAlgebra& alg,
                                                           std::size_t samples,
                                                           std::uint64_t seed) {
  CharacteristicExponentReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> small(-5, 5);
  std::uniform_int_distribution<int> shift(-3, 3);
  std::uniform_int_distribution<int> mode(0, 3);

  auto fail = [&](const std::string& what, const AlgebraElement& v1, const AlgebraElement& v2) {
    rep.violations.push_back(what + " for v1 = " + to_string(alg, v1) + ", v2 = " + to_string(alg, v2));
  };

  for (std::size_t k = 0; k < samples; ++k) {
    AlgebraElement v1 = random_element(alg, rng);
    AlgebraElement v2 = random_element(alg, rng);
    switch (mode(rng)) {
      case 0:  // cancellation: v2 = -v1 + (lower order noise)
        v2 = -v1 + FieldElement::monomial(1, -4) * v2;
        break;
      case 1: {  // force distinct valuations
        int k = shift(rng);
        if (k == 0) k = 1;
        v2 = FieldElement::monomial(1, k) * v1 + v2;
        break;
      }
      default:
        break;
    }
    ++rep.pairs;

    const Valuation n1 = nu(v1);
    const Valuation n2 = nu(v2);
    const Valuation n12 = nu(v1 + v2);

    ++rep.zero_axiom_checks;
    if (!nu(v1 - v1).is_neg_infinity()) fail("nu(0) != -inf", v1, v1);
    if (!v1.is_zero() && n1.is_neg_infinity()) fail("nu(v) = -inf for non-zero v", v1, v2);

    Gaussian delta(Rational(small(rng)), Rational(small(rng)));
    if (delta.is_zero()) delta = Gaussian(1);
    ++rep.scalar_axiom_checks;
    if (nu(FieldElement(delta) * v1) != n1) fail("nu(delta v) != nu(v)", v1, v2);

    ++rep.max_axiom_checks;
    if (n12 > std::max(n1, n2)) fail("nu(v1+v2) > max(nu(v1), nu(v2))", v1, v2);

    if (n1 != n2) {
      ++rep.strict_checks;
      if (n12 != std::max(n1, n2)) fail("nu(v1) != nu(v2) but nu(v1+v2) != max", v1, v2);
    }
  }
  return rep;
}

bool ValuationBoundReport::stabilized() const {
  if (history.size() < 2) return false;
  return history[history.size() / 2] == history.back();
}

ValuationBoundReport valuation_sum_bound(const FrobeniusAlgebra& alg, std::size_t sample_count,
                                         std::uint64_t seed) {
  ValuationBoundReport rep;
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < sample_count; ++k) {
    AlgebraElement b = random_element(alg, rng);
    ++rep.drawn;
    if (b.is_zero()) continue;
    auto inv = verified_inverse(alg, b);
    if (!inv) continue;
    ++rep.invertible;
    // deg num - deg den is the valuation whether or not the fraction is reduced.
    int top = std::numeric_limits<int>::min();
    for (const auto& p : inv->num[0])
      if (!p.is_zero()) top = std::max(top, p.degree());
    const std::int64_t v = nu(b).value() + top - inv->det.degree();
    rep.supremum = rep.supremum ? std::max(*rep.supremum, v) : v;
    rep.history.push_back(*rep.supremum);
  }
  return rep;
}

// ---------------------------------------------------------------- builtins

namespace {

struct TableBuilder {
  std::size_t dim;
  std::size_t unit;
  ProductTable table;
  std::vector<std::vector<bool>> set;

  TableBuilder(std::size_t d, std::size_t u)
      : dim(d), unit(u), table(d, std::vector<AlgebraElement>(d, AlgebraElement(d))),
        set(d, std::vector<bool>(d, false)) {
    for (std::size_t i = 0; i < d; ++i) {
      AlgebraElement e(d);
      e[i] = FieldElement(1);
      put(unit, i, e);
    }
  }

  void put(std::size_t i, std::size_t j, const AlgebraElement& v) {
    table[i][j] = v;
    table[j][i] = v;
    set[i][j] = set[j][i] = true;
  }

  // Terms are (basis index, coefficient, exponent of s).
  void put(std::size_t i, std::size_t j,
           std::initializer_list<std::tuple<std::size_t, long, int>> terms) {
    AlgebraElement v(dim);
    for (auto [l, c, e] : terms) v[l] += FieldElement::monomial(c, e);
    put(i, j, v);
  }
};

IntersectionForm zero_form(std::size_t d) { return IntersectionForm(d, std::vector<Gaussian>(d)); }

void pair_up(IntersectionForm& g, std::size_t i, std::size_t j, long value) {
  g[i][j] = Gaussian(value);
  g[j][i] = Gaussian(value);
}

FrobeniusAlgebra make_s2() {
  // Basis {[M], P}; P * P = s^-1.
  TableBuilder t(2, 0);
  t.put(1, 1, {{0, 1, -1}});
  auto g = zero_form(2);
  pair_up(g, 0, 1, 1);
  return {"S2", {{"[M]", 2}, {"P", 0}}, 0, t.table, g, 1, 2, Rational(1)};
}

FrobeniusAlgebra make_cpn(int n) {
  if (n < 1) throw Error(ErrorCode::DomainError, "CPn requires n >= 1");
  // Basis A^0 = [M], A, A^2, ..., A^n = P, with A^(n+1) = s^-1.
  const auto d = static_cast<std::size_t>(n + 1);
  TableBuilder t(d, 0);
  for (std::size_t i = 1; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      const std::size_t k = i + j;
      if (k <= static_cast<std::size_t>(n)) {
        t.put(i, j, {{k, 1, 0}});
      } else {
        t.put(i, j, {{k - d, 1, -1}});
      }
    }
  }
  std::vector<BasisClass> basis;
  for (int k = 0; k <= n; ++k) {
    std::string name = k == 0 ? "[M]" : (k == 1 ? "A" : "A^" + std::to_string(k));
    basis.push_back({name, 2 * n - 2 * k});
  }
  auto g = zero_form(d);
  for (std::size_t i = 0; i < d; ++i) g[i][d - 1 - i] = Gaussian(1);
  return {"CP" + std::to_string(n), basis, 0, t.table, g, n, n + 1, Rational(1)};
}

FrobeniusAlgebra make_s2xs2() {
  // Basis {[M], A, B, P}; A*B = P, A^2 = B^2 = s^-1, the rest follows by associativity.
  enum : std::size_t { M, A, B, P };
  TableBuilder t(4, M);
  t.put(A, A, {{M, 1, -1}});
  t.put(B, B, {{M, 1, -1}});
  t.put(A, B, {{P, 1, 0}});
  t.put(A, P, {{B, 1, -1}});
  t.put(B, P, {{A, 1, -1}});
  t.put(P, P, {{M, 1, -2}});
  auto g = zero_form(4);
  pair_up(g, M, P, 1);
  pair_up(g, A, B, 1);
  return {"S2xS2", {{"[M]", 4}, {"A", 2}, {"B", 2}, {"P", 0}}, M, t.table, g, 2, 2, Rational(1)};
}

FrobeniusAlgebra make_blowup() {
  // A = exceptional divisor, B = line - A.
  enum : std::size_t { M, A, B, P };
  TableBuilder t(4, M);
  t.put(P, P, {{A, 1, -3}, {B, 1, -3}});
  t.put(A, P, {{B, 1, -2}});
  t.put(P, B, {{M, 1, -3}});
  t.put(A, A, {{P, -1, 0}, {A, 1, -1}, {M, 1, -2}});
  t.put(A, B, {{P, 1, 0}, {A, -1, -1}});
  t.put(B, B, {{A, 1, -1}});
  auto g = zero_form(4);
  pair_up(g, M, P, 1);
  pair_up(g, A, A, -1);
  pair_up(g, A, B, 1);
  // Minimal Chern number is read off the table by infer_chern_number.
  return {"CP2blowup", {{"[M]", 4}, {"A", 2}, {"B", 2}, {"P", 0}}, M, t.table, g, 2, 1, Rational(1)};
}

FrobeniusAlgebra make_nilpotent() {
  // Undeformed cap product on S^2: P * P = 0.
  TableBuilder t(2, 0);
  t.put(1, 1, AlgebraElement(2));
  auto g = zero_form(2);
  pair_up(g, 0, 1, 1);
  return {"nilpotent", {{"[M]", 2}, {"P", 0}}, 0, t.table, g, 1, 2, Rational(1)};
}

}  // namespace

FrobeniusAlgebra builtin_algebra(std::string_view name, int n) {
  if (name == "S2") return make_s2();
  if (name == "S2xS2") return make_s2xs2();
  if (name == "CP2blowup") return make_blowup();
  if (name == "nilpotent") return make_nilpotent();
  if (name == "CPn") return make_cpn(n);
  if (name.size() > 2 && name.substr(0, 2) == "CP") {
    std::string digits(name.substr(2));
    if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
      return make_cpn(std::stoi(digits));
  }
  throw Error(ErrorCode::UnknownName, "unknown built-in algebra " + std::string(name));
}

std::optional<int> infer_chern_number(const FrobeniusAlgebra& alg) {
  const std::size_t d = alg.dim();
  const int n = alg.half_dimension();
  std::optional<int> found;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const int target = alg.basis()[i].degree + alg.basis()[j].degree - 2 * n;
      for (std::size_t l = 0; l < d; ++l) {
        const FieldElement& c = alg.product(i, j)[l];
        if (c.is_zero()) continue;
        if (!c.is_laurent_polynomial()) return std::nullopt;
        for (const auto& term : c.laurent_terms()) {
          const int gap = target - alg.basis()[l].degree;
          if (term.exponent == 0) {
            if (gap != 0) return std::nullopt;
            continue;
          }
          if (gap % (2 * term.exponent) != 0) return std::nullopt;
          const int candidate = gap / (2 * term.exponent);
          if (candidate <= 0) return std::nullopt;
          if (found && *found != candidate) return std::nullopt;
          found = candidate;
        }
      }
    }
  }
  return found ? found : std::optional<int>(alg.chern_number());
}

std::vector<InvariantCheck> check_invariants(const FrobeniusAlgebra& alg) {
  const std::size_t d = alg.dim();
  std::vector<InvariantCheck> out;
  auto record = [&](std::string name, std::string failure) {
    out.push_back({std::move(name), failure.empty(), std::move(failure)});
  };
  auto label = [&](std::size_t i) { return alg.basis()[i].name; };

  {
    std::string fail;
    for (const auto& b : alg.basis())
      if (b.degree % 2 != 0 || b.degree < 0) fail = "class " + b.name + " has odd or negative degree";
    record("even degrees", fail);
  }
  {
    std::string fail;
    for (std::size_t i = 0; i < d && fail.empty(); ++i)
      for (std::size_t j = 0; j < d && fail.empty(); ++j)
        if (alg.product(i, j) != alg.product(j, i)) fail = label(i) + "*" + label(j) + " != " + label(j) + "*" + label(i);
    record("commutativity", fail);
  }
  {
    std::string fail;
    for (std::size_t i = 0; i < d && fail.empty(); ++i)
      if (alg.product(alg.unit_index(), i) != alg.basis_element(i)) fail = "[M]*" + label(i) + " != " + label(i);
    record("unit", fail);
  }
  {
    std::string fail;
    for (std::size_t i = 0; i < d && fail.empty(); ++i) {
      for (std::size_t j = 0; j < d && fail.empty(); ++j) {
        for (std::size_t l = 0; l < d && fail.empty(); ++l) {
          auto left = quantum_mul(alg, alg.product(i, j), alg.basis_element(l));
          auto right = quantum_mul(alg, alg.basis_element(i), alg.product(j, l));
          if (left != right)
            fail = "(" + label(i) + "*" + label(j) + ")*" + label(l) + " != " + label(i) + "*(" + label(j) + "*" + label(l) + ")";
        }
      }
    }
    record("associativity", fail);
  }
  {
    auto inferred = infer_chern_number(alg);
    std::string fail;
    if (!inferred) {
      fail = "no minimal Chern number is compatible with deg(a*b) = deg a + deg b - 2n";
    } else if (*inferred != alg.chern_number()) {
      fail = "table implies N = " + std::to_string(*inferred) + ", algebra declares N = " +
             std::to_string(alg.chern_number());
    }
    record("grading", fail);
  }
  {
    Matrix gram(d, std::vector<FieldElement>(d));
    std::string fail;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        gram[i][j] = FieldElement(alg.intersection(i, j));
        if (!(alg.intersection(i, j) == alg.intersection(j, i))) fail = "intersection form is not symmetric";
      }
    if (fail.empty() && !inverse(gram)) fail = "Delta is degenerate";
    record("non-degenerate pairing", fail);
  }
  {
    std::string fail;
    const AlgebraElement unit = alg.unit();
    for (std::size_t i = 0; i < d && fail.empty(); ++i)
      for (std::size_t j = 0; j < d && fail.empty(); ++j) {
        auto ei = alg.basis_element(i);
        auto ej = alg.basis_element(j);
        if (pairing_delta(alg, ei, ej) != pairing_delta(alg, alg.product(i, j), unit))
          fail = "Delta(" + label(i) + "," + label(j) + ") != Delta(" + label(i) + "*" + label(j) + ",[M])";
      }
    record("frobenius identity", fail);
  }
  return out;
}

}  // namespace calabi::qh
