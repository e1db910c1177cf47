#include "calabi/laurent.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <sstream>

#include "calabi/error.hpp"

namespace calabi::laurent {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw Error(ErrorCode::ParseError, "empty rational");
  if (s.front() == '+') s.erase(0, 1);
  Rational q;
  // mpq_class accepts "p/q" and integers but not a denominator of 0 or decimals.
  if (s.find('.') != std::string::npos) {
    throw Error(ErrorCode::ParseError, "rational must be written as p/q: " + s);
  }
  if (q.set_str(s, 10) != 0) throw Error(ErrorCode::ParseError, "bad rational: " + s);
  if (q.get_den() == 0) throw Error(ErrorCode::DivisionByZero, "rational with zero denominator");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

// ---------------------------------------------------------------- Gaussian

Gaussian Gaussian::inverse() const {
  if (is_zero()) throw Error(ErrorCode::DivisionByZero, "inverse of zero Gaussian rational");
  Rational n = norm();
  return {re_ / n, -im_ / n};
}

Gaussian& Gaussian::operator+=(const Gaussian& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

Gaussian& Gaussian::operator-=(const Gaussian& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

Gaussian& Gaussian::operator*=(const Gaussian& o) {
  if (is_real() && o.is_real()) {
    re_ *= o.re_;
    return *this;
  }
  Rational re = re_ * o.re_ - im_ * o.im_;
  Rational im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

Gaussian& Gaussian::operator/=(const Gaussian& o) {
  if (o.is_real()) {
    if (sgn(o.re_) == 0) throw Error(ErrorCode::DivisionByZero, "division by zero");
    re_ /= o.re_;
    im_ /= o.re_;
    return *this;
  }
  return *this *= o.inverse();
}

std::string to_string(const Gaussian& z) {
  if (z.is_real()) return to_string(z.re());
  std::string im;
  if (z.im() == 1) {
    im = "i";
  } else if (z.im() == -1) {
    im = "-i";
  } else {
    im = to_string(z.im()) + "i";
  }
  if (sgn(z.re()) == 0) return im;
  std::string out = "(" + to_string(z.re());
  if (im.front() != '-') out += "+";
  return out + im + ")";
}

// -------------------------------------------------------------------- Poly

Poly::Poly(std::vector<Gaussian> ascending) : coeffs_(std::move(ascending)) { trim(); }

Poly Poly::constant(const Gaussian& c) { return Poly(std::vector<Gaussian>{c}); }

Poly Poly::monomial(const Gaussian& c, int degree) {
  std::vector<Gaussian> v(static_cast<std::size_t>(degree) + 1);
  v.back() = c;
  return Poly(std::move(v));
}

void Poly::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

Gaussian Poly::coeff(int power) const {
  if (power < 0 || power > degree()) return {};
  return coeffs_[static_cast<std::size_t>(power)];
}

int Poly::low_degree() const {
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    if (!coeffs_[i].is_zero()) return static_cast<int>(i);
  return 0;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& c : r.coeffs_) c = -c;
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  if (coeffs_.size() < o.coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  trim();
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (coeffs_.size() < o.coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  trim();
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Gaussian> out(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
      if (b.coeffs_[j].is_zero()) continue;
      out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
  }
  return Poly(std::move(out));
}

Poly Poly::scaled(const Gaussian& c) const {
  if (c.is_zero()) return {};
  Poly r = *this;
  for (auto& x : r.coeffs_) x *= c;
  return r;
}

Poly Poly::shifted(int k) const {
  if (is_zero() || k == 0) return *this;
  std::vector<Gaussian> v(static_cast<std::size_t>(k));
  v.insert(v.end(), coeffs_.begin(), coeffs_.end());
  return Poly(std::move(v));
}

Poly Poly::monic() const {
  if (is_zero()) return {};
  return scaled(lead().inverse());
}

std::pair<Poly, Poly> Poly::divmod(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw Error(ErrorCode::DivisionByZero, "polynomial division by zero");
  if (a.degree() < b.degree()) return {Poly{}, a};
  const Gaussian inv_lead = b.lead().inverse();
  std::vector<Gaussian> rem = a.coeffs_;
  std::vector<Gaussian> quot(static_cast<std::size_t>(a.degree() - b.degree()) + 1);
  const int db = b.degree();
  for (int k = a.degree(); k >= db; --k) {
    const Gaussian& top = rem[static_cast<std::size_t>(k)];
    if (top.is_zero()) continue;
    Gaussian q = top * inv_lead;
    for (int j = 0; j <= db; ++j) {
      const auto& bj = b.coeffs_[static_cast<std::size_t>(j)];
      if (!bj.is_zero()) rem[static_cast<std::size_t>(k - db + j)] -= q * bj;
    }
    quot[static_cast<std::size_t>(k - db)] = std::move(q);
  }
  return {Poly(std::move(quot)), Poly(std::move(rem))};
}

namespace {

// Images in F_p with p = 1 mod 4, where i maps to a square root of -1.
// If both leading coefficients survive and the images are coprime, so are
// the originals, which settles the common case without Euclid over Q(i).
constexpr std::uint64_t kPrime = 998244353;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) { return a * b % kPrime; }

std::uint64_t powmod(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  for (; e; e >>= 1, a = mulmod(a, a))
    if (e & 1) r = mulmod(r, a);
  return r;
}

std::uint64_t sqrt_minus_one() {
  static const std::uint64_t r = powmod(3, (kPrime - 1) / 4);  // 3 generates F_p^*
  return r;
}

std::optional<std::uint64_t> reduce(const Rational& q) {
  const std::uint64_t den = mpz_fdiv_ui(q.get_den_mpz_t(), kPrime);
  if (den == 0) return std::nullopt;
  const std::uint64_t num = mpz_fdiv_ui(q.get_num_mpz_t(), kPrime);
  return mulmod(num, powmod(den, kPrime - 2));
}

std::optional<std::vector<std::uint64_t>> reduce(const Poly& p) {
  std::vector<std::uint64_t> out;
  out.reserve(p.coeffs().size());
  for (const auto& c : p.coeffs()) {
    auto re = reduce(c.re());
    auto im = reduce(c.im());
    if (!re || !im) return std::nullopt;
    out.push_back((*re + mulmod(*im, sqrt_minus_one())) % kPrime);
  }
  return out;
}

void trim_mod(std::vector<std::uint64_t>& v) {
  while (!v.empty() && v.back() == 0) v.pop_back();
}

// Degree of gcd over F_p; both inputs non-zero.
int gcd_degree_mod(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b) {
  trim_mod(a);
  trim_mod(b);
  while (!b.empty()) {
    const std::uint64_t inv = powmod(b.back(), kPrime - 2);
    while (a.size() >= b.size()) {
      const std::uint64_t q = mulmod(a.back(), inv);
      const std::size_t shift = a.size() - b.size();
      for (std::size_t j = 0; j < b.size(); ++j)
        a[shift + j] = (a[shift + j] + kPrime - mulmod(q, b[j])) % kPrime;
      trim_mod(a);
      if (a.empty()) break;
    }
    std::swap(a, b);
  }
  return static_cast<int>(a.size()) - 1;
}

bool certainly_coprime(const Poly& a, const Poly& b) {
  auto ra = reduce(a);
  auto rb = reduce(b);
  if (!ra || !rb || ra->back() == 0 || rb->back() == 0) return false;
  return gcd_degree_mod(std::move(*ra), std::move(*rb)) == 0;
}

}  // namespace

Poly Poly::gcd(Poly a, Poly b) {
  if (!a.is_zero() && !b.is_zero() && a.degree() > 0 && b.degree() > 0 && certainly_coprime(a, b))
    return constant(1);
  while (!b.is_zero()) {
    Poly r = divmod(a, b).second;
    a = std::move(b);
    b = r.monic();
  }
  return a.monic();
}

namespace {

std::string monomial_string(const Gaussian& c, int power, bool leading, std::string_view var) {
  std::string out;
  Gaussian mag = c;
  bool negative = c.is_real() && sgn(c.re()) < 0;
  if (negative) mag = -c;
  if (leading) {
    if (negative) out += "-";
  } else {
    out += negative ? " - " : " + ";
  }
  const bool unit = mag == Gaussian(1);
  if (power == 0) return out + to_string(mag);
  if (!unit) out += to_string(mag);
  out += var;
  if (power != 1) out += "^" + std::to_string(power);
  return out;
}

}  // namespace

std::string to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool leading = true;
  for (int k = p.degree(); k >= 0; --k) {
    Gaussian c = p.coeff(k);
    if (c.is_zero()) continue;
    out += monomial_string(c, k, leading, "s");
    leading = false;
  }
  return out;
}

std::string to_string(const Valuation& v) {
  return v.is_neg_infinity() ? "NEG_INFINITY" : std::to_string(v.value());
}

// ------------------------------------------------------------ FieldElement

FieldElement::FieldElement(const Gaussian& c) : num_(Poly::constant(c)), den_(Poly::constant(1)) {}

FieldElement::FieldElement(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
  normalize();
}

void FieldElement::normalize() {
  if (den_.is_zero()) throw Error(ErrorCode::DivisionByZero, "rational function with zero denominator");
  if (num_.is_zero()) {
    den_ = Poly::constant(1);
    return;
  }
  // Strip common powers of s first; this keeps the common Laurent case cheap.
  const int common_low = std::min(num_.low_degree(), den_.low_degree());
  if (common_low > 0) {
    num_ = Poly(std::vector<Gaussian>(num_.coeffs().begin() + common_low, num_.coeffs().end()));
    den_ = Poly(std::vector<Gaussian>(den_.coeffs().begin() + common_low, den_.coeffs().end()));
  }
  if (den_.degree() > 0 && !den_.is_monomial()) {
    Poly g = Poly::gcd(num_, den_);
    if (g.degree() > 0) {
      num_ = Poly::divmod(num_, g).first;
      den_ = Poly::divmod(den_, g).first;
    }
  }
  if (!(den_.lead() == Gaussian(1))) {
    const Gaussian inv = den_.lead().inverse();
    num_ = num_.scaled(inv);
    den_ = den_.scaled(inv);
  }
}

FieldElement FieldElement::monomial(const Gaussian& c, int exponent) {
  if (exponent >= 0) return {Poly::monomial(c, exponent), Poly::constant(1)};
  return {Poly::constant(c), Poly::monomial(1, -exponent)};
}

FieldElement FieldElement::from_laurent(const std::vector<ExpansionTerm>& terms) {
  if (terms.empty()) return {};
  int low = 0;
  for (const auto& t : terms) low = std::min(low, t.exponent);
  Poly num;
  for (const auto& t : terms) num += Poly::monomial(t.coeff, t.exponent - low);
  return {std::move(num), Poly::monomial(1, -low)};
}

FieldElement& FieldElement::operator+=(const FieldElement& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  if (den_ == o.den_) {
    num_ += o.num_;
  } else if (den_.is_monomial() && o.den_.is_monomial()) {
    const int d = std::max(den_.degree(), o.den_.degree());
    num_ = num_.shifted(d - den_.degree()) + o.num_.shifted(d - o.den_.degree());
    den_ = Poly::monomial(1, d);
  } else {
    // Henrici: only the common factor of the denominators can cancel.
    const Poly g = Poly::gcd(den_, o.den_);
    const Poly d1 = Poly::divmod(den_, g).first;
    const Poly d2 = Poly::divmod(o.den_, g).first;
    num_ = num_ * d2 + o.num_ * d1;
    den_ = den_ * d2;
  }
  normalize();
  return *this;
}

FieldElement& FieldElement::operator-=(const FieldElement& o) { return *this += -o; }

FieldElement& FieldElement::operator*=(const FieldElement& o) {
  if (is_zero() || o.is_zero()) return *this = FieldElement{};
  if (den_.is_monomial() && o.den_.is_monomial()) {
    num_ = num_ * o.num_;
    den_ = den_ * o.den_;
    normalize();
    return *this;
  }
  // Both operands are reduced, so cross-cancelling is enough.
  const Poly g1 = Poly::gcd(num_, o.den_);
  const Poly g2 = Poly::gcd(o.num_, den_);
  num_ = Poly::divmod(num_, g1).first * Poly::divmod(o.num_, g2).first;
  den_ = Poly::divmod(den_, g2).first * Poly::divmod(o.den_, g1).first;
  normalize();
  return *this;
}

FieldElement& FieldElement::operator/=(const FieldElement& o) { return *this *= o.inverse(); }

FieldElement FieldElement::inverse() const {
  if (is_zero()) throw Error(ErrorCode::DivisionByZero, "inverse of zero in k");
  return {den_, num_};
}

Valuation FieldElement::valuation() const {
  if (is_zero()) return Valuation::neg_infinity();
  return Valuation(num_.degree() - den_.degree());
}

std::vector<ExpansionTerm> FieldElement::truncated_expansion(int floor) const {
  std::vector<ExpansionTerm> out;
  if (is_zero()) return out;
  // num * s^K = q * den + r with K >= -floor makes s^-K * r / den fall below floor.
  const int shift = std::max(0, -floor);
  auto [quot, rem] = Poly::divmod(num_.shifted(shift), den_);
  for (int k = quot.degree(); k >= 0; --k) {
    const int exponent = k - shift;
    if (exponent < floor) break;
    Gaussian c = quot.coeff(k);
    if (!c.is_zero()) out.push_back({exponent, std::move(c)});
  }
  return out;
}

std::vector<ExpansionTerm> FieldElement::laurent_terms() const {
  std::vector<ExpansionTerm> out;
  if (is_zero()) return out;
  const int shift = den_.degree();
  for (int k = num_.degree(); k >= 0; --k) {
    Gaussian c = num_.coeff(k);
    if (!c.is_zero()) out.push_back({k - shift, std::move(c)});
  }
  return out;
}

Gaussian FieldElement::constant_term() const {
  if (valuation() < Valuation(0)) return {};
  for (auto& t : truncated_expansion(0))
    if (t.exponent == 0) return t.coeff;
  return {};
}

FieldElement invert(const FieldElement& a) { return a.inverse(); }
Valuation valuation(const FieldElement& a) { return a.valuation(); }
std::vector<ExpansionTerm> truncated_expansion(const FieldElement& a, int floor) {
  return a.truncated_expansion(floor);
}

std::string to_string(const FieldElement& a) {
  if (a.is_zero()) return "0";
  if (!a.is_laurent_polynomial()) return "(" + to_string(a.num()) + ")/(" + to_string(a.den()) + ")";
  std::string out;
  bool leading = true;
  for (const auto& t : a.laurent_terms()) {
    out += monomial_string(t.coeff, t.exponent, leading, "s");
    leading = false;
  }
  return out;
}

// ------------------------------------------------------------------- JSON

namespace {

nlohmann::json poly_to_json(const Poly& p) {
  auto arr = nlohmann::json::array();
  for (int k = p.degree(); k >= 0; --k) {
    Gaussian c = p.coeff(k);
    if (c.is_zero()) continue;
    arr.push_back({k, to_string(c.re()), to_string(c.im())});
  }
  return arr;
}

std::vector<ExpansionTerm> terms_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) throw Error(ErrorCode::ParseError, "expected array of [exp, re, im] terms");
  std::vector<ExpansionTerm> out;
  for (const auto& t : arr) {
    if (!t.is_array() || t.size() < 2 || t.size() > 3 || !t[0].is_number_integer())
      throw Error(ErrorCode::ParseError, "term must be [exp, \"re\", \"im\"]");
    auto part = [](const nlohmann::json& v) {
      if (v.is_string()) return parse_rational(v.get<std::string>());
      if (v.is_number_integer()) return Rational(v.get<long>());
      throw Error(ErrorCode::ParseError, "coefficient must be a \"p/q\" string");
    };
    Rational re = part(t[1]);
    Rational im = t.size() == 3 ? part(t[2]) : Rational(0);
    out.push_back({t[0].get<int>(), Gaussian(re, im)});
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const FieldElement& a) {
  return {{"num", poly_to_json(a.num())}, {"den", poly_to_json(a.den())}};
}

FieldElement field_element_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("num"))
    throw Error(ErrorCode::ParseError, "field element must be {\"num\": [...], \"den\": [...]}");
  FieldElement num = FieldElement::from_laurent(terms_from_json(j.at("num")));
  FieldElement den = j.contains("den") ? FieldElement::from_laurent(terms_from_json(j.at("den")))
                                       : FieldElement(1);
  if (den.is_zero()) throw Error(ErrorCode::DivisionByZero, "field element with zero denominator");
  return num / den;
}

}  // namespace calabi::laurent
