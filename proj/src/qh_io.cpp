#include "calabi/qh_io.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>

#include "calabi/error.hpp"

namespace calabi::qh {

namespace {

struct RenderTerm {
  int exponent;
  std::size_t index;
  Gaussian coeff;
};

bool is_integer(const Gaussian& c) { return c.is_real() && c.re().get_den() == 1; }

std::string render(const FrobeniusAlgebra& alg, const RenderTerm& t, bool leading) {
  const bool negative = t.coeff.is_real() && sgn(t.coeff.re()) < 0;
  const Gaussian mag = negative ? -t.coeff : t.coeff;
  const bool unit_class = t.index == alg.unit_index();

  std::string name = unit_class && t.exponent != 0 ? "" : alg.basis()[t.index].name;
  std::string spow;
  if (t.exponent == 1) spow = "s";
  else if (t.exponent != 0) spow = "s^" + std::to_string(t.exponent);

  std::string body;
  const bool has_symbol = !name.empty() || !spow.empty();
  if (!(mag == Gaussian(1)) || !has_symbol) {
    body = laurent::to_string(mag);
    if (!name.empty() && !is_integer(mag)) body += " ";
  }
  body += name;
  if (!spow.empty()) {
    if (!body.empty()) body += " ";
    body += spow;
  }

  std::string sign;
  if (leading) sign = negative ? "-" : "";
  else sign = negative ? " - " : " + ";
  return sign + body;
}

}  // namespace

std::string to_string(const FrobeniusAlgebra& alg, const AlgebraElement& a) {
  if (a.size() != alg.dim()) throw Error(ErrorCode::DimensionMismatch, "element size does not match algebra");
  std::vector<RenderTerm> terms;
  std::vector<std::size_t> non_laurent;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    if (!a[i].is_laurent_polynomial()) {
      non_laurent.push_back(i);
      continue;
    }
    for (auto& t : a[i].laurent_terms()) terms.push_back({t.exponent, i, t.coeff});
  }
  std::stable_sort(terms.begin(), terms.end(), [](const RenderTerm& x, const RenderTerm& y) {
    return std::tie(y.exponent, x.index) < std::tie(x.exponent, y.index);
  });

  std::string out;
  for (const auto& t : terms) out += render(alg, t, out.empty());
  for (std::size_t i : non_laurent) {
    if (!out.empty()) out += " + ";
    out += "[" + laurent::to_string(a[i]) + "]";
    if (i != alg.unit_index()) out += " " + alg.basis()[i].name;
  }
  return out.empty() ? "0" : out;
}

// ------------------------------------------------------------------ parser

namespace {

class ElementParser {
 public:
  ElementParser(const FrobeniusAlgebra& alg, std::string_view text) : alg_(alg), text_(text) {
    names_.reserve(alg.dim());
    for (std::size_t i = 0; i < alg.dim(); ++i) names_.push_back({alg.basis()[i].name, i});
    std::sort(names_.begin(), names_.end(),
              [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  }

  AlgebraElement parse() {
    AlgebraElement v = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError,
                what + " at position " + std::to_string(pos_) + " in \"" + std::string(text_) + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  bool starts_with(std::string_view word) const { return text_.substr(pos_).starts_with(word); }

  AlgebraElement expr() {
    AlgebraElement acc(alg_.dim());
    bool negate = false;
    if (accept('-')) negate = true;
    else accept('+');
    AlgebraElement t = term();
    acc = negate ? -t : t;
    for (;;) {
      if (accept('+')) acc += term();
      else if (accept('-')) acc -= term();
      else return acc;
    }
  }

  bool at_factor_start() {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    const char c = text_[pos_];
    if (c == '+' || c == '-' || c == ')') return false;
    return true;
  }

  AlgebraElement term() {
    AlgebraElement acc = factor();
    for (;;) {
      if (accept('*')) {
        acc = quantum_mul(alg_, acc, factor());
      } else if (at_factor_start()) {
        acc = quantum_mul(alg_, acc, factor());
      } else {
        return acc;
      }
    }
  }

  long integer() {
    skip_ws();
    bool neg = false;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      neg = text_[pos_] == '-';
      ++pos_;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    long v = std::stol(std::string(text_.substr(start, pos_ - start)));
    return neg ? -v : v;
  }

  AlgebraElement factor() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");

    // Basis names win over keywords so classes like "A^2" parse as one token.
    for (const auto& [name, idx] : names_) {
      if (!name.empty() && starts_with(name)) {
        pos_ += name.size();
        return maybe_power(alg_.basis_element(idx));
      }
    }

    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      AlgebraElement inner = expr();
      if (!accept(')')) fail("expected ')'");
      return maybe_power(inner);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '/') {
        ++pos_;
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
          fail("expected denominator");
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
      Rational q = laurent::parse_rational(text_.substr(start, pos_ - start));
      return alg_.scalar(FieldElement(Gaussian(q)));
    }
    if (starts_with("euler")) {
      pos_ += 5;
      return maybe_power(euler_class(alg_));
    }
    if (c == 's') {
      ++pos_;
      int exponent = 1;
      if (accept('^')) exponent = static_cast<int>(integer());
      return alg_.scalar(FieldElement::monomial(1, exponent));
    }
    if (c == 'i') {
      ++pos_;
      return alg_.scalar(FieldElement(Gaussian::i()));
    }
    if (c == '[') fail("unknown class");
    fail("unexpected '" + std::string(1, c) + "'");
  }

  AlgebraElement maybe_power(const AlgebraElement& base) {
    if (!accept('^')) return base;
    const long k = integer();
    if (k >= 0) return power(alg_, base, static_cast<unsigned>(k));
    auto inv = invert_element(alg_, base);
    if (!inv) throw Error(ErrorCode::DivisionByZero, to_string(alg_, base) + " is not invertible");
    return power(alg_, *inv, static_cast<unsigned>(-k));
  }

  const FrobeniusAlgebra& alg_;
  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<std::pair<std::string, std::size_t>> names_;
};

}  // namespace

AlgebraElement parse_element(const FrobeniusAlgebra& alg, std::string_view text) {
  return ElementParser(alg, text).parse();
}

nlohmann::json element_to_json(const FrobeniusAlgebra& alg, const AlgebraElement& a) {
  nlohmann::json coords = nlohmann::json::object();
  for (std::size_t i = 0; i < alg.dim(); ++i) coords[alg.basis()[i].name] = laurent::to_json(a[i]);
  return {{"text", to_string(alg, a)}, {"coords", coords}};
}

// -------------------------------------------------------- definition files

FrobeniusAlgebra algebra_from_json(const nlohmann::json& j) {
  try {
    std::vector<BasisClass> basis;
    for (const auto& b : j.at("basis")) basis.push_back({b.at("name").get<std::string>(), b.at("degree").get<int>()});
    const std::size_t d = basis.size();
    if (d == 0) throw Error(ErrorCode::ParseError, "empty basis");
    const auto unit = j.at("unit").get<std::size_t>();
    if (unit >= d) throw Error(ErrorCode::ParseError, "unit index out of range");

    ProductTable table(d, std::vector<AlgebraElement>(d, AlgebraElement(d)));
    std::vector<std::vector<bool>> set(d, std::vector<bool>(d, false));
    auto index = [d](const nlohmann::json& v) {
      auto k = v.get<std::size_t>();
      if (k >= d) throw Error(ErrorCode::ParseError, "basis index out of range");
      return k;
    };
    for (const auto& entry : j.at("mul")) {
      const std::size_t i = index(entry.at(0));
      const std::size_t k = index(entry.at(1));
      AlgebraElement v(d);
      for (const auto& term : entry.at(2)) v[index(term.at(0))] += laurent::field_element_from_json(term.at(1));
      if (set[i][k] && table[i][k] != v)
        throw Error(ErrorCode::ParseError, "conflicting entries for product " + std::to_string(i) + "*" + std::to_string(k));
      table[i][k] = v;
      set[i][k] = true;
    }
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        if (set[i][k]) continue;
        if (set[k][i]) {
          table[i][k] = table[k][i];
        } else if (i == unit || k == unit) {
          table[i][k] = AlgebraElement(d);
          table[i][k][i == unit ? k : i] = FieldElement(1);
        } else {
          throw Error(ErrorCode::ParseError,
                      "missing product " + basis[i].name + "*" + basis[k].name);
        }
      }
    }

    IntersectionForm form(d, std::vector<Gaussian>(d));
    for (const auto& entry : j.at("pairing")) {
      const std::size_t i = index(entry.at(0));
      const std::size_t k = index(entry.at(1));
      const auto& val = entry.at(2);
      Rational q = val.is_string() ? laurent::parse_rational(val.get<std::string>()) : Rational(val.get<long>());
      form[i][k] = Gaussian(q);
      form[k][i] = Gaussian(q);
    }

    Rational omega(1);
    if (j.contains("Omega")) {
      const auto& o = j.at("Omega");
      omega = o.is_string() ? laurent::parse_rational(o.get<std::string>()) : Rational(o.get<long>());
    }
    std::string name = j.value("name", std::string("custom"));
    return {name, basis, unit, table, form, j.at("n").get<int>(), j.at("N").get<int>(), omega};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("algebra definition: ") + e.what());
  }
}

nlohmann::json algebra_to_json(const FrobeniusAlgebra& alg) {
  const std::size_t d = alg.dim();
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& b : alg.basis()) basis.push_back({{"name", b.name}, {"degree", b.degree}});
  nlohmann::json mul = nlohmann::json::array();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = i; k < d; ++k) {
      nlohmann::json terms = nlohmann::json::array();
      for (std::size_t l = 0; l < d; ++l)
        if (!alg.product(i, k)[l].is_zero()) terms.push_back({l, laurent::to_json(alg.product(i, k)[l])});
      mul.push_back({i, k, terms});
    }
  }
  nlohmann::json pairing = nlohmann::json::array();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = i; k < d; ++k)
      if (!alg.intersection(i, k).is_zero())
        pairing.push_back({i, k, laurent::to_string(alg.intersection(i, k).re())});
  return {{"name", alg.name()}, {"basis", basis}, {"unit", alg.unit_index()}, {"mul", mul},
          {"pairing", pairing}, {"n", alg.half_dimension()}, {"N", alg.chern_number()},
          {"Omega", laurent::to_string(alg.omega())}};
}

}  // namespace calabi::qh
