#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qeuclid/algebra.hpp"
#include "qeuclid/calculus.hpp"
#include "qeuclid/errors.hpp"

namespace qeuclid {

// --- abstract syntax ---------------------------------------------------------
//
// Grammar:
//   expr   := ('-')? term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' int)?
//   atom   := integer | 'i' | 'q' ('^' halfint)? | gen | '[' expr ',' expr ']'
//           | '(' expr ')'
//   gen    := 'x(' idx ')' | 'r(' idx ')' | 'L' | 'K' | 'xi(' idx ')'
//           | 'xibar(' idx ')'
//   halfint := ('-')? digits ('/2')?   (the '/2' is consumed only when the
//              denominator is the literal 2; otherwise the slash is division)
//
// Rationals are spelled as quotients of integers; division is
// right-multiplication by the inverse and requires an invertible single-term
// denominator.

enum class GenKind { x, r, L, K, xi, xibar };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { integer, imag, qpow, gen, power, neg, mul, div, add, sub, commutator };
  Kind kind;
  long long value = 0;  // integer
  int m2 = 0;           // qpow: exponent in half-units of q
  GenKind gen = GenKind::L;
  int index = 0;      // gen: x/r/xi/xibar argument
  int exponent = 1;   // power
  std::size_t pos = 0;  // source offset (generators: for index diagnostics)
  std::vector<ExprPtr> kids = {};
};

namespace exprdetail {

inline ExprPtr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

struct Token {
  enum class Type { integer, ident, punct, end };
  Type type;
  std::string text;
  long long value = 0;
  std::size_t pos = 0;
};

inline std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      const std::string digits = text.substr(i, j - i);
      if (digits.size() > 18) throw ParseError("integer literal too large", i);
      out.push_back({Token::Type::integer, digits, std::stoll(digits), i});
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({Token::Type::ident, text.substr(i, j - i), 0, i});
      i = j;
      continue;
    }
    if (std::string("+-*/^()[],").find(c) != std::string::npos) {
      out.push_back({Token::Type::punct, std::string(1, c), 0, i});
      ++i;
      continue;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", i);
  }
  out.push_back({Token::Type::end, "", 0, text.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string text) : text_(std::move(text)), tokens_(lex(text_)) {}

  ExprPtr parse() {
    ExprPtr e = expr();
    if (!at_end())
      throw ParseError("unexpected trailing input '" + peek().text + "'", peek().pos);
    return e;
  }

 private:
  const Token& peek() const { return tokens_[cursor_]; }
  const Token& advance() { return tokens_[cursor_++]; }
  bool at_end() const { return peek().type == Token::Type::end; }
  bool is_punct(const char* p) const {
    return peek().type == Token::Type::punct && peek().text == p;
  }
  void expect(const char* p, const char* what) {
    if (!is_punct(p))
      throw ParseError(std::string("expected '") + p + "' " + what, peek().pos);
    ++cursor_;
  }

  ExprPtr expr() {
    ExprPtr lhs;
    if (is_punct("-")) {
      ++cursor_;
      ExprNode n{ExprNode::Kind::neg};
      n.kids = {term()};
      lhs = make(std::move(n));
    } else {
      lhs = term();
    }
    while (is_punct("+") || is_punct("-")) {
      const bool plus = peek().text == "+";
      ++cursor_;
      ExprNode n{plus ? ExprNode::Kind::add : ExprNode::Kind::sub};
      n.kids = {lhs, term()};
      lhs = make(std::move(n));
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = factor();
    while (is_punct("*") || is_punct("/")) {
      const bool mul = peek().text == "*";
      ++cursor_;
      ExprNode n{mul ? ExprNode::Kind::mul : ExprNode::Kind::div};
      n.kids = {lhs, factor()};
      lhs = make(std::move(n));
    }
    return lhs;
  }

  ExprPtr factor() {
    ExprPtr base = atom();
    if (is_punct("^")) {
      ++cursor_;
      ExprNode n{ExprNode::Kind::power};
      n.exponent = signed_int("after '^'");
      n.kids = {base};
      base = make(std::move(n));
    }
    return base;
  }

  int signed_int(const char* where) {
    int sign = 1;
    if (is_punct("-")) {
      sign = -1;
      ++cursor_;
    }
    if (peek().type != Token::Type::integer)
      throw ParseError(std::string("expected integer ") + where, peek().pos);
    const long long v = advance().value;
    if (v > 1'000'000)
      throw ParseError(std::string("exponent out of range ") + where, peek().pos);
    return static_cast<int>(sign * v);
  }

  ExprPtr atom() {
    const Token& t = peek();
    if (t.type == Token::Type::integer) {
      ++cursor_;
      ExprNode n{ExprNode::Kind::integer};
      n.value = t.value;
      return make(std::move(n));
    }
    if (t.type == Token::Type::ident) {
      if (t.text == "i") {
        ++cursor_;
        return make(ExprNode{ExprNode::Kind::imag});
      }
      if (t.text == "q") {
        ++cursor_;
        ExprNode n{ExprNode::Kind::qpow};
        n.m2 = 2;
        if (is_punct("^")) {
          ++cursor_;
          const int whole = signed_int("after 'q^'");
          // Consume '/2' (half-integer exponent) only when the next two
          // tokens are exactly '/' and the literal 2.
          if (is_punct("/") && tokens_[cursor_ + 1].type == Token::Type::integer &&
              tokens_[cursor_ + 1].value == 2) {
            cursor_ += 2;
            n.m2 = whole;
          } else {
            n.m2 = 2 * whole;
          }
        }
        return make(std::move(n));
      }
      if (t.text == "L" || t.text == "K") {
        ++cursor_;
        ExprNode n{ExprNode::Kind::gen};
        n.gen = t.text == "L" ? GenKind::L : GenKind::K;
        n.pos = t.pos;
        return make(std::move(n));
      }
      if (t.text == "x" || t.text == "r" || t.text == "xi" || t.text == "xibar") {
        ++cursor_;
        ExprNode n{ExprNode::Kind::gen};
        n.gen = t.text == "x"    ? GenKind::x
                : t.text == "r"  ? GenKind::r
                : t.text == "xi" ? GenKind::xi
                                 : GenKind::xibar;
        n.pos = t.pos;
        expect("(", ("after '" + t.text + "'").c_str());
        n.index = signed_int("as generator index");
        expect(")", "after generator index");
        return make(std::move(n));
      }
      throw ParseError("unknown symbol '" + t.text + "'", t.pos);
    }
    if (is_punct("(")) {
      ++cursor_;
      ExprPtr inner = expr();
      expect(")", "to close '('");
      return inner;
    }
    if (is_punct("[")) {
      ++cursor_;
      ExprNode n{ExprNode::Kind::commutator};
      n.kids.push_back(expr());
      expect(",", "between commutator arguments");
      n.kids.push_back(expr());
      expect("]", "to close '['");
      return make(std::move(n));
    }
    throw ParseError(at_end() ? std::string("expected an atom (end of input)")
                               : "expected an atom near '" + t.text + "'",
                     t.pos);
  }

  std::string text_;
  std::vector<Token> tokens_;
  std::size_t cursor_ = 0;
};

}  // namespace exprdetail

inline ExprPtr parse_expr(const std::string& text) {
  return exprdetail::Parser(text).parse();
}

// Index validation for a configured dimension (N >= 3): coordinate and form
// indices lie in -n..n with 0 admitted only for odd N; radius shells are
// 1..n; K exists only for even N.
inline void validate_indices(const ExprPtr& node, int N) {
  if (N < 3) throw ConfigError("N must be at least 3");
  const int n = N / 2;
  const bool odd = N % 2 == 1;
  const auto valid_index = [&](int i) {
    if (i == 0) return odd;
    return -n <= i && i <= n;
  };
  if (node->kind == ExprNode::Kind::gen) {
    switch (node->gen) {
      case GenKind::x:
      case GenKind::xi:
      case GenKind::xibar:
        if (!valid_index(node->index))
          throw ParseError("index " + std::to_string(node->index) +
                               " is out of range for N = " + std::to_string(N),
                           node->pos);
        break;
      case GenKind::r:
        if (node->index < 1 || node->index > n)
          throw ParseError("radius shell " + std::to_string(node->index) +
                               " is out of range for N = " + std::to_string(N),
                           node->pos);
        break;
      case GenKind::K:
        if (odd) throw ParseError("K exists only for even N", node->pos);
        break;
      case GenKind::L:
        break;
    }
  }
  for (const auto& kid : node->kids) validate_indices(kid, N);
}

inline ExprPtr parse_expr(const std::string& text, int N) {
  ExprPtr e = parse_expr(text);
  validate_indices(e, N);
  return e;
}

// --- canonical printing ------------------------------------------------------

namespace exprdetail {

// Parenthesization tiers: sums bind loosest, then products/quotients, then
// powers, then atoms.
inline int tier(const ExprNode& n) {
  switch (n.kind) {
    case ExprNode::Kind::add:
    case ExprNode::Kind::sub:
    case ExprNode::Kind::neg:
      return 0;
    case ExprNode::Kind::mul:
    case ExprNode::Kind::div:
      return 1;
    case ExprNode::Kind::power:
      return 2;
    default:
      return 3;
  }
}

inline std::string print_node(const ExprNode& n);

inline std::string print_child(const ExprNode& child, int min_tier) {
  const std::string s = print_node(child);
  if (tier(child) < min_tier) return "(" + s + ")";
  return s;
}

inline std::string print_node(const ExprNode& n) {
  switch (n.kind) {
    case ExprNode::Kind::integer:
      return std::to_string(n.value);
    case ExprNode::Kind::imag:
      return "i";
    case ExprNode::Kind::qpow:
      if (n.m2 == 2) return "q";
      if (n.m2 % 2 == 0) return "q^" + std::to_string(n.m2 / 2);
      return "q^" + std::to_string(n.m2) + "/2";
    case ExprNode::Kind::gen: {
      switch (n.gen) {
        case GenKind::L:
          return "L";
        case GenKind::K:
          return "K";
        case GenKind::x:
          return "x(" + std::to_string(n.index) + ")";
        case GenKind::r:
          return "r(" + std::to_string(n.index) + ")";
        case GenKind::xi:
          return "xi(" + std::to_string(n.index) + ")";
        case GenKind::xibar:
          return "xibar(" + std::to_string(n.index) + ")";
      }
      return "";
    }
    case ExprNode::Kind::power: {
      const ExprNode& base = *n.kids[0];
      // A bare 'q' base would re-parse as a half-integer q-power, so it is
      // wrapped like any compound base.
      const bool atomic = tier(base) == 3 && base.kind != ExprNode::Kind::qpow &&
                          !(base.kind == ExprNode::Kind::integer && base.value < 0);
      const std::string b = atomic ? print_node(base) : "(" + print_node(base) + ")";
      return b + "^" + std::to_string(n.exponent);
    }
    case ExprNode::Kind::neg:
      return "-" + print_child(*n.kids[0], 1);
    case ExprNode::Kind::mul:
      return print_child(*n.kids[0], 1) + " * " + print_child(*n.kids[1], 2);
    case ExprNode::Kind::div:
      return print_child(*n.kids[0], 1) + "/" + print_child(*n.kids[1], 2);
    case ExprNode::Kind::add:
      return print_child(*n.kids[0], 0) + " + " + print_child(*n.kids[1], 1);
    case ExprNode::Kind::sub:
      return print_child(*n.kids[0], 0) + " - " + print_child(*n.kids[1], 1);
    case ExprNode::Kind::commutator:
      return "[" + print_node(*n.kids[0]) + ", " + print_node(*n.kids[1]) + "]";
  }
  return "";
}

}  // namespace exprdetail

inline std::string print_expr(const ExprPtr& e) { return exprdetail::print_node(*e); }

// --- evaluation --------------------------------------------------------------

// An expression denotes either an algebra element or a one-form of one
// calculus; mixing the two (or the two calculi) in a sum or product is an
// error, and form generators appear at most linearly per monomial.
template <class F>
struct EvalResult {
  AlgebraElement<F> scalar;
  std::optional<CalculusKind> form_tag;
  std::map<int, AlgebraElement<F>> form;

  bool is_form() const { return form_tag.has_value(); }
};

template <class F>
class Evaluator {
 public:
  explicit Evaluator(const Algebra<F>& alg, const Calculus<F>* plain = nullptr,
                     const Calculus<F>* barred = nullptr)
      : alg_(&alg), plain_(plain), barred_(barred) {}

  EvalResult<F> eval(const ExprPtr& e) const { return eval_node(*e); }

  AlgebraElement<F> eval_element(const ExprPtr& e) const {
    EvalResult<F> r = eval(e);
    if (r.is_form()) throw ParseError("expected an algebra element, got a one-form");
    return std::move(r.scalar);
  }

 private:
  using Res = EvalResult<F>;

  const Calculus<F>& calculus_for(CalculusKind tag) const {
    const Calculus<F>* c = tag == CalculusKind::plain ? plain_ : barred_;
    if (c == nullptr)
      throw ConfigError(std::string("no ") + tag_name(tag) +
                        " calculus attached to the evaluator");
    return *c;
  }

  static Res scalar_result(AlgebraElement<F> e) {
    Res r;
    r.scalar = std::move(e);
    return r;
  }

  Res form_result(CalculusKind tag, OneForm<F> w) const {
    Res r;
    r.form_tag = tag;
    r.form = std::move(w.coeffs);
    return r;
  }

  OneForm<F> as_form(const Res& r) const { return OneForm<F>{r.form}; }

  Res add_results(const Res& a, const Res& b, bool subtract) const {
    if (a.is_form() != b.is_form())
      throw ParseError("cannot add an algebra element and a one-form");
    if (!a.is_form()) {
      AlgebraElement<F> out = a.scalar;
      if (subtract)
        out.add_all_scaled(b.scalar, alg_->ctx().zero() - alg_->ctx().one());
      else
        out.add_all(b.scalar);
      return scalar_result(std::move(out));
    }
    if (*a.form_tag != *b.form_tag)
      throw ParseError("cannot mix the plain and barred calculi in one expression");
    const auto& calc = calculus_for(*a.form_tag);
    return form_result(*a.form_tag, subtract ? calc.sub(as_form(a), as_form(b))
                                             : calc.add(as_form(a), as_form(b)));
  }

  Res mul_results(const Res& a, const Res& b) const {
    if (a.is_form() && b.is_form())
      throw ParseError("products of one-forms are outside the expression language");
    if (!a.is_form() && !b.is_form()) return scalar_result(alg_->mul(a.scalar, b.scalar));
    if (!a.is_form()) {
      const auto& calc = calculus_for(*b.form_tag);
      return form_result(*b.form_tag, calc.mul_left(a.scalar, as_form(b)));
    }
    const auto& calc = calculus_for(*a.form_tag);
    return form_result(*a.form_tag, calc.mul_right(as_form(a), b.scalar));
  }

  // Inverse of a single-term monomial: invert the coefficient and negate every
  // generator exponent; coordinates must stay within their invertibility
  // constraint.
  AlgebraElement<F> invert_element(const AlgebraElement<F>& e) const {
    if (e.terms.size() != 1)
      throw ParseError("only single-term monomials and nonzero scalars are invertible");
    const auto& [m, c] = *e.terms.begin();
    if (c.is_zero()) throw ParseError("division by zero");
    const auto& ctx = alg_->ctx();
    Mono inv = m;
    inv.alpha = -inv.alpha;
    inv.beta = -inv.beta;
    for (auto& g : inv.gamma) g = -g;
    {
      std::size_t p = 0;
      for (int i : ctx.alphabet()) {
        if (m.xpow[p] > 0 && !ctx.is_invertible_coord(i))
          throw ParseError("x(" + std::to_string(i) + ") is not invertible");
        inv.xpow[p] = -m.xpow[p];
        ++p;
      }
    }
    AlgebraElement<F> out;
    out.add_term(inv, c.inverse());
    return out;
  }

  Res power_result(const Res& base, int exponent) const {
    if (base.is_form()) {
      if (exponent == 1) return base;
      throw ParseError("one-forms admit only the first power");
    }
    if (exponent == 0) return scalar_result(alg_->one());
    const AlgebraElement<F> b =
        exponent > 0 ? base.scalar : invert_element(base.scalar);
    AlgebraElement<F> out = alg_->one();
    for (int k = std::abs(exponent); k > 0; --k) out = alg_->mul(out, b);
    return scalar_result(std::move(out));
  }

  Res eval_node(const ExprNode& n) const {
    const auto& ctx = alg_->ctx();
    switch (n.kind) {
      case ExprNode::Kind::integer:
        return scalar_result(alg_->scale(alg_->one(), ctx.integer(n.value)));
      case ExprNode::Kind::imag:
        return scalar_result(alg_->scale(alg_->one(), ctx.imag_unit()));
      case ExprNode::Kind::qpow:
        return scalar_result(alg_->scale(alg_->one(), ctx.q_half(n.m2)));
      case ExprNode::Kind::gen:
        switch (n.gen) {
          case GenKind::L:
            return scalar_result(alg_->L());
          case GenKind::K:
            return scalar_result(alg_->K());
          case GenKind::x:
            return scalar_result(alg_->x(n.index));
          case GenKind::r:
            if (n.index < 1 || n.index > ctx.n())
              throw ParseError("radius shell " + std::to_string(n.index) + " is out of range");
            return scalar_result(alg_->r(n.index));
          case GenKind::xi:
            return form_result(CalculusKind::plain,
                               calculus_for(CalculusKind::plain).basis(n.index));
          case GenKind::xibar:
            return form_result(CalculusKind::barred,
                               calculus_for(CalculusKind::barred).basis(n.index));
        }
        throw ParseError("unreachable generator kind");
      case ExprNode::Kind::power:
        return power_result(eval_node(*n.kids[0]), n.exponent);
      case ExprNode::Kind::neg: {
        Res r = eval_node(*n.kids[0]);
        if (r.is_form()) {
          const auto& calc = calculus_for(*r.form_tag);
          return form_result(*r.form_tag,
                             calc.scale(as_form(r), ctx.zero() - ctx.one()));
        }
        return scalar_result(alg_->scale(r.scalar, ctx.zero() - ctx.one()));
      }
      case ExprNode::Kind::mul:
        return mul_results(eval_node(*n.kids[0]), eval_node(*n.kids[1]));
      case ExprNode::Kind::div: {
        const Res a = eval_node(*n.kids[0]);
        const Res b = eval_node(*n.kids[1]);
        if (b.is_form()) throw ParseError("cannot divide by a one-form");
        return mul_results(a, scalar_result(invert_element(b.scalar)));
      }
      case ExprNode::Kind::add:
        return add_results(eval_node(*n.kids[0]), eval_node(*n.kids[1]), false);
      case ExprNode::Kind::sub:
        return add_results(eval_node(*n.kids[0]), eval_node(*n.kids[1]), true);
      case ExprNode::Kind::commutator: {
        const Res a = eval_node(*n.kids[0]);
        const Res b = eval_node(*n.kids[1]);
        return add_results(mul_results(a, b), mul_results(b, a), true);
      }
    }
    throw ParseError("unreachable expression kind");
  }

  const Algebra<F>* alg_;
  const Calculus<F>* plain_;
  const Calculus<F>* barred_;
};

// Canonical text for a one-form given by left coefficients, parseable by the
// grammar above.
template <class F>
std::string form_to_string(const Algebra<F>& alg,
                           const std::map<int, AlgebraElement<F>>& coeffs, CalculusKind tag) {
  const char* gen = tag == CalculusKind::plain ? "xi(" : "xibar(";
  std::string out;
  for (const auto& [i, c] : coeffs) {
    if (c.structurally_zero()) continue;
    if (!out.empty()) out += " + ";
    const std::string cs = alg.to_string(c);
    const bool wrap = c.terms.size() > 1 || cs.find(" * ") != std::string::npos ||
                      cs.find('-') != std::string::npos || cs.find('/') != std::string::npos;
    out += (wrap ? "(" + cs + ")" : cs) + " * " + gen + std::to_string(i) + ")";
  }
  return out.empty() ? "0 * " + std::string(gen) + "1)" : out;
}

}  // namespace qeuclid
