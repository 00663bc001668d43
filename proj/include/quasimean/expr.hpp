#pragma once

#include <cctype>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "quasimean/error.hpp"
#include "quasimean/mean_function.hpp"
#include "quasimean/real.hpp"
#include "quasimean/tuple.hpp"

namespace quasimean {

enum class NodeKind { Var, Const, Add, Mul, DivN, RootN, PowX, ScaleX };

inline const char* node_name(NodeKind k) {
  switch (k) {
    case NodeKind::Var: return "var";
    case NodeKind::Const: return "const";
    case NodeKind::Add: return "add";
    case NodeKind::Mul: return "mul";
    case NodeKind::DivN: return "divn";
    case NodeKind::RootN: return "rootn";
    case NodeKind::PowX: return "powx";
    case NodeKind::ScaleX: return "scalex";
  }
  return "?";
}

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

/// Immutable AST node. `index` is used by Var (1-based), `n` by DivN/RootN,
/// `q` by Const (value) and PowX/ScaleX (the parameter x).
struct ExprNode {
  NodeKind kind;
  std::size_t index = 0;
  unsigned long n = 0;
  Rational q = 0;
  std::vector<Expr> children;
};

namespace expr {

inline Expr var(std::size_t i) {
  if (i == 0) throw ArityError("variables are numbered from 1");
  return std::make_shared<const ExprNode>(ExprNode{NodeKind::Var, i, 0, 0, {}});
}
inline Expr constant(Rational q) { return std::make_shared<const ExprNode>(ExprNode{NodeKind::Const, 0, 0, std::move(q), {}}); }
inline Expr add(std::vector<Expr> xs) {
  if (xs.size() < 2) throw UsageError("add needs at least two operands");
  return std::make_shared<const ExprNode>(ExprNode{NodeKind::Add, 0, 0, 0, std::move(xs)});
}
inline Expr mul(std::vector<Expr> xs) {
  if (xs.size() < 2) throw UsageError("mul needs at least two operands");
  return std::make_shared<const ExprNode>(ExprNode{NodeKind::Mul, 0, 0, 0, std::move(xs)});
}
inline Expr div_n(Expr e, unsigned long n) {
  if (n == 0) throw DomainError("division by 0");
  return std::make_shared<const ExprNode>(ExprNode{NodeKind::DivN, 0, n, 0, {std::move(e)}});
}
inline Expr root_n(Expr e, unsigned long n) {
  if (n == 0) throw DomainError("0-th root");
  return std::make_shared<const ExprNode>(ExprNode{NodeKind::RootN, 0, n, 0, {std::move(e)}});
}
inline Expr pow_x(Expr e, Rational x) {
  return std::make_shared<const ExprNode>(ExprNode{NodeKind::PowX, 0, 0, std::move(x), {std::move(e)}});
}
inline Expr scale_x(Expr e, Rational x) {
  return std::make_shared<const ExprNode>(ExprNode{NodeKind::ScaleX, 0, 0, std::move(x), {std::move(e)}});
}

}  // namespace expr

inline bool structurally_equal(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->index != b->index || a->n != b->n || a->q != b->q) return false;
  if (a->children.size() != b->children.size()) return false;
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    if (!structurally_equal(a->children[i], b->children[i])) return false;
  }
  return true;
}

inline void collect_vars(const Expr& e, std::set<std::size_t>& out) {
  if (e->kind == NodeKind::Var) out.insert(e->index);
  for (const auto& c : e->children) collect_vars(c, out);
}

/// Largest variable index (0 for a constant expression).
inline std::size_t expr_arity(const Expr& e) {
  std::set<std::size_t> vs;
  collect_vars(e, vs);
  return vs.empty() ? 0 : *vs.rbegin();
}

inline std::size_t expr_size(const Expr& e) {
  std::size_t s = 1;
  for (const auto& c : e->children) s += expr_size(c);
  return s;
}

inline std::string render_rational(const Rational& q) {
  const Integer& num = boost::multiprecision::numerator(q);
  const Integer& den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline std::string render(const Expr& e);

namespace detail {

inline std::string render_div_operand(const Expr& c) {
  switch (c->kind) {
    case NodeKind::Var:
    case NodeKind::DivN:
    case NodeKind::RootN:
    case NodeKind::PowX:
    case NodeKind::ScaleX:
      return render(c);
    default:
      return "(" + render(c) + ")";
  }
}

}  // namespace detail

/// Text form that parses back to the same tree.
inline std::string render(const Expr& e) {
  switch (e->kind) {
    case NodeKind::Var: return "a" + std::to_string(e->index);
    case NodeKind::Const: return render_rational(e->q);
    case NodeKind::Add:
    case NodeKind::Mul: {
      const bool is_add = e->kind == NodeKind::Add;
      std::string out;
      for (std::size_t i = 0; i < e->children.size(); ++i) {
        const auto& c = e->children[i];
        if (i) out += is_add ? " + " : " * ";
        const bool wrap = c->kind == e->kind || (!is_add && c->kind == NodeKind::Add);
        out += wrap ? "(" + render(c) + ")" : render(c);
      }
      return out;
    }
    case NodeKind::DivN: return detail::render_div_operand(e->children[0]) + "/" + std::to_string(e->n);
    case NodeKind::RootN: return "root(" + std::to_string(e->n) + ", " + render(e->children[0]) + ")";
    case NodeKind::PowX: return "pow(" + render_rational(e->q) + ", " + render(e->children[0]) + ")";
    case NodeKind::ScaleX: return "scale(" + render_rational(e->q) + ", " + render(e->children[0]) + ")";
  }
  return "?";
}

inline nlohmann::ordered_json to_json(const Expr& e) {
  nlohmann::ordered_json j;
  j["node"] = node_name(e->kind);
  j["children"] = nlohmann::ordered_json::array();
  for (const auto& c : e->children) j["children"].push_back(to_json(c));
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  switch (e->kind) {
    case NodeKind::Var: params["index"] = e->index; break;
    case NodeKind::Const: params["value"] = render_rational(e->q); break;
    case NodeKind::DivN:
    case NodeKind::RootN: params["n"] = e->n; break;
    case NodeKind::PowX:
    case NodeKind::ScaleX: params["x"] = render_rational(e->q); break;
    default: break;
  }
  j["params"] = params;
  return j;
}

// Grammar:
//
//   sum     := product ('+' product)*
//   product := postfix ('*' postfix)*
//   postfix := primary ('/' INT)*
//   primary := NUMBER | 'a'INT | '(' sum ')'
//            | 'root' '(' INT ',' sum ')' | 'pow' '(' RAT ',' sum ')' | 'scale' '(' RAT ',' sum ')'
//
// A bare numeric literal directly followed by '/INT' is the rational constant
// p/q; any other operand followed by '/INT' is DivN.

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : s_(text) {}

  Expr parse() {
    Expr e = sum();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    std::set<std::size_t> vs;
    collect_vars(e, vs);
    std::size_t expect = 1;
    for (auto v : vs) {
      if (v != expect) throw ArityError("variables must be contiguous from a1; a" + std::to_string(expect) + " is missing");
      ++expect;
    }
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr sum() {
    std::vector<Expr> xs{product()};
    while (accept('+')) xs.push_back(product());
    return xs.size() == 1 ? xs[0] : expr::add(std::move(xs));
  }

  Expr product() {
    std::vector<Expr> xs{postfix()};
    while (accept('*')) xs.push_back(postfix());
    return xs.size() == 1 ? xs[0] : expr::mul(std::move(xs));
  }

  Expr postfix() {
    bool bare_literal = false;
    Expr e = primary(bare_literal);
    while (accept('/')) {
      skip_ws();
      const unsigned long n = positive_integer("a positive integer divisor");
      if (bare_literal) {
        e = expr::constant(Rational(e->q / Rational(n)));
        bare_literal = false;
      } else {
        e = expr::div_n(e, n);
      }
    }
    return e;
  }

  unsigned long positive_integer(const char* what) {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) fail(std::string("expected ") + what);
    if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E')) {
      pos_ = start;
      fail(std::string("expected ") + what + " (non-integer indices are not allowed)");
    }
    const std::string digits(s_.substr(start, pos_ - start));
    if (digits.size() > 9) {
      pos_ = start;
      fail("integer too large");
    }
    const unsigned long v = std::stoul(digits);
    if (v == 0) {
      pos_ = start;
      fail(std::string("expected ") + what + ", got 0");
    }
    return v;
  }

  /// Signed decimal literal at the cursor, as an exact rational.
  Rational number() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    try {
      return ExactDecimal::parse(s_.substr(start, pos_ - start)).to_rational();
    } catch (const ParseError& err) {
      throw ParseError("malformed number", start + err.position());
    }
  }

  /// Parameter of pow/scale: a signed literal, optionally "p/q".
  Rational rational_param() {
    Rational v = number();
    if (accept('/')) v /= Rational(positive_integer("a positive denominator"));
    return v;
  }

  Expr primary(bool& bare_literal) {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      bare_literal = true;
      return expr::constant(number());
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string word(s_.substr(start, pos_ - start));
      if (word == "a") {
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("expected a variable index");
        return expr::var(positive_integer("a variable index"));
      }
      if (word == "root") {
        expect('(');
        const unsigned long n = positive_integer("a positive integer root index");
        expect(',');
        Expr e = sum();
        expect(')');
        return expr::root_n(e, n);
      }
      if (word == "pow" || word == "scale") {
        expect('(');
        Rational x = rational_param();
        expect(',');
        Expr e = sum();
        expect(')');
        return word == "pow" ? expr::pow_x(e, std::move(x)) : expr::scale_x(e, std::move(x));
      }
      pos_ = start;
      fail("unknown operator '" + word + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse_expr(std::string_view text) { return detail::ExprParser(text).parse(); }

namespace detail {

inline Real eval_node(const Expr& e, const RealTuple& t) {
  switch (e->kind) {
    case NodeKind::Var: return t[e->index - 1];
    case NodeKind::Const: return Real(e->q);
    case NodeKind::Add: {
      Real s = eval_node(e->children[0], t);
      for (std::size_t i = 1; i < e->children.size(); ++i) s += eval_node(e->children[i], t);
      return s;
    }
    case NodeKind::Mul: {
      Real p = eval_node(e->children[0], t);
      for (std::size_t i = 1; i < e->children.size(); ++i) p *= eval_node(e->children[i], t);
      return p;
    }
    case NodeKind::DivN: return eval_node(e->children[0], t) / Real(static_cast<long long>(e->n));
    case NodeKind::RootN: return nth_root(eval_node(e->children[0], t), static_cast<unsigned>(e->n));
    case NodeKind::PowX: return pow(eval_node(e->children[0], t), e->q);
    case NodeKind::ScaleX: return Real(e->q) * eval_node(e->children[0], t);
  }
  throw UsageError("corrupt expression node");
}

}  // namespace detail

inline Real evaluate(const Expr& e, const RealTuple& t) {
  const std::size_t k = expr_arity(e);
  if (k != 0 && t.size() != k) {
    throw ArityError("expression has arity " + std::to_string(k) + ", got " + std::to_string(t.size()) + " values");
  }
  return detail::eval_node(e, t);
}

/// Swaps Add/Mul, DivN/RootN and PowX/ScaleX. An involution.
inline Expr dualize(const Expr& e) {
  std::vector<Expr> kids;
  kids.reserve(e->children.size());
  for (const auto& c : e->children) kids.push_back(dualize(c));
  switch (e->kind) {
    case NodeKind::Var:
    case NodeKind::Const: return e;
    case NodeKind::Add: return expr::mul(std::move(kids));
    case NodeKind::Mul: return expr::add(std::move(kids));
    case NodeKind::DivN: return expr::root_n(kids[0], e->n);
    case NodeKind::RootN: return expr::div_n(kids[0], e->n);
    case NodeKind::PowX: return expr::scale_x(kids[0], e->q);
    case NodeKind::ScaleX: return expr::pow_x(kids[0], e->q);
  }
  throw UsageError("corrupt expression node");
}

namespace detail {

inline bool is_const(const Expr& e) { return e->kind == NodeKind::Const; }

inline Expr simplify_once(const Expr& e) {
  std::vector<Expr> kids;
  kids.reserve(e->children.size());
  for (const auto& c : e->children) kids.push_back(simplify_once(c));

  switch (e->kind) {
    case NodeKind::Var:
    case NodeKind::Const: return e;

    case NodeKind::Add: {
      std::vector<Expr> rest;
      Rational c = 0;
      bool any_const = false;
      for (const auto& k : kids) {
        const auto& parts = k->kind == NodeKind::Add ? k->children : std::vector<Expr>{k};
        for (const auto& p : parts) {
          if (is_const(p)) {
            c += p->q;
            any_const = true;
          } else {
            rest.push_back(p);
          }
        }
      }
      if (any_const && (c != 0 || rest.empty())) rest.push_back(expr::constant(c));
      if (rest.size() == 1) return rest[0];
      return expr::add(std::move(rest));
    }

    case NodeKind::Mul: {
      std::vector<Expr> rest;
      Rational factor = 1;
      for (const auto& k : kids) {
        const auto& parts = k->kind == NodeKind::Mul ? k->children : std::vector<Expr>{k};
        for (const auto& p : parts) {
          if (is_const(p)) {
            factor *= p->q;
          } else if (p->kind == NodeKind::ScaleX) {
            factor *= p->q;
            rest.push_back(p->children[0]);
          } else {
            rest.push_back(p);
          }
        }
      }
      if (rest.empty()) return expr::constant(factor);
      Expr body = rest.size() == 1 ? rest[0] : expr::mul(std::move(rest));
      return factor == 1 ? body : expr::scale_x(body, factor);
    }

    case NodeKind::DivN: {
      const Expr& c = kids[0];
      if (e->n == 1) return c;
      if (is_const(c)) return expr::constant(Rational(c->q / Rational(e->n)));
      if (c->kind == NodeKind::DivN) return expr::div_n(c->children[0], c->n * e->n);
      if (c->kind == NodeKind::ScaleX) return expr::scale_x(c->children[0], Rational(c->q / Rational(e->n)));
      return expr::div_n(c, e->n);
    }

    case NodeKind::RootN: {
      const Expr& c = kids[0];
      const auto n = static_cast<unsigned>(e->n);
      if (n == 1) return c;
      if (c->kind == NodeKind::RootN) return expr::root_n(c->children[0], c->n * e->n);
      if (is_const(c)) {
        if (c->q.sign() >= 0) {
          if (auto r = exact_root(c->q, n)) return expr::constant(*r);
        } else if (n % 2 == 1) {
          if (auto r = exact_root(Rational(-c->q), n)) return expr::constant(Rational(-*r));
        }
      }
      if (c->kind == NodeKind::ScaleX) {
        const Rational& x = c->q;
        // root(n, x*E) = x^(1/n) * root(n, E); valid for x > 0, and for x < 0 when n is odd.
        if (x.sign() > 0 || n % 2 == 1) {
          if (auto r = exact_root(x.sign() > 0 ? x : Rational(-x), n)) {
            return expr::scale_x(expr::root_n(c->children[0], e->n), x.sign() > 0 ? *r : Rational(-*r));
          }
        }
      }
      return expr::root_n(c, e->n);
    }

    case NodeKind::PowX: {
      const Expr& c = kids[0];
      if (e->q == 1) return c;
      if (is_const(c)) {
        try {
          const Real v = pow(Real(c->q), e->q);
          if (v.exact()) return expr::constant(v.rational());
        } catch (const DomainError&) {
        }
      }
      return expr::pow_x(c, e->q);
    }

    case NodeKind::ScaleX: {
      const Expr& c = kids[0];
      if (e->q == 1) return c;
      if (e->q == 0) return expr::constant(0);
      if (is_const(c)) return expr::constant(Rational(c->q * e->q));
      if (c->kind == NodeKind::ScaleX) {
        const Rational x = c->q * e->q;
        return x == 1 ? c->children[0] : expr::scale_x(c->children[0], x);
      }
      return expr::scale_x(c, e->q);
    }
  }
  throw UsageError("corrupt expression node");
}

}  // namespace detail

/// Applies the rewrite rules until nothing changes. Idempotent.
inline Expr simplify(const Expr& e) {
  Expr cur = e;
  for (int i = 0; i < 1000; ++i) {
    Expr next = detail::simplify_once(cur);
    if (structurally_equal(next, cur)) return next;
    cur = next;
  }
  return cur;
}

/// Wraps an expression as a MeanFunction of fixed arity. The domain is the
/// set of tuples in `box` where evaluation is defined.
inline MeanFunction as_mean_function(const Expr& e, const DomainBox& box) {
  const std::size_t k = expr_arity(e);
  if (k < 2) throw ArityError("a mean expression needs at least two variables, got " + std::to_string(k));
  const Arity arity = Arity::fixed(k);
  auto eval = [e](const RealTuple& t) { return evaluate(e, t); };
  auto domain = [e, box = box.with_arity(arity)](const RealTuple& t) {
    if (!box.contains(t)) return false;
    try {
      (void)detail::eval_node(e, t);
      return true;
    } catch (const DomainError&) {
      return false;
    }
  };
  return MeanFunction("expr(" + render(e) + ")", arity, box.with_arity(arity), domain, eval);
}

}  // namespace quasimean
