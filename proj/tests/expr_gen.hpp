#pragma once

#include <cstdint>
#include <random>
#include <set>

#include "quasimean/expr.hpp"

namespace qmtest {

// Two formulas for the same three-variable mean of squares.
inline const char* const kSquareForm1 =
    "root(3, root(2, (pow(2, a1) + pow(2, a2))/2) * root(2, (pow(2, a2) + pow(2, a3))/2)"
    " * root(2, (pow(2, a3) + pow(2, a1))/2))";
inline const char* const kSquareForm2 =
    "root(6, ((pow(2, a1) + pow(2, a2)) * (pow(2, a2) + pow(2, a3)) * (pow(2, a3) + pow(2, a1)))/8)";

// Random trees over a1..a3 with positive constants and parameters, so every
// node is defined on positive tuples.
class TreeGen {
 public:
  explicit TreeGen(std::uint64_t seed) : gen_(seed) {}

  quasimean::Expr tree(int depth) {
    for (;;) {
      quasimean::Expr e = node(depth);
      std::set<std::size_t> vs;
      quasimean::collect_vars(e, vs);
      if (!vs.empty() && *vs.rbegin() == vs.size()) return e;
    }
  }

 private:
  int pick(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

  quasimean::Rational param() { return quasimean::Rational(1 + pick(5), 1 + pick(3)); }

  quasimean::Expr node(int depth) {
    namespace ex = quasimean::expr;
    if (depth == 0 || pick(4) == 0) {
      if (pick(5) == 0) return ex::constant(param());
      return ex::var(1 + static_cast<std::size_t>(pick(3)));
    }
    switch (pick(6)) {
      case 0: return ex::add({node(depth - 1), node(depth - 1)});
      case 1: return ex::mul({node(depth - 1), node(depth - 1)});
      case 2: return ex::div_n(node(depth - 1), 1 + static_cast<unsigned long>(pick(4)));
      case 3: return ex::root_n(node(depth - 1), 1 + static_cast<unsigned long>(pick(4)));
      case 4: return ex::pow_x(node(depth - 1), param());
      default: return ex::scale_x(node(depth - 1), param());
    }
  }

  std::mt19937_64 gen_;
};

}  // namespace qmtest
