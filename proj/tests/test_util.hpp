#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "quasimean/real.hpp"
#include "quasimean/tuple.hpp"

namespace qmtest {

inline quasimean::Real R(const std::string& s) { return quasimean::Real::parse(s); }

inline quasimean::RealTuple T(std::initializer_list<const char*> xs) {
  std::vector<quasimean::Real> v;
  for (const char* x : xs) v.push_back(R(x));
  return quasimean::RealTuple(std::move(v));
}

/// Exact rational p/q as a Real.
inline quasimean::Real Q(long long p, long long q) { return quasimean::Real(quasimean::Rational(p, q)); }

inline bool same(const quasimean::Real& a, const quasimean::Real& b) { return compare(a, b) == 0; }

}  // namespace qmtest
