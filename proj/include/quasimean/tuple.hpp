#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quasimean/error.hpp"
#include "quasimean/real.hpp"

namespace quasimean {

/// A finite, nonempty, ordered tuple (a_1, ..., a_n).
class RealTuple {
 public:
  explicit RealTuple(std::vector<Real> values) : values_(std::move(values)) {
    if (values_.empty()) throw ArityError("a tuple needs at least one entry");
    for (const auto& v : values_) {
      if (!v.finite()) throw DomainError("tuple entries must be finite");
    }
  }
  RealTuple(std::initializer_list<Real> values) : RealTuple(std::vector<Real>(values)) {}

  /// Parses each entry as a decimal ("2.1", "-3e-2", ...).
  static RealTuple parse(std::span<const std::string> texts) {
    std::vector<Real> v;
    v.reserve(texts.size());
    for (const auto& t : texts) v.push_back(Real::parse(t));
    return RealTuple(std::move(v));
  }

  std::size_t size() const noexcept { return values_.size(); }
  const Real& operator[](std::size_t i) const { return values_[i]; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }
  const std::vector<Real>& values() const noexcept { return values_; }

  bool all_exact() const {
    for (const auto& v : values_) {
      if (!v.exact()) return false;
    }
    return true;
  }

  /// All entries equal.
  bool constant() const {
    for (const auto& v : values_) {
      if (compare(v, values_.front()) != 0) return false;
    }
    return true;
  }

  std::string render() const {
    std::string out = "(";
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (i) out += ", ";
      out += values_[i].render();
    }
    return out + ")";
  }

  friend bool operator==(const RealTuple& a, const RealTuple& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (compare(a[i], b[i]) != 0) return false;
    }
    return true;
  }

 private:
  std::vector<Real> values_;
};

}  // namespace quasimean
