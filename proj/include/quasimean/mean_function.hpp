#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "quasimean/domain.hpp"
#include "quasimean/error.hpp"
#include "quasimean/tuple.hpp"

namespace quasimean {

/// A named real function of tuples with an arity, a domain predicate and a
/// natural sampling box. The box only guides sampling; membership is decided
/// by arity plus the predicate.
class MeanFunction {
 public:
  using Eval = std::function<Real(const RealTuple&)>;
  using Predicate = std::function<bool(const RealTuple&)>;

  MeanFunction(std::string id, Arity arity, DomainBox box, Predicate domain, Eval eval)
      : id_(std::move(id)), arity_(arity), box_(box.with_arity(arity)),
        domain_(std::move(domain)), eval_(std::move(eval)) {
    if (!eval_) throw UsageError("mean function '" + id_ + "' has no evaluator");
  }

  /// Domain is everything of the right arity; the evaluator may still throw DomainError.
  MeanFunction(std::string id, Arity arity, DomainBox box, Eval eval)
      : MeanFunction(std::move(id), arity, box, nullptr, std::move(eval)) {}

  const std::string& id() const noexcept { return id_; }
  Arity arity() const noexcept { return arity_; }
  const DomainBox& box() const noexcept { return box_; }

  bool in_domain(const RealTuple& t) const {
    if (!arity_.accepts(t.size())) return false;
    return !domain_ || domain_(t);
  }

  Real operator()(const RealTuple& t) const {
    if (!arity_.accepts(t.size())) {
      throw ArityError(id_ + " expects arity " + arity_.describe() + ", got " + std::to_string(t.size()));
    }
    if (domain_ && !domain_(t)) throw DomainError(t.render() + " is outside Dom " + id_);
    return eval_(t);
  }

  /// Value, or nullopt for tuples outside the domain (including evaluator DomainErrors).
  std::optional<Real> try_eval(const RealTuple& t) const {
    if (!in_domain(t)) return std::nullopt;
    try {
      return eval_(t);
    } catch (const DomainError&) {
      return std::nullopt;
    }
  }

  /// K|_n: the same function restricted to n arguments.
  MeanFunction restricted(std::size_t n) const {
    if (!arity_.accepts(n)) throw ArityError(id_ + " is not defined for " + std::to_string(n) + " arguments");
    MeanFunction k = *this;
    k.arity_ = Arity::fixed(n);
    k.box_ = box_.with_arity(k.arity_);
    if (arity_.variadic) k.id_ = id_ + "|" + std::to_string(n);
    return k;
  }

  MeanFunction with_box(const DomainBox& box) const {
    MeanFunction k = *this;
    k.box_ = box.with_arity(arity_);
    return k;
  }

  MeanFunction renamed(std::string id) const {
    MeanFunction k = *this;
    k.id_ = std::move(id);
    return k;
  }

  /// Further restricts the domain with an extra predicate.
  MeanFunction restricted_to(Predicate extra, std::string id) const {
    MeanFunction k = *this;
    k.id_ = std::move(id);
    k.domain_ = [base = domain_, extra = std::move(extra)](const RealTuple& t) {
      return (!base || base(t)) && extra(t);
    };
    return k;
  }

 private:
  std::string id_;
  Arity arity_;
  DomainBox box_;
  Predicate domain_;
  Eval eval_;
};

}  // namespace quasimean
