#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "quasimean/catalog.hpp"
#include "quasimean/classify.hpp"
#include "quasimean/iterate.hpp"
#include "quasimean/measures.hpp"
#include "quasimean/real.hpp"
#include "quasimean/tuple.hpp"

namespace quasimean {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "quasimean/1";

inline Json envelope(const std::string& kind) {
  Json j;
  j["schema"] = kSchema;
  j["kind"] = kind;
  return j;
}

inline Json to_json(const Real& x) { return x.render(); }

inline Json to_json(const RealTuple& t) {
  Json j = Json::array();
  for (const auto& x : t) j.push_back(x.render());
  return j;
}

inline Json to_json(const PropertyVerdict& v) {
  Json j;
  j["property"] = property_name(v.property);
  j["status"] = status_name(v.status);
  Json w = Json::array();
  for (const auto& t : v.witness) w.push_back(to_json(t));
  j["witness"] = w;
  j["detail"] = v.detail;
  j["samples"] = v.samples;
  j["seed"] = v.seed;
  if (v.constant) j["constant"] = v.constant->render();
  return j;
}

inline Json to_json(const ClassificationReport& r) {
  Json j = envelope("classification");
  j["id"] = r.id;
  j["box"] = r.box;
  j["budget"] = r.budget;
  j["seed"] = r.seed;
  Json m = Json::array();
  for (const auto& row : r.matrix) {
    Json e;
    e["property"] = property_name(row.property);
    e["declared"] = row.declared_holds;
    e["tested"] = status_name(row.verdict.status);
    e["agrees"] = row.agrees();
    e["witness"] = to_json(row.verdict)["witness"];
    m.push_back(e);
  }
  j["matrix"] = m;
  Json vs = Json::array();
  for (const auto& v : r.verdicts) vs.push_back(to_json(v));
  j["verdicts"] = vs;
  if (r.alternate) {
    Json a;
    a["class"] = class_name(r.alternate->first);
    a["verdict"] = to_json(r.alternate->second);
    j["alternate_reading"] = a;
  }
  j["declared_falsified"] = r.declared_falsified();
  j["matrix_agrees"] = r.matrix_agrees();
  return j;
}

inline Json to_json(const SupEstimate& s) {
  Json j;
  j["lower_bound"] = s.lower_bound.render();
  j["witness"] = s.witness ? to_json(*s.witness) : Json(nullptr);
  j["budget"] = s.budget;
  j["evaluated"] = s.evaluated;
  j["seed"] = s.seed;
  j["diverging"] = s.diverging;
  return j;
}

inline Json to_json(const MeasureEstimate& m) {
  Json j;
  j["value"] = m.value.render();
  j["half_width"] = m.half_width;
  j["samples"] = m.samples;
  j["seed"] = m.seed;
  j["above_max"] = m.above;
  j["below_min"] = m.below;
  return j;
}

inline Json to_json(const IterationTrace& t) {
  Json j;
  j["verdict"] = trace_verdict_name(t.verdict);
  j["steps"] = t.rows.empty() ? 0 : t.rows.size() - 1;
  j["limit"] = t.limit ? Json(t.limit->render()) : Json(nullptr);
  if (t.verdict == TraceVerdict::ConstantAfter) j["constant_after"] = t.constant_after;
  if (t.upper_bound) j["upper_bound"] = t.upper_bound->render();
  j["tol"] = t.tol;
  j["max_steps"] = t.max_steps;
  if (!t.detail.empty()) j["detail"] = t.detail;
  return j;
}

inline Json to_json(const FixedPointDecomposition& d) {
  Json j;
  j["b"] = d.b.render();
  j["scan"] = Json::array({d.scan_lower.render(), d.scan_upper.render()});
  Json f = Json::array();
  for (const auto& [lo, hi] : d.fixed) f.push_back(Json::array({lo.render(), hi.render()}));
  j["fixed"] = f;
  Json g = Json::array();
  for (const auto& gap : d.gaps) {
    Json e;
    e["interval"] = Json::array({gap.lower.render(), gap.upper.render()});
    e["sign"] = gap.sign;
    g.push_back(e);
  }
  j["gaps"] = g;
  return j;
}

/// step,a,b[,c] rows.
inline std::string trace_csv(const IterationTrace& t) {
  std::ostringstream os;
  const std::size_t width = t.rows.empty() ? 2 : t.rows.front().size();
  os << "step,a,b" << (width == 3 ? ",c" : "") << "\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    os << i;
    for (const auto& x : t.rows[i]) os << "," << x.render();
    os << "\n";
  }
  return os.str();
}

inline Json catalog_json() {
  Json j = envelope("catalog");
  Json es = Json::array();
  for (const auto& [name, params] : catalog_names()) {
    Json e;
    e["name"] = name;
    e["params"] = params;
    es.push_back(e);
  }
  j["entries"] = es;
  Json inst = Json::array();
  for (const auto& id : standard_instances()) {
    const CatalogEntry e = make_entry(id);
    Json x;
    x["id"] = e.id;
    x["class"] = class_name(e.declared_class);
    if (e.declared_class != DeclaredClass::Mean && e.declared_class != DeclaredClass::None) x["side"] = side_name(e.side);
    x["box"] = e.function.box().describe();
    Json claims = Json::array();
    for (const auto& c : e.claims()) claims.push_back({{"property", property_name(c.property)}, {"holds", c.holds}});
    x["claims"] = claims;
    if (e.quasi_constant) x["quasi_constant"] = Real(*e.quasi_constant).render();
    if (e.alternate_class) x["alternate_class"] = class_name(*e.alternate_class);
    if (!e.note.empty()) x["note"] = e.note;
    inst.push_back(x);
  }
  j["standard_instances"] = inst;
  return j;
}

}  // namespace quasimean
