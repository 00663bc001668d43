#pragma once

#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "quasimean/catalog.hpp"
#include "quasimean/classify.hpp"
#include "quasimean/expr.hpp"
#include "quasimean/iterate.hpp"
#include "quasimean/measures.hpp"
#include "quasimean/report.hpp"
#include "quasimean/stats.hpp"

namespace quasimean::cli {

enum ExitCode : int { kOk = 0, kFalsified = 1, kDomain = 2, kUsage = 64 };

struct RunConfig {
  std::string box;
  std::size_t arity = 0;
  std::size_t budget = 10000;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  double tol = kDefaultTol;
  std::size_t max_steps = kDefaultMaxSteps;
  std::string format;
  std::string out;
};

/// "lo:hi", optionally bracketed as in "(0:1]"; inf ends are open.
inline DomainBox parse_box(std::string text, Arity arity) {
  bool lo_open = false, hi_open = false;
  if (!text.empty() && (text.front() == '(' || text.front() == '[')) {
    lo_open = text.front() == '(';
    text.erase(0, 1);
  }
  if (!text.empty() && (text.back() == ')' || text.back() == ']')) {
    hi_open = text.back() == ')';
    text.pop_back();
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--box expects lo:hi, got '" + text + "'");
  auto bound = [](const std::string& s, bool& open) {
    if (s == "inf" || s == "+inf") {
      open = true;
      return decimal_from_double(std::numeric_limits<double>::infinity());
    }
    if (s == "-inf") {
      open = true;
      return decimal_from_double(-std::numeric_limits<double>::infinity());
    }
    try {
      return Real::parse(s);
    } catch (const ParseError&) {
      throw UsageError("--box bound '" + s + "' is not a number");
    }
  };
  const Real lo = bound(text.substr(0, colon), lo_open);
  const Real hi = bound(text.substr(colon + 1), hi_open);
  if (compare(lo, hi) > 0) throw UsageError("--box lower bound exceeds upper bound");
  return DomainBox::checked({lo, hi, lo_open, hi_open, arity});
}

inline Real parse_value(const std::string& s) {
  try {
    return Real::parse(s);
  } catch (const ParseError&) {
    throw UsageError("'" + s + "' is not a decimal number");
  }
}

inline RealTuple parse_values(const std::vector<std::string>& xs) {
  std::vector<Real> v;
  for (const auto& x : xs) v.push_back(parse_value(x));
  return RealTuple(std::move(v));
}

/// The entry with --arity and --box applied.
inline CatalogEntry configured_entry(const std::string& id, const RunConfig& cfg) {
  CatalogEntry e = make_entry(id);
  if (cfg.arity) {
    if (!e.function.arity().accepts(cfg.arity)) {
      throw UsageError(id + " does not accept arity " + std::to_string(cfg.arity));
    }
    e.function = e.function.restricted(cfg.arity);
  }
  return e;
}

inline std::optional<DomainBox> configured_box(const RunConfig& cfg, const MeanFunction& k) {
  if (cfg.box.empty()) return std::nullopt;
  return parse_box(cfg.box, k.arity());
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Quasi-means: evaluate, classify, measure, iterate, dualize"};
    app.require_subcommand(1);
    RunConfig cfg;
    auto common = [&cfg](CLI::App* c, bool randomized) {
      c->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv", "pretty"}));
      c->add_option("--out", cfg.out, "Write output to this path");
      if (randomized) {
        c->add_option("--box", cfg.box, "Domain box lo:hi");
        c->add_option("--arity", cfg.arity, "Fixed arity n");
        c->add_option("--budget", cfg.budget, "Evaluation budget");
        c->add_option("--seed", cfg.seed, "Random seed");
      }
    };

    std::string id, id2, measure, mode, formula, csv_path, column, estimators = "bessel-plus";
    std::vector<std::string> values;
    bool simplify_flag = false, check_mean_flag = false;
    int precision = 0;

    auto* eval = app.add_subcommand("eval", "Evaluate a catalog mean at a tuple");
    eval->add_option("id", id, "Catalog id")->required();
    eval->add_option("values", values, "Tuple entries")->required()->allow_extra_args();
    common(eval, false);

    auto* classify_cmd = app.add_subcommand("classify", "Run every property check and the declared matrix");
    classify_cmd->add_option("id", id, "Catalog id")->required();
    common(classify_cmd, true);

    auto* measure_cmd = app.add_subcommand("measure", "Estimate mdist, mdistp, mdista or quasi constants");
    measure_cmd->add_option("measure", measure, "Measure")
        ->required()
        ->check(CLI::IsMember({"mdist", "mdistp", "mdista", "a-quasi", "m-quasi"}));
    measure_cmd->add_option("id", id, "Catalog id")->required();
    measure_cmd->add_option("--samples", cfg.samples, "Monte Carlo samples for mdista");
    common(measure_cmd, true);

    auto* iterate_cmd = app.add_subcommand("iterate", "Iteration traces");
    iterate_cmd->add_option("mode", mode, "Iteration")
        ->required()
        ->check(CLI::IsMember({"compound", "closure", "extend3", "bessel-onset"}));
    iterate_cmd->add_option("args", values, "Ids and start values")->allow_extra_args();
    iterate_cmd->add_option("--tol", cfg.tol, "Convergence tolerance");
    iterate_cmd->add_option("--max-steps", cfg.max_steps, "Step limit");
    iterate_cmd->add_option("--csv", csv_path, "Sequence from a CSV file (bessel-onset)");
    iterate_cmd->add_option("--column", column, "CSV column (bessel-onset)");
    common(iterate_cmd, false);

    auto* dualize_cmd = app.add_subcommand("dualize", "Dual of a mean formula");
    dualize_cmd->add_option("formula", formula, "Formula over a1..an")->required();
    dualize_cmd->add_flag("--simplify", simplify_flag, "Simplify the dual");
    dualize_cmd->add_flag("--check-mean", check_mean_flag, "Test whether the dual is a mean");
    common(dualize_cmd, true);

    auto* stats_cmd = app.add_subcommand("stats", "Apply estimators to a CSV column");
    stats_cmd->add_option("csv", csv_path, "CSV file with a header row")->required();
    stats_cmd->add_option("column", column, "Column name")->required();
    stats_cmd->add_option("--estimators", estimators, "Comma-separated catalog ids");
    stats_cmd->add_option("--precision", precision, "m for resolution-indexed estimators");
    common(stats_cmd, false);

    auto* list_cmd = app.add_subcommand("list", "List catalog entries");
    common(list_cmd, false);

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      out_ << app.help();
      return kOk;
    } catch (const CLI::ParseError& e) {
      err_ << "usage error: " << e.what() << "\n";
      return kUsage;
    }

    try {
      if (*eval) return cmd_eval(id, values, cfg);
      if (*classify_cmd) return cmd_classify(id, cfg);
      if (*measure_cmd) return cmd_measure(measure, id, cfg);
      if (*iterate_cmd) return cmd_iterate(mode, values, csv_path, column, cfg);
      if (*dualize_cmd) return cmd_dualize(formula, simplify_flag, check_mean_flag, cfg);
      if (*stats_cmd) return cmd_stats(csv_path, column, estimators, precision, cfg);
      if (*list_cmd) return cmd_list(cfg);
    } catch (const UsageError& e) {
      err_ << "usage error: " << e.what() << "\n";
      return kUsage;
    } catch (const ParseError& e) {
      err_ << "parse error: " << e.what() << "\n";
      return kUsage;
    } catch (const Error& e) {
      err_ << "error: " << e.what() << "\n";
      return kDomain;
    }
    return kUsage;
  }

 private:
  std::ostream& out_;
  std::ostream& err_;

  int emit(const std::string& text, const RunConfig& cfg) {
    if (cfg.out.empty()) {
      out_ << text;
      return kOk;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw UsageError("cannot write " + cfg.out);
    f << text;
    return kOk;
  }

  int emit(const Json& j, const RunConfig& cfg) { return emit(j.dump(2) + "\n", cfg); }

  int cmd_eval(const std::string& id, const std::vector<std::string>& values, const RunConfig& cfg) {
    const MeanFunction k = make_mean(id);
    const RealTuple t = parse_values(values);
    const Real v = k(t);
    if (cfg.format == "json") {
      Json j = envelope("eval");
      j["id"] = k.id();
      j["input"] = to_json(t);
      j["value"] = v.render();
      j["exact"] = v.exact();
      j["mean_like"] = is_mean_like_value(t, v);
      return emit(j, cfg);
    }
    return emit(v.render() + "\n", cfg);
  }

  int cmd_classify(const std::string& id, const RunConfig& cfg) {
    const CatalogEntry e = configured_entry(id, cfg);
    const ClassificationReport r = classify(e, cfg.budget, cfg.seed, configured_box(cfg, e.function));
    if (cfg.format == "pretty") {
      std::ostringstream os;
      os << r.id << " on " << r.box << " (budget " << r.budget << ", seed " << r.seed << ")\n";
      for (const auto& row : r.matrix) {
        os << "  " << (row.agrees() ? "ok       " : "MISMATCH ") << property_name(row.property) << ": declared "
           << (row.declared_holds ? "holds" : "fails") << ", tested " << status_name(row.verdict.status);
        if (!row.verdict.witness.empty()) os << " [" << row.verdict.detail << "]";
        os << "\n";
      }
      emit(os.str(), cfg);
    } else {
      emit(to_json(r), cfg);
    }
    return r.declared_falsified() ? kFalsified : kOk;
  }

  int cmd_measure(const std::string& measure, const std::string& id, const RunConfig& cfg) {
    const CatalogEntry e = configured_entry(id, cfg);
    const DomainBox box = configured_box(cfg, e.function).value_or(e.function.box());
    Json j = envelope("measure");
    j["measure"] = measure;
    j["id"] = e.function.id();
    if (measure == "mdista") {
      std::size_t n = cfg.arity ? cfg.arity : (e.function.arity().variadic ? 2 : e.function.arity().n);
      const MeanFunction k = e.function.arity().variadic ? e.function.restricted(n) : e.function;
      const DomainBox fixed = box.with_arity(Arity::fixed(n));
      j["box"] = fixed.describe();
      j["estimate"] = to_json(mdista(k, fixed, cfg.samples, cfg.seed));
      return emit(j, cfg);
    }
    j["box"] = box.with_arity(e.function.arity()).describe();
    SupEstimate s;
    if (measure == "mdist") s = mdist(e.function, box, cfg.budget, cfg.seed);
    if (measure == "mdistp") s = mdistp(e.function, box, cfg.budget, cfg.seed);
    if (measure == "a-quasi") s = a_quasi_constant(e.function, box, cfg.budget, cfg.seed);
    if (measure == "m-quasi") s = m_quasi_constant(e.function, box, cfg.budget, cfg.seed);
    j["estimate"] = to_json(s);
    return emit(j, cfg);
  }

  int cmd_iterate(const std::string& mode, const std::vector<std::string>& args, const std::string& csv_path,
                  const std::string& column, const RunConfig& cfg) {
    auto need = [&](std::size_t n, const char* shape) {
      if (args.size() != n) throw UsageError("iterate " + mode + " expects " + shape);
    };
    if (mode == "bessel-onset") return cmd_onset(args, csv_path, column, cfg);
    IterationTrace tr;
    Json j = envelope("iteration");
    j["mode"] = mode;
    if (mode == "compound") {
      need(4, "K M a b");
      tr = compound(make_mean(args[0]), make_mean(args[1]), parse_value(args[2]), parse_value(args[3]), cfg.tol,
                    cfg.max_steps);
      j["ids"] = {args[0], args[1]};
    } else if (mode == "closure") {
      need(3, "K a b");
      tr = idempotent_closure(make_mean(args[0]), parse_value(args[1]), parse_value(args[2]), cfg.tol, cfg.max_steps);
      j["ids"] = {args[0]};
    } else {
      need(4, "K a b c");
      tr = extend3(make_mean(args[0]), parse_value(args[1]), parse_value(args[2]), parse_value(args[3]), cfg.tol,
                   cfg.max_steps);
      j["ids"] = {args[0]};
    }
    if (cfg.format == "csv") return emit(trace_csv(tr), cfg);
    Json rows = Json::array();
    for (const auto& r : tr.rows) rows.push_back(to_json(r));
    j["result"] = to_json(tr);
    j["rows"] = rows;
    if (cfg.format == "pretty") return emit(trace_csv(tr) + j["result"].dump() + "\n", cfg);
    return emit(j, cfg);
  }

  int cmd_onset(const std::vector<std::string>& args, const std::string& csv_path, const std::string& column,
                const RunConfig& cfg) {
    std::vector<Real> seq;
    if (!csv_path.empty()) {
      if (column.empty()) throw UsageError("--csv needs --column");
      std::ifstream f(csv_path);
      if (!f) throw UsageError("cannot read " + csv_path);
      seq = csv_column(f, column);
    } else {
      for (const auto& a : args) seq.push_back(parse_value(a));
    }
    const OnsetResult r = bessel_onset(seq);
    Json j = envelope("bessel-onset");
    j["length"] = seq.size();
    j["onset"] = r.index ? Json(*r.index) : Json(nullptr);
    j["found"] = r.index.has_value();
    j["persists"] = r.persists;
    return emit(j, cfg);
  }

  int cmd_dualize(const std::string& formula, bool simplify_flag, bool check_mean_flag, const RunConfig& cfg) {
    const Expr e = parse_expr(formula);
    Expr d = dualize(e);
    if (simplify_flag) d = simplify(d);
    Json j = envelope("dualize");
    j["input"] = render(e);
    j["dual"] = render(d);
    j["ast"] = to_json(d);
    if (check_mean_flag) {
      const std::size_t n = expr_arity(d);
      const Arity arity = Arity::fixed(n);
      const DomainBox box = cfg.box.empty() ? DomainBox::open(0, 10, arity) : parse_box(cfg.box, arity);
      const MeanFunction k = as_mean_function(d, box);
      const PropertyVerdict v = check_mean(k, CheckContext::plain(k, cfg.budget, cfg.seed));
      j["check_mean"] = to_json(v);
    }
    if (cfg.format == "pretty") {
      std::string text = render(d) + "\n";
      if (check_mean_flag) text += "mean: " + j["check_mean"]["status"].get<std::string>() + "\n";
      return emit(text, cfg);
    }
    return emit(j, cfg);
  }

  int cmd_stats(const std::string& path, const std::string& column, const std::string& estimators, int precision,
                const RunConfig& cfg) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read " + path);
    const RealTuple data(csv_column(f, column));
    std::vector<std::string> names;
    std::stringstream ss(estimators);
    for (std::string s; std::getline(ss, s, ',');) {
      if (!s.empty()) names.push_back(s);
    }
    Json j = envelope("stats");
    j["column"] = column;
    j["n"] = data.size();
    j["precision"] = precision;
    Json rs = Json::array();
    std::ostringstream pretty;
    for (const auto& name : names) {
      const EstimatorResult r = apply_estimator(name, data, precision);
      Json e;
      e["estimator"] = r.id;
      e["value"] = r.value ? Json(r.value->render()) : Json(nullptr);
      e["mean_like"] = r.value ? Json(r.mean_like) : Json(nullptr);
      if (!r.error.empty()) e["error"] = r.error;
      rs.push_back(e);
      pretty << r.id << " = " << (r.value ? r.value->render() : "undefined (" + r.error + ")")
             << (r.value ? (r.mean_like ? "  mean-like" : "  NOT mean-like") : "") << "\n";
    }
    j["estimates"] = rs;
    if (cfg.format == "pretty") return emit(pretty.str(), cfg);
    return emit(j, cfg);
  }

  int cmd_list(const RunConfig& cfg) {
    if (cfg.format == "pretty") {
      std::ostringstream os;
      for (const auto& [name, params] : catalog_names()) {
        os << name;
        for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "&" : "?") << params[i] << "=...";
        os << "\n";
      }
      return emit(os.str(), cfg);
    }
    return emit(catalog_json(), cfg);
  }
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return Runner(out, err).run(argc, argv);
}

}  // namespace quasimean::cli
