#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "quasimean/catalog.hpp"
#include "quasimean/error.hpp"
#include "quasimean/means.hpp"
#include "quasimean/real.hpp"
#include "quasimean/tuple.hpp"

namespace quasimean {

/// RFC 4180 records: quoted fields, doubled quotes, CRLF or LF line ends,
/// line breaks inside quotes.
inline std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, field_started = false, any = false;
  char ch;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    any = false;
  };
  while (in.get(ch)) {
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    any = true;
    if (ch == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (ch == ',') {
      end_field();
    } else if (ch == '\r' && in.peek() == '\n') {
      continue;
    } else if (ch == '\n') {
      end_row();
    } else {
      field += ch;
      field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field in CSV", rows.size() + 1);
  if (any) end_row();
  return rows;
}

/// The named column of a CSV with a header row, parsed as decimals.
/// Rows are numbered from 1 with the header as row 1.
inline std::vector<Real> csv_column(std::istream& in, const std::string& column) {
  const auto rows = read_csv(in);
  if (rows.empty()) throw DomainError("CSV has no header row");
  const auto& header = rows.front();
  std::optional<std::size_t> idx;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) idx = i;
  }
  if (!idx) throw UsageError("no column named '" + column + "' in CSV header");
  std::vector<Real> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    const std::string cell = *idx < row.size() ? row[*idx] : std::string();
    try {
      out.push_back(Real::parse(cell));
    } catch (const ParseError&) {
      throw DomainError("row " + std::to_string(r + 1) + ": '" + cell + "' is not a number");
    }
  }
  return out;
}

struct EstimatorResult {
  std::string id;
  std::optional<Real> value;
  bool mean_like = false;
  std::string error;
};

/// Resolution-indexed families take m from `precision` when no m is given.
inline std::string resolve_estimator(const std::string& name, int precision) {
  if (name.find('?') != std::string::npos) return name;
  static const std::vector<std::string> scaled{"floor-arith", "ceil-arith",  "shifted-floor",
                                               "shifted-ceil", "star-arith", "floor-geometric"};
  for (const auto& s : scaled) {
    if (name == s) return name + "?m=" + std::to_string(precision);
  }
  return name;
}

inline EstimatorResult apply_estimator(const std::string& name, const RealTuple& data, int precision) {
  EstimatorResult r;
  r.id = resolve_estimator(name, precision);
  const MeanFunction k = make_mean(r.id);
  try {
    r.value = k(data);
    r.mean_like = is_mean_like_value(data, *r.value);
  } catch (const DomainError& e) {
    r.error = e.what();
  } catch (const ArityError& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace quasimean
