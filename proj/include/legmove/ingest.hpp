#pragma once

// CSV ingestion and the two preprocessing steps applied before any learning:
// normalization of movement counts by awake time, and age banding.
//
// File format: UTF-8, comma-separated, header row first. Required columns are
// infant_id, visit_index, age_months and label; aims_score and awake_hours are
// optional. Every other column is a feature, in header order.

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "legmove/core.hpp"

namespace legmove {

namespace csv {

// One CSV line into fields. Double-quoted fields may contain commas and "" escapes.
inline std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace csv

struct AutoSchema {};

// Header columns are matched to `schema` by name; other non-reserved columns are ignored.
struct ExplicitSchema {
  FeatureSchema schema;
};

using SchemaMode = std::variant<AutoSchema, ExplicitSchema>;

inline constexpr std::array<std::string_view, 6> kReservedColumns = {
    "infant_id", "visit_index", "age_months", "label", "aims_score", "awake_hours"};

inline bool is_reserved_column(std::string_view name) {
  return std::find(kReservedColumns.begin(), kReservedColumns.end(), name) != kReservedColumns.end();
}

inline Dataset read_csv(std::istream& in, const SchemaMode& mode = AutoSchema{}, const std::string& source = "<csv>") {
  std::string line;
  std::size_t line_no = 0;
  auto located = [&](std::size_t row, const std::string& msg) {
    return Error(ErrorKind::Validation, source + ": row " + std::to_string(row) + ": " + msg);
  };

  // Header, skipping a UTF-8 BOM and blank lines.
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (csv::trim(line).empty()) continue;
    for (auto& h : csv::split_line(line)) header.push_back(csv::trim(h));
    break;
  }
  if (header.empty()) throw Error(ErrorKind::Validation, source + ": empty input, no header row");

  auto find_col = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  };
  for (std::size_t i = 0; i < header.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (header[i] == header[j]) throw Error(ErrorKind::Validation, source + ": duplicate column '" + header[i] + "'");

  for (std::string_view req : {"infant_id", "visit_index", "age_months", "label"})
    if (!find_col(req)) throw Error(ErrorKind::Validation, source + ": missing required column " + std::string(req));

  FeatureSchema schema;
  std::vector<std::size_t> feature_cols;
  if (std::holds_alternative<ExplicitSchema>(mode)) {
    schema = std::get<ExplicitSchema>(mode).schema;
    for (const auto& n : schema.names()) {
      auto c = find_col(n);
      if (!c) throw Error(ErrorKind::Validation, source + ": missing required column " + n);
      feature_cols.push_back(*c);
    }
  } else {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (is_reserved_column(header[i])) continue;
      if (header[i].empty()) throw Error(ErrorKind::Validation, source + ": empty column name at position " + std::to_string(i + 1));
      names.push_back(header[i]);
      feature_cols.push_back(i);
    }
    schema = FeatureSchema::from_names(std::move(names));
  }
  if (schema.size() == 0) throw Error(ErrorKind::Validation, source + ": no feature columns");

  const bool has_counts =
      std::any_of(schema.kinds().begin(), schema.kinds().end(), [](FeatureKind k) { return k == FeatureKind::Count; });
  const auto awake_col = find_col("awake_hours");
  if (has_counts && !awake_col)
    throw Error(ErrorKind::Validation, source + ": raw movement-count columns require column awake_hours");
  const auto aims_col = find_col("aims_score");
  const std::size_t id_col = *find_col("infant_id");
  const std::size_t visit_col = *find_col("visit_index");
  const std::size_t age_col = *find_col("age_months");
  const std::size_t label_col = *find_col("label");

  std::vector<SampleRecord> records;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    ++row;
    auto cells = csv::split_line(line);
    if (cells.size() != header.size())
      throw located(row, "expected " + std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()));
    auto number = [&](std::size_t col) -> double {
      auto v = parse_double(cells[col]);
      if (!v) {
        if (csv::trim(cells[col]).empty()) throw located(row, "column " + header[col] + ": missing value");
        throw located(row, "column " + header[col] + ": non-numeric value '" + cells[col] + "'");
      }
      return *v;
    };
    auto optional_number = [&](std::optional<std::size_t> col) -> std::optional<double> {
      if (!col || csv::trim(cells[*col]).empty()) return std::nullopt;
      return number(*col);
    };

    SampleRecord r;
    r.infant_id = csv::trim(cells[id_col]);
    if (r.infant_id.empty()) throw located(row, "column infant_id: missing value");
    const double visit = number(visit_col);
    if (visit != std::floor(visit) || visit < 1.0) throw located(row, "column visit_index: must be an integer >= 1");
    r.visit_index = static_cast<int>(visit);
    r.age_months = number(age_col);
    auto label = parse_label(csv::trim(cells[label_col]));
    if (!label) throw located(row, "column label: expected TD or AR, found '" + cells[label_col] + "'");
    r.label = *label;
    r.aims_score = optional_number(aims_col);
    r.awake_hours = optional_number(awake_col);
    if (has_counts && !r.awake_hours) throw located(row, "column awake_hours: missing value");
    r.features.reserve(feature_cols.size());
    for (auto c : feature_cols) r.features.push_back(number(c));
    try {
      validate_record(r, schema);
    } catch (const Error& e) {
      throw located(row, e.what());
    }
    records.push_back(std::move(r));
  }
  return Dataset(std::move(schema), std::move(records));
}

inline Dataset load_csv(const std::string& path, const SchemaMode& mode = AutoSchema{}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return read_csv(in, mode, path);
}

// Bit-stable writer: fixed column order and shortest round-trip numbers.
inline void write_csv(std::ostream& out, const Dataset& d) {
  out << "infant_id,visit_index,age_months,label,aims_score,awake_hours";
  for (const auto& n : d.schema().names()) out << ',' << csv::quote_if_needed(n);
  out << '\n';
  for (const auto& r : d.records()) {
    out << csv::quote_if_needed(r.infant_id) << ',' << r.visit_index << ',' << format_double(r.age_months) << ','
        << to_string(r.label) << ',';
    if (r.aims_score) out << format_double(*r.aims_score);
    out << ',';
    if (r.awake_hours) out << format_double(*r.awake_hours);
    for (double v : r.features) out << ',' << format_double(v);
    out << '\n';
  }
}

inline std::string to_csv_string(const Dataset& d) {
  std::ostringstream os;
  write_csv(os, d);
  return os.str();
}

inline void save_csv(const std::string& path, const Dataset& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  write_csv(out, d);
}

// Rate-column name for a raw count column.
inline std::string rate_name_for(const std::string& count_name) {
  const std::string from = "movement_count";
  auto pos = count_name.find(from);
  if (pos == std::string::npos) return count_name + "_per_awake_hour";
  return count_name.substr(0, pos) + "movements_per_awake_hour" + count_name.substr(pos + from.size());
}

// Count columns become counts / awake_hours with Rate kind; everything else is
// untouched. Datasets without count columns come back unchanged.
inline Dataset normalize_by_awake_time(const Dataset& d) {
  const auto& schema = d.schema();
  std::vector<std::size_t> count_cols;
  for (std::size_t j = 0; j < schema.size(); ++j)
    if (schema.kind(j) == FeatureKind::Count) count_cols.push_back(j);
  if (count_cols.empty()) return d;

  std::vector<std::string> names = schema.names();
  std::vector<FeatureKind> kinds = schema.kinds();
  for (auto j : count_cols) {
    names[j] = rate_name_for(names[j]);
    kinds[j] = FeatureKind::Rate;
  }
  FeatureSchema out_schema(std::move(names), std::move(kinds));

  std::vector<SampleRecord> records = d.records();
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& r = records[i];
    if (!r.awake_hours || !(*r.awake_hours > 0.0))
      throw Error(ErrorKind::Validation, "record " + std::to_string(i) + " (" + r.infant_id + " visit " +
                                             std::to_string(r.visit_index) + "): awake_hours must be positive");
    for (auto j : count_cols) r.features[j] /= *r.awake_hours;
  }
  return Dataset(std::move(out_schema), std::move(records), d.band());
}

struct BandSplit {
  Dataset zero_to_six;
  Dataset six_to_twelve;
  Dataset discarded;  // older than 12 months
};

inline BandSplit split_age_bands(const Dataset& d) {
  std::vector<SampleRecord> low, high, rest;
  for (const auto& r : d.records()) {
    if (age_in_band(r.age_months, AgeBand::ZeroToSix))
      low.push_back(r);
    else if (age_in_band(r.age_months, AgeBand::SixToTwelve))
      high.push_back(r);
    else
      rest.push_back(r);
  }
  return {Dataset(d.schema(), std::move(low), AgeBand::ZeroToSix),
          Dataset(d.schema(), std::move(high), AgeBand::SixToTwelve),
          Dataset(d.schema(), std::move(rest), AgeBand::Unbanded)};
}

// Same records, tagged with `band`; throws if any age falls outside it.
inline Dataset with_band(const Dataset& d, AgeBand band) { return Dataset(d.schema(), d.records(), band); }

}  // namespace legmove
