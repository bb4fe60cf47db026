#pragma once

// Domain types shared by every module: labels, feature schema, visit records,
// datasets, class weights, plus the small numeric helpers (seeded RNG, hashing,
// row-major matrix) the learners build on.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace legmove {

// ---------------------------------------------------------------------------
// Errors

enum class ErrorKind {
  Usage,              // bad flags / arguments
  Validation,         // malformed input data
  DegenerateDataset,  // e.g. a single-class training set
  Convergence,        // solver ran out of iterations
  Unsupported,        // operation not defined for this learner
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Label

// AR is the positive class. Every label tie in the library breaks toward AR.
enum class Label : std::uint8_t { TD = 0, AR = 1 };

inline constexpr Label kPositive = Label::AR;

inline std::string_view to_string(Label l) { return l == Label::AR ? "AR" : "TD"; }

inline std::optional<Label> parse_label(std::string_view s) {
  auto lower = [](char c) { return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c); };
  std::string t;
  for (char c : s) t.push_back(lower(c));
  if (t == "td") return Label::TD;
  if (t == "ar") return Label::AR;
  return std::nullopt;
}

// +1 for AR, -1 for TD.
inline double sign_of(Label l) { return l == Label::AR ? 1.0 : -1.0; }

// Sign decision; zero goes to AR.
inline Label label_from_score(double score) { return score >= 0.0 ? Label::AR : Label::TD; }

// ---------------------------------------------------------------------------
// Feature schema

enum class FeatureKind {
  Rate,       // movements per awake hour
  Count,      // raw movement total, awaiting normalization by awake time
  Percent,    // laterality percentage in [0, 100]
  DurationS,  // seconds, >= 0
  AccelG,     // acceleration, >= 0
  Real,       // unconstrained numeric column
};

inline std::string_view to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::Rate: return "rate";
    case FeatureKind::Count: return "count";
    case FeatureKind::Percent: return "percent";
    case FeatureKind::DurationS: return "duration_s";
    case FeatureKind::AccelG: return "accel_g";
    case FeatureKind::Real: return "real";
  }
  return "real";
}

inline std::optional<FeatureKind> parse_feature_kind(std::string_view s) {
  for (auto k : {FeatureKind::Rate, FeatureKind::Count, FeatureKind::Percent, FeatureKind::DurationS,
                 FeatureKind::AccelG, FeatureKind::Real})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

// Kind inferred from a column name. Used by the auto schema mode of the CSV reader.
inline FeatureKind infer_feature_kind(std::string_view name) {
  auto has = [&](std::string_view needle) { return name.find(needle) != std::string_view::npos; };
  if (has("pct_")) return FeatureKind::Percent;
  if (has("movement_count")) return FeatureKind::Count;
  if (has("per_awake_hour")) return FeatureKind::Rate;
  if (has("accel")) return FeatureKind::AccelG;
  if (has("duration")) return FeatureKind::DurationS;
  return FeatureKind::Real;
}

inline bool is_nonnegative_kind(FeatureKind k) {
  return k == FeatureKind::Rate || k == FeatureKind::Count || k == FeatureKind::DurationS ||
         k == FeatureKind::AccelG;
}

// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class FeatureSchema {
 public:
  FeatureSchema() = default;

  FeatureSchema(std::vector<std::string> names, std::vector<FeatureKind> kinds)
      : names_(std::move(names)), kinds_(std::move(kinds)) {
    if (names_.size() != kinds_.size())
      throw Error(ErrorKind::Validation, "feature schema: names and kinds differ in length");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) throw Error(ErrorKind::Validation, "feature schema: empty feature name");
      for (std::size_t j = 0; j < i; ++j)
        if (names_[i] == names_[j])
          throw Error(ErrorKind::Validation, "feature schema: duplicate feature '" + names_[i] + "'");
    }
  }

  // Names inferred kinds for every column.
  static FeatureSchema from_names(std::vector<std::string> names) {
    std::vector<FeatureKind> kinds;
    kinds.reserve(names.size());
    for (const auto& n : names) kinds.push_back(infer_feature_kind(n));
    return FeatureSchema(std::move(names), std::move(kinds));
  }

  // Per leg (L, R): rate, three laterality percentages, then mean/sd of
  // duration, average acceleration and peak acceleration. 20 slots.
  static FeatureSchema canonical() {
    std::vector<std::string> names;
    std::vector<FeatureKind> kinds;
    for (const char* leg : {"L", "R"}) {
      auto add = [&](const std::string& base, FeatureKind k) {
        names.push_back(base + "_" + leg);
        kinds.push_back(k);
      };
      add("movements_per_awake_hour", FeatureKind::Rate);
      add("pct_unilateral", FeatureKind::Percent);
      add("pct_bilateral_sync", FeatureKind::Percent);
      add("pct_bilateral_async", FeatureKind::Percent);
      add("mean_duration", FeatureKind::DurationS);
      add("sd_duration", FeatureKind::DurationS);
      add("mean_avg_accel", FeatureKind::AccelG);
      add("sd_avg_accel", FeatureKind::AccelG);
      add("mean_peak_accel", FeatureKind::AccelG);
      add("sd_peak_accel", FeatureKind::AccelG);
    }
    return FeatureSchema(std::move(names), std::move(kinds));
  }

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<FeatureKind>& kinds() const noexcept { return kinds_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  FeatureKind kind(std::size_t i) const { return kinds_.at(i); }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    return std::nullopt;
  }

  std::size_t require_index(std::string_view name) const {
    auto i = index_of(name);
    if (!i) throw Error(ErrorKind::Validation, "unknown feature '" + std::string(name) + "'");
    return *i;
  }

  // Laterality triples (unilateral, sync, async) present in this schema, one per leg.
  std::vector<std::array<std::size_t, 3>> laterality_triples() const {
    std::vector<std::array<std::size_t, 3>> out;
    for (const char* leg : {"L", "R"}) {
      std::string s(leg);
      auto u = index_of("pct_unilateral_" + s);
      auto b = index_of("pct_bilateral_sync_" + s);
      auto a = index_of("pct_bilateral_async_" + s);
      if (u && b && a) out.push_back({*u, *b, *a});
    }
    return out;
  }

  std::uint64_t fingerprint() const {
    std::uint64_t h = fnv1a("schema");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      h = fnv1a(names_[i], h);
      h = fnv1a(":", h);
      h = fnv1a(to_string(kinds_[i]), h);
      h = fnv1a(";", h);
    }
    return h;
  }

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<FeatureKind> kinds_;
};

// ---------------------------------------------------------------------------
// Records and datasets

struct SampleRecord {
  std::string infant_id;
  int visit_index = 1;
  double age_months = 0.0;
  Label label = Label::TD;
  std::optional<double> aims_score;
  std::vector<double> features;
  std::optional<double> awake_hours;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

// Content-derived ordering key. Every learner and the cross-validation loop
// iterate records in this order so results do not depend on input order.
inline bool record_less(const SampleRecord& a, const SampleRecord& b) {
  auto key = [](const SampleRecord& r) {
    return std::tie(r.infant_id, r.visit_index, r.age_months, r.features, r.label);
  };
  return key(a) < key(b);
}

inline constexpr double kLateralityTolerance = 0.5;

// Throws a Validation error naming the offending column if `r` breaks a
// SampleRecord invariant under `schema`.
inline void validate_record(const SampleRecord& r, const FeatureSchema& schema, const std::string& where = "") {
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::Validation, (where.empty() ? std::string() : where + ": ") + msg);
  };
  if (r.features.size() != schema.size())
    fail("feature vector has " + std::to_string(r.features.size()) + " values, schema has " +
         std::to_string(schema.size()));
  if (r.visit_index < 1) fail("column visit_index: must be >= 1");
  if (!(r.age_months >= 0.0) || !std::isfinite(r.age_months)) fail("column age_months: must be a non-negative number");
  if (r.aims_score && !(*r.aims_score >= 0.0)) fail("column aims_score: must be non-negative");
  if (r.awake_hours && !(*r.awake_hours > 0.0)) fail("column awake_hours: must be positive");
  for (std::size_t j = 0; j < schema.size(); ++j) {
    double v = r.features[j];
    const auto& col = schema.name(j);
    if (!std::isfinite(v)) fail("column " + col + ": not a finite number");
    FeatureKind k = schema.kind(j);
    if (k == FeatureKind::Percent && (v < 0.0 || v > 100.0)) fail("column " + col + ": percentage outside [0,100]");
    if (is_nonnegative_kind(k) && v < 0.0) fail("column " + col + ": negative value");
  }
  for (const auto& t : schema.laterality_triples()) {
    double s = r.features[t[0]] + r.features[t[1]] + r.features[t[2]];
    if (std::abs(s - 100.0) > kLateralityTolerance)
      fail("columns " + schema.name(t[0]) + "/" + schema.name(t[1]) + "/" + schema.name(t[2]) +
           ": laterality percentages sum to " + std::to_string(s) + ", expected 100");
  }
}

enum class AgeBand { ZeroToSix, SixToTwelve, Unbanded };

inline std::string_view to_string(AgeBand b) {
  switch (b) {
    case AgeBand::ZeroToSix: return "0-6";
    case AgeBand::SixToTwelve: return "6-12";
    case AgeBand::Unbanded: return "unbanded";
  }
  return "unbanded";
}

inline std::optional<AgeBand> parse_age_band(std::string_view s) {
  if (s == "0-6" || s == "ZeroToSix") return AgeBand::ZeroToSix;
  if (s == "6-12" || s == "SixToTwelve") return AgeBand::SixToTwelve;
  if (s == "unbanded" || s == "Unbanded") return AgeBand::Unbanded;
  return std::nullopt;
}

// 6.0 months belongs to the upper band.
inline bool age_in_band(double age, AgeBand band) {
  switch (band) {
    case AgeBand::ZeroToSix: return age >= 0.0 && age < 6.0;
    case AgeBand::SixToTwelve: return age >= 6.0 && age <= 12.0;
    case AgeBand::Unbanded: return true;
  }
  return true;
}

class Dataset {
 public:
  Dataset() = default;
  Dataset(FeatureSchema schema, std::vector<SampleRecord> records, AgeBand band = AgeBand::Unbanded)
      : schema_(std::move(schema)), records_(std::move(records)), band_(band) {
    for (std::size_t i = 0; i < records_.size(); ++i) {
      validate_record(records_[i], schema_, "record " + std::to_string(i));
      if (!age_in_band(records_[i].age_months, band_))
        throw Error(ErrorKind::Validation, "record " + std::to_string(i) + ": age " +
                                               std::to_string(records_[i].age_months) + " outside band " +
                                               std::string(to_string(band_)));
    }
  }

  const FeatureSchema& schema() const noexcept { return schema_; }
  const std::vector<SampleRecord>& records() const noexcept { return records_; }
  const SampleRecord& operator[](std::size_t i) const { return records_.at(i); }
  AgeBand band() const noexcept { return band_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  std::size_t count(Label l) const {
    return static_cast<std::size_t>(
        std::count_if(records_.begin(), records_.end(), [l](const SampleRecord& r) { return r.label == l; }));
  }

  // Copy holding the records at `indices`, in that order.
  Dataset subset(std::span<const std::size_t> indices) const {
    std::vector<SampleRecord> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(records_.at(i));
    Dataset d;
    d.schema_ = schema_;
    d.records_ = std::move(out);
    d.band_ = band_;
    return d;
  }

  // Copy with record `i` removed.
  Dataset without(std::size_t i) const {
    std::vector<std::size_t> idx;
    idx.reserve(records_.size());
    for (std::size_t j = 0; j < records_.size(); ++j)
      if (j != i) idx.push_back(j);
    return subset(idx);
  }

  // Positions of records sorted by record_less.
  std::vector<std::size_t> canonical_order() const {
    std::vector<std::size_t> idx(records_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return record_less(records_[a], records_[b]); });
    return idx;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  FeatureSchema schema_;
  std::vector<SampleRecord> records_;
  AgeBand band_ = AgeBand::Unbanded;
};

// ---------------------------------------------------------------------------
// Class weights

struct ClassWeights {
  double td_weight = 1.0;
  double ar_weight = 1.0;

  double of(Label l) const { return l == Label::AR ? ar_weight : td_weight; }
};

inline ClassWeights balanced_class_weights(std::size_t n_td, std::size_t n_ar) {
  if (n_td == 0 || n_ar == 0)
    throw Error(ErrorKind::DegenerateDataset,
                "degenerate dataset: balanced class weights need both classes (TD=" + std::to_string(n_td) +
                    ", AR=" + std::to_string(n_ar) + ")");
  const double n = static_cast<double>(n_td + n_ar);
  return {n / (2.0 * static_cast<double>(n_td)), n / (2.0 * static_cast<double>(n_ar))};
}

// n / (2 n_c) for each class c.
inline ClassWeights balanced_class_weights(const Dataset& d) {
  return balanced_class_weights(d.count(Label::TD), d.count(Label::AR));
}

// ---------------------------------------------------------------------------
// Numeric helpers

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Derived seed for stream `index` of a parent seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

// Seeded generator with platform-independent output. The std distributions are
// implementation-defined, so the conversions are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    if (n == 0) throw Error(ErrorKind::Usage, "Rng::index: empty range");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do x = next_u64();
    while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  // Standard normal by Box-Muller; no cached second value so draws stay aligned.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::uint64_t state_;
};

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace legmove
