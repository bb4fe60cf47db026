#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "legmove/core.hpp"

namespace legmove {

enum class SelectionMethod { Univariate, RFE, Stepwise, Manual };

inline std::string_view to_string(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::Univariate: return "univariate";
    case SelectionMethod::RFE: return "rfe";
    case SelectionMethod::Stepwise: return "stepwise";
    case SelectionMethod::Manual: return "manual";
  }
  return "manual";
}

inline std::optional<SelectionMethod> parse_selection_method(std::string_view s) {
  for (auto m : {SelectionMethod::Univariate, SelectionMethod::RFE, SelectionMethod::Stepwise, SelectionMethod::Manual})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

// Ordered subset of schema feature names plus how it was chosen.
struct FeatureMask {
  std::vector<std::string> selected;
  SelectionMethod method = SelectionMethod::Manual;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;

  static FeatureMask all(const FeatureSchema& schema) { return {schema.names(), SelectionMethod::Manual, nlohmann::json::object(), 0}; }

  bool contains(std::string_view name) const {
    return std::find(selected.begin(), selected.end(), name) != selected.end();
  }

  // Schema positions of the selected features, in mask order.
  std::vector<std::size_t> indices(const FeatureSchema& schema) const {
    if (selected.empty()) throw Error(ErrorKind::Validation, "feature mask is empty");
    std::vector<std::size_t> out;
    out.reserve(selected.size());
    for (const auto& n : selected) out.push_back(schema.require_index(n));
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (out[i] == out[j]) throw Error(ErrorKind::Validation, "feature mask lists '" + selected[i] + "' twice");
    return out;
  }

  friend bool operator==(const FeatureMask&, const FeatureMask&) = default;
};

// Mask with features reordered to schema order.
inline FeatureMask in_schema_order(FeatureMask m, const FeatureSchema& schema) {
  auto idx = m.indices(schema);
  std::sort(idx.begin(), idx.end());
  m.selected.clear();
  for (auto i : idx) m.selected.push_back(schema.name(i));
  return m;
}

inline nlohmann::json to_json(const FeatureMask& m) {
  return {{"method", std::string(to_string(m.method))}, {"selected", m.selected}, {"params", m.params}, {"seed", m.seed}};
}

inline FeatureMask mask_from_json(const nlohmann::json& j) {
  try {
    FeatureMask m;
    auto method = parse_selection_method(j.at("method").get<std::string>());
    if (!method) throw Error(ErrorKind::Validation, "feature mask: unknown method " + j.at("method").dump());
    m.method = *method;
    m.selected = j.at("selected").get<std::vector<std::string>>();
    if (m.selected.empty()) throw Error(ErrorKind::Validation, "feature mask: empty selection");
    m.params = j.value("params", nlohmann::json::object());
    m.seed = j.value("seed", std::uint64_t{0});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("feature mask: ") + e.what());
  }
}

}  // namespace legmove
