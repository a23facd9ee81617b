#include "exportscope/sensitivity.hpp"

#include <cmath>
#include <unordered_set>
#include <nlohmann/json.hpp>

#include "exportscope/error.hpp"
#include "exportscope/unified_io.hpp"

namespace exportscope {

namespace {

void check_value(double value, const std::string& field) {
  if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
    throw ValidationError(field, "rating must lie in [0, 1]");
  }
}

}  // namespace

void SensitivityStore::put(SensitivityRating rating) {
  auto it = ratings_.find(rating.element_id);
  if (it == ratings_.end()) {
    auto key = rating.element_id;
    ratings_.emplace(std::move(key), std::move(rating));
  } else if (rating.rated_at >= it->second.rated_at) {
    it->second = std::move(rating);
  }
}

void SensitivityStore::rate(const MergedView& view, const std::string& element_id, double value,
                            Timestamp rated_at) {
  check_value(value, "value");
  if (!view.contains_element(element_id)) {
    throw UnknownElementError("no loaded dataset contains element " + element_id);
  }
  put({element_id, value, rated_at});
}

std::optional<double> SensitivityStore::value(std::string_view element_id) const {
  const auto it = ratings_.find(element_id);
  if (it == ratings_.end()) return std::nullopt;
  return it->second.value;
}

std::optional<double> SensitivityStore::average() const {
  if (ratings_.empty()) return std::nullopt;
  double sum = 0;
  for (const auto& [id, r] : ratings_) sum += r.value;
  return sum / static_cast<double>(ratings_.size());
}

std::string SensitivityStore::to_document() const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& [id, r] : ratings_) {
    nlohmann::ordered_json j;
    j["element_id"] = r.element_id;
    j["value"] = r.value;
    j["rated_at"] = format_rfc3339(r.rated_at);
    doc.push_back(std::move(j));
  }
  return doc.dump();
}

SensitivityStore SensitivityStore::from_document(std::string_view document) {
  const auto doc = nlohmann::json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    throw ValidationError("ratings", "ratings document must be a JSON array");
  }
  SensitivityStore store;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "ratings[" + std::to_string(i) + "]";
    const auto& j = doc[i];
    if (!j.is_object()) throw ValidationError(where, "must be an object");
    const auto id = j.find("element_id");
    const auto value = j.find("value");
    const auto at = j.find("rated_at");
    if (id == j.end() || !id->is_string() || id->get_ref<const std::string&>().empty()) {
      throw ValidationError(where + ".element_id", "must be a non-empty string");
    }
    if (value == j.end() || !value->is_number()) {
      throw ValidationError(where + ".value", "must be a number");
    }
    check_value(value->get<double>(), where + ".value");
    std::optional<Timestamp> t;
    if (at != j.end() && at->is_string()) t = parse_rfc3339_utc(at->get_ref<const std::string&>());
    if (!t) throw ValidationError(where + ".rated_at", "must be an RFC-3339 UTC string");
    store.put({id->get<std::string>(), value->get<double>(), *t});
  }
  return store;
}

void SensitivityStore::save(const std::filesystem::path& file) const {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  write_file_atomic(file, to_document());
}

SensitivityStore SensitivityStore::load(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) return {};
  return from_document(read_file(file));
}

std::optional<double> average(const SensitivityStore& store, const MergedView& view,
                              const Selection& selection) {
  // Identical records in two exports of one service share an id and a
  // rating; each rated id counts once.
  std::unordered_set<std::string_view> seen;
  double sum = 0;
  std::size_t n = 0;
  for (const auto& ref : apply_selection(view, selection)) {
    const auto v = store.value(ref.element->id);
    if (v && seen.insert(ref.element->id).second) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace exportscope
