#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "exportscope/query.hpp"
#include "exportscope/time.hpp"

namespace exportscope {

// Perceived sensitivity of one element: 0 = not very sensitive, 1 = very
// sensitive.
struct SensitivityRating {
  std::string element_id;
  double value = 0;
  Timestamp rated_at{};
  friend bool operator==(const SensitivityRating&, const SensitivityRating&) = default;
};

// Latest rating per element by rated_at; on equal timestamps the later call
// wins. Not internally synchronized: one writer at a time, readers take a
// copy.
class SensitivityStore {
 public:
  // Throws ValidationError for a value outside [0, 1] and UnknownElementError
  // when no loaded dataset contains the element.
  void rate(const MergedView& view, const std::string& element_id, double value,
            Timestamp rated_at);

  std::optional<double> value(std::string_view element_id) const;
  const std::map<std::string, SensitivityRating, std::less<>>& ratings() const { return ratings_; }
  std::size_t size() const { return ratings_.size(); }

  // Mean over every stored rating.
  std::optional<double> average() const;

  // Array of {element_id, value, rated_at} sorted by element_id.
  std::string to_document() const;
  static SensitivityStore from_document(std::string_view document);

  // Atomic replace of the ratings file.
  void save(const std::filesystem::path& file) const;
  // A missing file yields an empty store.
  static SensitivityStore load(const std::filesystem::path& file);

  friend bool operator==(const SensitivityStore&, const SensitivityStore&) = default;

 private:
  void put(SensitivityRating rating);

  std::map<std::string, SensitivityRating, std::less<>> ratings_;
};

// Mean rating over the distinct rated element ids inside the selection;
// nullopt when none of them is rated.
std::optional<double> average(const SensitivityStore& store, const MergedView& view,
                              const Selection& selection = {});

}  // namespace exportscope
