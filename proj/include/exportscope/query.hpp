#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "exportscope/model.hpp"

namespace exportscope {

// Empty dataset/category lists mean "all".
struct Selection {
  std::vector<std::string> dataset_ids;
  std::vector<Category> categories;
  std::optional<TimeExtent> time_range;  // inclusive
  std::optional<std::string> query;      // case-insensitive substring

  // Throws ValidationError when the time range is inverted.
  void validate() const;
};

struct ElementRef {
  const DataElement* element = nullptr;
  std::size_t dataset_index = 0;
};

struct FileRef {
  const FileElement* file = nullptr;
  std::size_t dataset_index = 0;
};

// Read-only union of several datasets. Elements are kept in canonical order
// (time with nulls last, id, then dataset order); datasets in ingestion order.
class MergedView {
 public:
  // Throws ConflictError on a repeated dataset_id.
  static MergedView merge(std::vector<std::shared_ptr<const Dataset>> datasets);

  const std::vector<std::shared_ptr<const Dataset>>& datasets() const { return datasets_; }
  const std::vector<ElementRef>& elements() const { return elements_; }
  const std::vector<FileRef>& files() const { return files_; }

  bool contains_element(std::string_view id) const { return ids_.count(std::string(id)) > 0; }
  std::optional<std::size_t> dataset_index(std::string_view dataset_id) const;

  // Case-folded text and subcategory for elements()[i].
  const std::string& folded_text(std::size_t i) const { return folded_text_[i]; }
  const std::string& folded_subcategory(std::size_t i) const { return folded_sub_[i]; }

 private:
  std::vector<std::shared_ptr<const Dataset>> datasets_;
  std::vector<ElementRef> elements_;
  std::vector<FileRef> files_;
  std::vector<std::string> folded_text_;
  std::vector<std::string> folded_sub_;
  std::unordered_set<std::string> ids_;
};

std::vector<ElementRef> apply_selection(const MergedView& view, const Selection& selection);

// x: whole days since 1970-01-01, y: seconds since midnight in [0, 86400).
// offset_seconds shifts the instant before splitting (display time zone).
struct TimePoint {
  ElementRef ref;
  std::int64_t x = 0;
  std::int64_t y = 0;
};

std::vector<TimePoint> timeline_project(std::span<const ElementRef> elements,
                                        std::int64_t offset_seconds = 0);

struct DatasetTimeline {
  std::size_t dataset_index = 0;
  std::string dataset_id;
  std::vector<TimePoint> points;
};

// One timeline per dataset of the view, in ingestion order, each holding the
// points whose element belongs to it.
std::vector<DatasetTimeline> partition_by_dataset(const MergedView& view,
                                                  std::span<const TimePoint> points);
std::vector<DatasetTimeline> partition_by_dataset(const MergedView& view,
                                                  const Selection& selection = {},
                                                  std::int64_t offset_seconds = 0);

struct FileKey {
  std::string dataset_id;
  std::string path;
  auto operator<=>(const FileKey&) const = default;
};

struct Stats {
  std::array<std::uint64_t, kCategoryCount> per_category{};
  std::map<std::string, std::uint64_t> per_service;
  std::map<FileKey, std::uint64_t> per_file;
  std::uint64_t total_elements = 0;
  std::uint64_t total_size_bytes = 0;
  std::optional<TimeExtent> time_extent;

  std::uint64_t count(Category c) const { return per_category[static_cast<std::size_t>(c)]; }
  friend bool operator==(const Stats&, const Stats&) = default;
};

// Files of the selected datasets whose data category passes the category
// filter. Files without data only pass an empty filter. Time range and query
// do not apply to files.
std::vector<FileRef> select_files(const MergedView& view, const Selection& selection = {});

// Element counts over apply_selection; total_size_bytes sums select_files.
Stats compute_stats(const MergedView& view, const Selection& selection = {});

// Elementwise sum; time extents combine to their hull.
Stats operator+(const Stats& a, const Stats& b);

}  // namespace exportscope
