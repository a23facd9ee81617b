#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exportscope/time.hpp"

namespace exportscope {

// The fixed category taxonomy shared by all services. Enumerator order is the
// display order and the order of every per-category table.
enum class Category : std::uint8_t {
  kAccount,
  kActivity,
  kContacts,
  kLocation,
  kMedia,
  kMessages,
  kPostsAndComments,
  kSecurity,
  kSearch,
  kOther,
};

inline constexpr std::size_t kCategoryCount = 10;
inline constexpr std::array<Category, kCategoryCount> kAllCategories = {
    Category::kAccount,  Category::kActivity,         Category::kContacts,
    Category::kLocation, Category::kMedia,            Category::kMessages,
    Category::kPostsAndComments, Category::kSecurity, Category::kSearch,
    Category::kOther,
};

// Identifier used in documents and rule files, e.g. "PostsAndComments".
std::string_view category_name(Category c);
// Human label, e.g. "Posts and Comments".
std::string_view category_label(Category c);
std::optional<Category> parse_category(std::string_view name);
// "#rrggbb". Injective over categories and never white.
std::string_view category_color(Category c);
inline constexpr std::string_view kNoDataColor = "#ffffff";

enum class FileCategory : std::uint8_t { kPicture, kVideo, kAudio, kText, kDocument, kOther };

std::string_view file_category_name(FileCategory c);
std::optional<FileCategory> parse_file_category(std::string_view name);

// Maps a file name to its category through its lowercase extension.
FileCategory classify_file(std::string_view file_name);

// Content-derived element identifier: 32 lowercase hex characters.
std::string element_id(std::string_view service, std::string_view source_path,
                       std::uint64_t index, std::string_view text);

struct FileElement {
  std::string file_name;
  std::string folder;  // "" for the archive root, otherwise ends with '/'
  std::uint64_t size_bytes = 0;
  FileCategory file_category = FileCategory::kOther;
  std::optional<Category> data_category;
  std::uint64_t element_count = 0;
  std::string dataset_id;

  std::string path() const { return folder + file_name; }

  friend bool operator==(const FileElement&, const FileElement&) = default;
};

struct DataElement {
  std::string id;
  std::optional<Timestamp> time;
  std::string text;
  Category category = Category::kOther;
  std::string subcategory;
  std::string source_file;  // path of the owning FileElement
  std::string dataset_id;

  friend bool operator==(const DataElement&, const DataElement&) = default;
};

struct TimeExtent {
  Timestamp min;
  Timestamp max;
  friend bool operator==(const TimeExtent&, const TimeExtent&) = default;
};

// Canonical element order: time ascending with nulls last, then id.
bool element_order(const DataElement& a, const DataElement& b);

struct Dataset {
  std::string dataset_id;
  std::string service;
  Timestamp ingested_at{};
  std::vector<FileElement> files;
  std::vector<DataElement> elements;

  std::optional<TimeExtent> time_extent() const;
  const FileElement* find_file(std::string_view path) const;

  // Sorts files by path and elements by element_order.
  void canonicalize();

  // Throws ValidationError naming the offending field when a type invariant
  // does not hold.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

}  // namespace exportscope
