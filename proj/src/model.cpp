#include "exportscope/model.hpp"

#include <algorithm>
#include <openssl/evp.h>
#include <unordered_map>
#include <unordered_set>

#include "exportscope/error.hpp"

namespace exportscope {

namespace {

struct CategoryInfo {
  std::string_view name;
  std::string_view label;
  std::string_view color;
};

constexpr std::array<CategoryInfo, kCategoryCount> kCategoryInfo = {{
    {"Account", "Account", "#8c6bb1"},
    {"Activity", "Activity", "#4daf4a"},
    {"Contacts", "Contacts", "#377eb8"},
    {"Location", "Location", "#ff7f00"},
    {"Media", "Media", "#a6761d"},
    {"Messages", "Messages", "#f781bf"},
    {"PostsAndComments", "Posts and Comments", "#e6ab02"},
    {"Security", "Security", "#e41a1c"},
    {"Search", "Search", "#1b9e77"},
    {"Other", "Other", "#999999"},
}};

constexpr std::array<std::string_view, 6> kFileCategoryNames = {
    "Picture", "Video", "Audio", "Text", "Document", "Other"};

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

void append_field(std::string& buf, std::string_view field) {
  buf += std::to_string(field.size());
  buf += ':';
  buf += field;
}

}  // namespace

std::string_view category_name(Category c) {
  return kCategoryInfo[static_cast<std::size_t>(c)].name;
}

std::string_view category_label(Category c) {
  return kCategoryInfo[static_cast<std::size_t>(c)].label;
}

std::string_view category_color(Category c) {
  return kCategoryInfo[static_cast<std::size_t>(c)].color;
}

std::optional<Category> parse_category(std::string_view name) {
  for (Category c : kAllCategories) {
    if (category_name(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view file_category_name(FileCategory c) {
  return kFileCategoryNames[static_cast<std::size_t>(c)];
}

std::optional<FileCategory> parse_file_category(std::string_view name) {
  for (std::size_t i = 0; i < kFileCategoryNames.size(); ++i) {
    if (kFileCategoryNames[i] == name) return static_cast<FileCategory>(i);
  }
  return std::nullopt;
}

FileCategory classify_file(std::string_view file_name) {
  const auto slash = file_name.rfind('/');
  if (slash != std::string_view::npos) file_name.remove_prefix(slash + 1);
  const auto dot = file_name.rfind('.');
  if (dot == std::string_view::npos || dot + 1 == file_name.size()) return FileCategory::kOther;
  const std::string ext = lower_ascii(file_name.substr(dot + 1));

  static const std::unordered_map<std::string, FileCategory> kTable = {
      {"jpg", FileCategory::kPicture},  {"jpeg", FileCategory::kPicture},
      {"png", FileCategory::kPicture},  {"gif", FileCategory::kPicture},
      {"webp", FileCategory::kPicture}, {"bmp", FileCategory::kPicture},
      {"svg", FileCategory::kPicture},  {"mp4", FileCategory::kVideo},
      {"mov", FileCategory::kVideo},    {"avi", FileCategory::kVideo},
      {"webm", FileCategory::kVideo},   {"mkv", FileCategory::kVideo},
      {"mp3", FileCategory::kAudio},    {"wav", FileCategory::kAudio},
      {"ogg", FileCategory::kAudio},    {"m4a", FileCategory::kAudio},
      {"aac", FileCategory::kAudio},    {"json", FileCategory::kText},
      {"js", FileCategory::kText},      {"csv", FileCategory::kText},
      {"txt", FileCategory::kText},     {"vcf", FileCategory::kText},
      {"ics", FileCategory::kText},     {"xml", FileCategory::kText},
      {"html", FileCategory::kDocument}, {"pdf", FileCategory::kDocument},
      {"doc", FileCategory::kDocument}, {"docx", FileCategory::kDocument},
  };
  const auto it = kTable.find(ext);
  return it == kTable.end() ? FileCategory::kOther : it->second;
}

std::string element_id(std::string_view service, std::string_view source_path,
                       std::uint64_t index, std::string_view text) {
  // Length-prefixed fields keep the encoding injective.
  std::string buf;
  buf.reserve(service.size() + source_path.size() + text.size() + 48);
  append_field(buf, service);
  append_field(buf, source_path);
  append_field(buf, std::to_string(index));
  append_field(buf, text);

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(buf.data(), buf.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(32, '0');
  for (std::size_t i = 0; i < 16; ++i) {
    out[2 * i] = kHex[digest[i] >> 4];
    out[2 * i + 1] = kHex[digest[i] & 0xf];
  }
  return out;
}

bool element_order(const DataElement& a, const DataElement& b) {
  if (a.time.has_value() != b.time.has_value()) return a.time.has_value();
  if (a.time && *a.time != *b.time) return *a.time < *b.time;
  return a.id < b.id;
}

std::optional<TimeExtent> Dataset::time_extent() const {
  std::optional<TimeExtent> extent;
  for (const auto& e : elements) {
    if (!e.time) continue;
    if (!extent) {
      extent = TimeExtent{*e.time, *e.time};
    } else {
      extent->min = std::min(extent->min, *e.time);
      extent->max = std::max(extent->max, *e.time);
    }
  }
  return extent;
}

const FileElement* Dataset::find_file(std::string_view path) const {
  for (const auto& f : files) {
    if (f.folder.size() + f.file_name.size() == path.size() &&
        path.substr(0, f.folder.size()) == f.folder &&
        path.substr(f.folder.size()) == f.file_name) {
      return &f;
    }
  }
  return nullptr;
}

void Dataset::canonicalize() {
  std::sort(files.begin(), files.end(),
            [](const FileElement& a, const FileElement& b) { return a.path() < b.path(); });
  std::sort(elements.begin(), elements.end(), element_order);
}

void Dataset::validate() const {
  if (dataset_id.empty()) throw ValidationError("dataset_id", "must not be empty");
  if (service.empty()) throw ValidationError("service", "must not be empty");
  if (!in_document_range(ingested_at)) throw ValidationError("ingested_at", "out of range");

  std::unordered_map<std::string, const FileElement*> by_path;
  by_path.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto& f = files[i];
    const std::string where = "files[" + std::to_string(i) + "]";
    if (f.file_name.empty() || f.file_name.find('/') != std::string::npos) {
      throw ValidationError(where + ".name", "must be a non-empty name without '/'");
    }
    if (!f.folder.empty() && f.folder.back() != '/') {
      throw ValidationError(where + ".folder", "must be empty or end with '/'");
    }
    if (f.dataset_id != dataset_id) {
      throw ValidationError(where + ".dataset_id", "does not match dataset");
    }
    if ((f.element_count > 0) != f.data_category.has_value()) {
      throw ValidationError(where + ".data_category",
                            "must be present exactly when element_count > 0");
    }
    if (!by_path.emplace(f.path(), &f).second) {
      throw ValidationError(where + ".name", "duplicate path " + f.path());
    }
  }

  std::unordered_map<const FileElement*, std::uint64_t> counts;
  std::unordered_set<std::string_view> ids;
  ids.reserve(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    const std::string where = "elements[" + std::to_string(i) + "]";
    if (e.id.empty()) throw ValidationError(where + ".id", "must not be empty");
    if (!ids.insert(e.id).second) throw ValidationError(where + ".id", "duplicate id " + e.id);
    if (e.dataset_id != dataset_id) {
      throw ValidationError(where + ".dataset_id", "does not match dataset");
    }
    if (e.time && !in_document_range(*e.time)) {
      throw ValidationError(where + ".time", "out of range");
    }
    const auto it = by_path.find(e.source_file);
    if (it == by_path.end()) {
      throw ValidationError(where + ".source_file", "unknown file " + e.source_file);
    }
    if (it->second->data_category != e.category) {
      throw ValidationError(where + ".category", "differs from the source file's data_category");
    }
    ++counts[it->second];
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto it = counts.find(&files[i]);
    const std::uint64_t n = it == counts.end() ? 0 : it->second;
    if (n != files[i].element_count) {
      throw ValidationError("files[" + std::to_string(i) + "].element_count",
                            "is " + std::to_string(files[i].element_count) + " but " +
                                std::to_string(n) + " elements reference the file");
    }
  }
}

}  // namespace exportscope
