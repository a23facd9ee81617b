#include "exportscope/ingest.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <unordered_set>

#include "embedded.hpp"
#include "exportscope/error.hpp"

namespace exportscope {

namespace {

std::vector<std::string_view> split_segments(std::string_view path) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto slash = path.find('/', start);
    if (slash == std::string_view::npos) {
      out.push_back(path.substr(start));
      return out;
    }
    out.push_back(path.substr(start, slash - start));
    start = slash + 1;
  }
}

bool match_segment(std::string_view pat, std::string_view text) {
  std::size_t p = 0, t = 0;
  std::size_t star_p = std::string_view::npos, star_t = 0;
  while (t < text.size()) {
    if (p < pat.size() && (pat[p] == '?' || pat[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pat.size() && pat[p] == '*') {
      star_p = p++;
      star_t = t;
    } else if (star_p != std::string_view::npos) {
      p = star_p + 1;
      t = ++star_t;
    } else {
      return false;
    }
  }
  while (p < pat.size() && pat[p] == '*') ++p;
  return p == pat.size();
}

bool match_segments(const std::vector<std::string_view>& pat, std::size_t pi,
                    const std::vector<std::string_view>& path, std::size_t si) {
  while (pi < pat.size()) {
    if (pat[pi] == "**") {
      for (std::size_t k = si; k <= path.size(); ++k) {
        if (match_segments(pat, pi + 1, path, k)) return true;
      }
      return false;
    }
    if (si >= path.size() || !match_segment(pat[pi], path[si])) return false;
    ++pi;
    ++si;
  }
  return si == path.size();
}

std::string normalize_entry_path(std::string name) {
  std::replace(name.begin(), name.end(), '\\', '/');
  while (name.rfind("./", 0) == 0) name.erase(0, 2);
  return name;
}

void check_traversal(const std::string& path) {
  if (path.empty()) throw ArchiveFormatError("entry with empty name");
  if (path.front() == '/' || (path.size() > 1 && path[1] == ':')) {
    throw SecurityError("absolute entry path rejected: " + path);
  }
  for (std::string_view seg : split_segments(path)) {
    if (seg == "..") throw SecurityError("path traversal entry rejected: " + path);
  }
}

std::vector<std::string> string_list(const nlohmann::ordered_json& v, const std::string& field) {
  if (v.is_null()) return {};
  if (!v.is_array()) throw RuleError(field + " must be an array of globs");
  std::vector<std::string> out;
  for (const auto& g : v) {
    if (!g.is_string()) throw RuleError(field + " must be an array of globs");
    out.push_back(g.get<std::string>());
  }
  return out;
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view path) {
  return match_segments(split_segments(pattern), 0, split_segments(path), 0);
}

ArchiveListing list_archive(const ZipArchive& archive, std::string archive_name) {
  ArchiveListing listing;
  listing.archive_name = std::move(archive_name);
  std::unordered_set<std::string> seen;
  const auto& entries = archive.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::string path = normalize_entry_path(entries[i].name);
    check_traversal(path);
    if (entries[i].is_dir()) continue;
    if (!seen.insert(path).second) throw ArchiveFormatError("duplicate entry " + path);
    listing.entries.push_back({std::move(path), entries[i].uncompressed_size, false, i});
  }
  return listing;
}

ArchiveListing list_archive(std::string archive_bytes, std::string archive_name) {
  return list_archive(ZipArchive::from_bytes(std::move(archive_bytes)), std::move(archive_name));
}

const SignatureTable& default_signatures() {
  static const SignatureTable table = parse_signatures(embedded::signatures());
  return table;
}

SignatureTable parse_signatures(std::string_view document) {
  const auto doc = nlohmann::ordered_json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw RuleError("signature file is not a JSON object");
  const auto version = doc.find("schema_version");
  if (version == doc.end() || *version != 1) throw RuleError("signature file needs schema_version 1");
  const auto services = doc.find("services");
  if (services == doc.end() || !services->is_object()) {
    throw RuleError("signature file needs a 'services' object");
  }
  SignatureTable table;
  for (const auto& [name, body] : services->items()) {
    if (!body.is_object()) throw RuleError("signature for " + name + " must be an object");
    ServiceSignature sig;
    sig.service = name;
    sig.required_globs = string_list(body.value("required", nlohmann::ordered_json()),
                                     name + ".required");
    sig.forbidden_globs = string_list(body.value("forbidden", nlohmann::ordered_json()),
                                      name + ".forbidden");
    const auto prio = body.find("priority");
    if (prio != body.end()) {
      if (!prio->is_number_integer()) throw RuleError(name + ".priority must be an integer");
      sig.priority = prio->get<int>();
    }
    if (sig.required_globs.empty()) throw RuleError(name + ".required must not be empty");
    table.push_back(std::move(sig));
  }
  return table;
}

SignatureTable merge_signatures(SignatureTable base, const SignatureTable& extra) {
  for (const auto& sig : extra) {
    auto it = std::find_if(base.begin(), base.end(),
                           [&](const ServiceSignature& s) { return s.service == sig.service; });
    if (it != base.end()) {
      *it = sig;
    } else {
      base.push_back(sig);
    }
  }
  return base;
}

std::string detect_service(const ArchiveListing& listing, const SignatureTable& signatures) {
  auto any_match = [&](const std::string& glob) {
    return std::any_of(listing.entries.begin(), listing.entries.end(),
                       [&](const ListingEntry& e) { return glob_match(glob, e.path); });
  };
  const ServiceSignature* best = nullptr;
  for (const auto& sig : signatures) {
    if (sig.required_globs.empty()) continue;
    if (!std::all_of(sig.required_globs.begin(), sig.required_globs.end(), any_match)) continue;
    if (std::any_of(sig.forbidden_globs.begin(), sig.forbidden_globs.end(), any_match)) continue;
    if (best == nullptr || sig.priority > best->priority) best = &sig;
  }
  if (best == nullptr) {
    throw UnknownServiceError("no service signature matches " +
                              (listing.archive_name.empty() ? std::string("archive")
                                                            : listing.archive_name));
  }
  return best->service;
}

std::pair<std::string, std::string> split_path(std::string_view path) {
  const auto slash = path.rfind('/');
  if (slash == std::string_view::npos) return {std::string(), std::string(path)};
  return {std::string(path.substr(0, slash + 1)), std::string(path.substr(slash + 1))};
}

std::vector<FileElement> build_file_elements(const ArchiveListing& listing,
                                             const std::string& dataset_id) {
  std::vector<FileElement> files;
  files.reserve(listing.entries.size());
  for (const auto& entry : listing.entries) {
    auto [folder, name] = split_path(entry.path);
    FileElement f;
    f.file_category = classify_file(name);
    f.file_name = std::move(name);
    f.folder = std::move(folder);
    f.size_bytes = entry.size_bytes;
    f.dataset_id = dataset_id;
    files.push_back(std::move(f));
  }
  return files;
}

}  // namespace exportscope
