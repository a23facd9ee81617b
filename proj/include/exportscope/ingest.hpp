#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "exportscope/model.hpp"
#include "exportscope/zip.hpp"

namespace exportscope {

// Path glob over '/'-separated paths: `*` and `?` stay within one segment,
// a `**` segment spans zero or more segments.
bool glob_match(std::string_view pattern, std::string_view path);

struct ListingEntry {
  std::string path;  // forward slashes, relative
  std::uint64_t size_bytes = 0;
  bool is_dir = false;
  std::size_t zip_index = 0;  // index into ZipArchive::entries()

  friend bool operator==(const ListingEntry&, const ListingEntry&) = default;
};

struct ArchiveListing {
  std::string archive_name;
  std::vector<ListingEntry> entries;
};

// One entry per stored file, in archive order; directory entries are dropped.
// Throws SecurityError if any entry would escape the archive root and
// ArchiveFormatError for duplicate paths.
ArchiveListing list_archive(const ZipArchive& archive, std::string archive_name = {});
ArchiveListing list_archive(std::string archive_bytes, std::string archive_name = {});

struct ServiceSignature {
  std::string service;
  std::vector<std::string> required_globs;
  std::vector<std::string> forbidden_globs;
  int priority = 0;
};

using SignatureTable = std::vector<ServiceSignature>;

// The built-in table for facebook, google, twitter and instagram.
const SignatureTable& default_signatures();

// Signature document: {"schema_version":1,"services":{"<id>":{"required":[..],
// "forbidden":[..],"priority":n}}}. Throws RuleError.
SignatureTable parse_signatures(std::string_view document);

// Entries of `extra` replace same-named entries of `base`; new ones append.
SignatureTable merge_signatures(SignatureTable base, const SignatureTable& extra);

// Highest-priority signature whose required globs each match some path and
// whose forbidden globs match none; earlier table entries win ties. Throws
// UnknownServiceError.
std::string detect_service(const ArchiveListing& listing, const SignatureTable& signatures);

// Splits "a/b/c.json" into {"a/b/", "c.json"}.
std::pair<std::string, std::string> split_path(std::string_view path);

std::vector<FileElement> build_file_elements(const ArchiveListing& listing,
                                             const std::string& dataset_id);

}  // namespace exportscope
