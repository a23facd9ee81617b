#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exportscope/ingest.hpp"
#include "exportscope/model.hpp"
#include "exportscope/rules.hpp"

namespace exportscope {

struct ParseWarning {
  std::string path;
  std::string message;
  friend bool operator==(const ParseWarning&, const ParseWarning&) = default;
};

struct ParseReport {
  std::uint64_t files_parsed = 0;
  std::uint64_t files_skipped = 0;
  std::uint64_t elements_emitted = 0;
  std::vector<ParseWarning> warnings;
};

inline constexpr std::uint64_t kDefaultMaxEntryBytes = 512ull * 1024 * 1024;

struct ParseOptions {
  // Empty: derived from the service and the archive's entry table.
  std::string dataset_id;
  // Unset: the current time.
  std::optional<Timestamp> ingested_at;
  // Larger entries are listed but never read.
  std::uint64_t max_entry_bytes = kDefaultMaxEntryBytes;
  // 0: one per hardware thread.
  unsigned threads = 0;
};

struct ParseResult {
  Dataset dataset;
  ParseReport report;
};

// Extracts data elements from every entry matched by a rule. A file that
// fails to parse is reported as a warning and left without elements; only an
// unreadable archive aborts.
ParseResult parse_export(const ZipArchive& archive, const ArchiveListing& listing,
                         const std::string& service, const RuleSet& rules,
                         const ParseOptions& options = {});

// Applies one rule to one file's content. Used by parse_export; exposed for
// rule authors and tests. Throws on malformed content.
struct FileParseOutput {
  std::vector<DataElement> elements;
  std::uint64_t unparsed_times = 0;
  std::vector<std::string> notes;
};
FileParseOutput parse_file(std::string_view content, const ParserRule& rule,
                           const std::string& service, const std::string& source_path,
                           const std::string& dataset_id);

// Per-service rule tables plus detection signatures.
struct Registry {
  SignatureTable signatures = default_signatures();
  std::map<std::string, RuleSet> rules = default_rules();

  // Loads a signature document and merges it over the current table.
  void load_signatures(const std::filesystem::path& file);
  // Loads one rule file, or every *.json in a directory, replacing the
  // tables of the services they name.
  void load_rules(const std::filesystem::path& file_or_dir);
};

struct IngestOptions {
  std::optional<std::string> forced_service;
  ParseOptions parse;
};

struct IngestResult {
  std::string service;
  ParseResult parsed;
};

// list_archive + detect_service (unless forced) + parse_export.
IngestResult ingest_archive(const ZipArchive& archive, const std::string& archive_name,
                            const Registry& registry, const IngestOptions& options = {});

}  // namespace exportscope
