#include "exportscope/parse.hpp"

#include <atomic>
#include <nlohmann/json.hpp>
#include <thread>

#include "exportscope/error.hpp"
#include "exportscope/text.hpp"
#include "exportscope/unified_io.hpp"
#include "template.hpp"

namespace exportscope {

using nlohmann::json;

namespace {

std::string_view strip_bom(std::string_view s) {
  if (s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
  return s;
}

// RFC 4180 rows; quoted fields may contain separators, quotes and newlines.
std::vector<std::vector<std::string>> parse_csv_rows(std::string_view s) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < s.size() && s[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      row_has_content = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      row_has_content = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < s.size() && s[i + 1] == '\n') ++i;
      if (row_has_content || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      row_has_content = false;
    } else {
      field += c;
    }
  }
  if (in_quotes) throw Error("unterminated quoted CSV field");
  if (row_has_content || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

json csv_to_records(std::string_view content) {
  const auto rows = parse_csv_rows(content);
  json records = json::array();
  if (rows.empty()) return records;
  const auto& header = rows.front();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw Error("CSV row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                  " fields, header has " + std::to_string(header.size()));
    }
    json rec = json::object();
    for (std::size_t c = 0; c < header.size(); ++c) rec[header[c]] = rows[r][c];
    records.push_back(std::move(rec));
  }
  return records;
}

class RecordWalker {
 public:
  RecordWalker(const ParserRule& rule, FileParseOutput& out) : rule_(rule), out_(out) {}

  template <typename Visit>
  void walk(const json& node, std::size_t depth, std::vector<const json*>& ancestors, Visit&& visit) {
    const bool push = node.is_object();
    if (push) ancestors.push_back(&node);
    if (depth == rule_.records_path.size()) {
      emit(node, ancestors, visit);
    } else {
      const std::string& seg = rule_.records_path[depth];
      if (seg == "*") {
        if (node.is_array() || node.is_object()) {
          for (const auto& child : node) walk(child, depth + 1, ancestors, visit);
        } else {
          missing_path();
        }
      } else if (node.is_object() && node.contains(seg)) {
        walk(node.at(seg), depth + 1, ancestors, visit);
      } else if (node.is_array() && !seg.empty() &&
                 seg.find_first_not_of("0123456789") == std::string::npos &&
                 std::stoull(seg) < node.size()) {
        walk(node.at(std::stoull(seg)), depth + 1, ancestors, visit);
      } else {
        missing_path();
      }
    }
    if (push) ancestors.pop_back();
  }

 private:
  template <typename Visit>
  void emit(const json& node, const std::vector<const json*>& ancestors, Visit&& visit) {
    if (node.is_null()) return;
    if (rule_.each == RecordExpansion::kEntries) {
      if (!node.is_object()) {
        out_.notes.push_back("records node is not an object; expected entries");
        return;
      }
      for (auto it = node.begin(); it != node.end(); ++it) {
        const json entry = {{"key", it.key()}, {"value", it.value()}};
        visit(entry, ancestors);
      }
      return;
    }
    if (node.is_array()) {
      for (const auto& item : node) visit(item, ancestors);
    } else {
      visit(node, ancestors);
    }
  }

  void missing_path() {
    if (!reported_missing_) {
      out_.notes.push_back("records path not found");
      reported_missing_ = true;
    }
  }

  const ParserRule& rule_;
  FileParseOutput& out_;
  bool reported_missing_ = false;
};

std::string derive_dataset_id(const std::string& service, const ZipArchive& archive,
                              const ArchiveListing& listing) {
  std::string table;
  for (const auto& e : listing.entries) {
    table += e.path;
    table += '\n';
    table += std::to_string(e.size_bytes);
    table += '\n';
    table += std::to_string(archive.entries()[e.zip_index].crc32);
    table += '\n';
  }
  return service + "-" + element_id("dataset", service, listing.entries.size(), table).substr(0, 16);
}

}  // namespace

FileParseOutput parse_file(std::string_view content, const ParserRule& rule,
                           const std::string& service, const std::string& source_path,
                           const std::string& dataset_id) {
  FileParseOutput out;
  content = strip_bom(content);

  json doc;
  switch (rule.format) {
    case RecordFormat::kJson:
      doc = json::parse(content);
      break;
    case RecordFormat::kJsWrappedJson:
      doc = json::parse(unwrap_js_export(content));
      break;
    case RecordFormat::kCsv:
      doc = csv_to_records(sanitize_utf8(content));
      break;
  }

  std::vector<CompiledTemplate> text_templates;
  for (const auto& t : rule.text_templates) text_templates.push_back(*compile_template(t));
  std::optional<CompiledTemplate> subcategory;
  if (rule.subcategory) subcategory = *compile_template(*rule.subcategory);
  std::optional<FieldRef> time_ref;
  if (rule.time) time_ref = parse_field_ref(rule.time->field);

  std::uint64_t index = 0;
  auto visit = [&](const json& record, const std::vector<const json*>& ancestors) {
    const RecordContext ctx{&record, ancestors};
    DataElement e;
    if (time_ref) {
      const json* raw = resolve(*time_ref, ctx);
      if (raw != nullptr && !raw->is_null()) {
        e.time = parse_timestamp(*raw, rule.time->format);
        if (!e.time) ++out.unparsed_times;
      }
    }
    std::optional<std::string> text;
    for (const auto& t : text_templates) {
      if ((text = render(t, ctx))) break;
    }
    e.text = text ? std::move(*text) : render_lenient(text_templates.back(), ctx);
    std::optional<std::string> sub;
    if (subcategory) sub = render(*subcategory, ctx);
    e.subcategory = sub ? std::move(*sub) : rule.name;
    if (rule.repair_encoding) {
      e.text = repair_mojibake(e.text);
      e.subcategory = repair_mojibake(e.subcategory);
    }
    e.category = rule.category;
    e.source_file = source_path;
    e.dataset_id = dataset_id;
    e.id = element_id(service, source_path, index++, e.text);
    out.elements.push_back(std::move(e));
  };

  if (rule.format == RecordFormat::kCsv) {
    const std::vector<const json*> no_ancestors;
    for (const auto& rec : doc) visit(rec, no_ancestors);
  } else {
    RecordWalker walker(rule, out);
    std::vector<const json*> ancestors;
    walker.walk(doc, 0, ancestors, visit);
  }
  return out;
}

ParseResult parse_export(const ZipArchive& archive, const ArchiveListing& listing,
                         const std::string& service, const RuleSet& rules,
                         const ParseOptions& options) {
  ParseResult result;
  Dataset& ds = result.dataset;
  ParseReport& report = result.report;
  ds.service = service;
  ds.dataset_id =
      options.dataset_id.empty() ? derive_dataset_id(service, archive, listing) : options.dataset_id;
  ds.ingested_at = options.ingested_at.value_or(
      std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()));
  ds.files = build_file_elements(listing, ds.dataset_id);

  struct Task {
    std::size_t file_index;
    const ParserRule* rule;
    FileParseOutput output;
    std::string error;
  };
  std::vector<Task> tasks;
  std::vector<ParseWarning> size_warnings;
  for (std::size_t i = 0; i < listing.entries.size(); ++i) {
    const auto& entry = listing.entries[i];
    const ParserRule* rule = rules.match(entry.path);
    if (rule == nullptr) continue;
    if (entry.size_bytes > options.max_entry_bytes) {
      size_warnings.push_back({entry.path, "exceeds the entry size cap; not parsed"});
      continue;
    }
    tasks.push_back({i, rule, {}, {}});
  }

  auto run = [&](Task& task) {
    const auto& entry = listing.entries[task.file_index];
    try {
      const std::string content = archive.read(archive.entries()[entry.zip_index]);
      task.output = parse_file(content, *task.rule, service, entry.path, ds.dataset_id);
    } catch (const std::exception& err) {
      task.output = {};
      task.error = err.what();
    }
  };

  unsigned threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(tasks.size())));
  if (threads <= 1) {
    for (auto& t : tasks) run(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) run(tasks[i]);
      });
    }
  }

  // Deterministic merge in archive order.
  std::size_t matched = 0;
  for (auto& task : tasks) {
    FileElement& file = ds.files[task.file_index];
    const std::string path = file.path();
    if (!task.error.empty()) {
      report.warnings.push_back({path, task.error});
      continue;
    }
    ++matched;
    for (auto& note : task.output.notes) report.warnings.push_back({path, std::move(note)});
    if (task.output.unparsed_times > 0) {
      report.warnings.push_back(
          {path, std::to_string(task.output.unparsed_times) + " timestamps could not be parsed"});
    }
    file.element_count = task.output.elements.size();
    if (file.element_count > 0) file.data_category = task.rule->category;
    for (auto& e : task.output.elements) ds.elements.push_back(std::move(e));
  }
  for (auto& w : size_warnings) report.warnings.push_back(std::move(w));

  report.files_parsed = matched;
  report.files_skipped = ds.files.size() - matched;
  report.elements_emitted = ds.elements.size();
  ds.canonicalize();
  return result;
}

void Registry::load_signatures(const std::filesystem::path& file) {
  signatures = merge_signatures(std::move(signatures), parse_signatures(read_file(file)));
}

void Registry::load_rules(const std::filesystem::path& file_or_dir) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(file_or_dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(file_or_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(file_or_dir);
  }
  for (const auto& f : files) {
    RuleSet set = parse_rule_file(read_file(f));
    std::string service = set.service;
    rules[service] = std::move(set);
  }
}

IngestResult ingest_archive(const ZipArchive& archive, const std::string& archive_name,
                            const Registry& registry, const IngestOptions& options) {
  const ArchiveListing listing = list_archive(archive, archive_name);
  IngestResult result;
  if (options.forced_service) {
    result.service = *options.forced_service;
  } else {
    if (listing.entries.empty()) throw UnknownServiceError(archive_name + ": archive is empty");
    result.service = detect_service(listing, registry.signatures);
  }
  const auto it = registry.rules.find(result.service);
  if (it == registry.rules.end()) {
    throw UnsupportedServiceError("no parser rules for service " + result.service);
  }
  result.parsed = parse_export(archive, listing, result.service, it->second, options.parse);
  return result;
}

}  // namespace exportscope
