#include "exportscope/unified_io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <nlohmann/json.hpp>
#include <system_error>

#include "exportscope/error.hpp"

namespace exportscope {

using nlohmann::json;
using nlohmann::ordered_json;

std::string write_unified(const Dataset& dataset) {
  std::vector<std::size_t> file_order(dataset.files.size());
  std::iota(file_order.begin(), file_order.end(), 0);
  std::vector<std::string> paths;
  paths.reserve(dataset.files.size());
  for (const auto& f : dataset.files) paths.push_back(f.path());
  std::sort(file_order.begin(), file_order.end(),
            [&](std::size_t a, std::size_t b) { return paths[a] < paths[b]; });

  std::vector<std::size_t> element_order_idx(dataset.elements.size());
  std::iota(element_order_idx.begin(), element_order_idx.end(), 0);
  std::sort(element_order_idx.begin(), element_order_idx.end(), [&](std::size_t a, std::size_t b) {
    return element_order(dataset.elements[a], dataset.elements[b]);
  });

  ordered_json doc;
  doc["schema_version"] = kUnifiedSchemaVersion;
  doc["service"] = dataset.service;
  doc["dataset_id"] = dataset.dataset_id;
  doc["ingested_at"] = format_rfc3339(dataset.ingested_at);

  ordered_json files = ordered_json::array();
  for (std::size_t i : file_order) {
    const auto& f = dataset.files[i];
    ordered_json jf;
    jf["name"] = f.file_name;
    jf["folder"] = f.folder;
    jf["size_bytes"] = f.size_bytes;
    jf["file_category"] = file_category_name(f.file_category);
    jf["data_category"] =
        f.data_category ? ordered_json(category_name(*f.data_category)) : ordered_json(nullptr);
    jf["element_count"] = f.element_count;
    files.push_back(std::move(jf));
  }
  doc["files"] = std::move(files);

  ordered_json elements = ordered_json::array();
  for (std::size_t i : element_order_idx) {
    const auto& e = dataset.elements[i];
    ordered_json je;
    je["id"] = e.id;
    je["time"] = e.time ? ordered_json(format_rfc3339(*e.time)) : ordered_json(nullptr);
    je["text"] = e.text;
    je["category"] = category_name(e.category);
    je["subcategory"] = e.subcategory;
    je["source_file"] = e.source_file;
    elements.push_back(std::move(je));
  }
  doc["elements"] = std::move(elements);

  return doc.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + key, "missing");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw ValidationError(where + key, "must be a string");
  return v.get<std::string>();
}

std::uint64_t require_count(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ValidationError(where + key, "must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

Timestamp require_time(const json& v, const std::string& field) {
  if (!v.is_string()) throw ValidationError(field, "must be an RFC-3339 UTC string");
  const auto t = parse_rfc3339_utc(v.get_ref<const std::string&>());
  if (!t) throw ValidationError(field, "must be an RFC-3339 UTC string");
  return *t;
}

Category require_category(const json& v, const std::string& field) {
  if (!v.is_string()) throw ValidationError(field, "must be a category name");
  const auto c = parse_category(v.get_ref<const std::string&>());
  if (!c) throw ValidationError(field, "unknown category " + v.get<std::string>());
  return *c;
}

}  // namespace

Dataset read_unified(std::string_view document) {
  json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded()) throw ValidationError("document", "not valid JSON");
  if (!doc.is_object()) throw ValidationError("document", "must be an object");

  const auto version = doc.find("schema_version");
  if (version == doc.end() || !version->is_number_integer()) {
    throw FormatVersionError("unified document has no integer schema_version");
  }
  if (version->get<std::int64_t>() != kUnifiedSchemaVersion) {
    throw FormatVersionError("unsupported unified schema_version " +
                             std::to_string(version->get<std::int64_t>()));
  }

  Dataset d;
  d.service = require_string(doc, "service", "");
  d.dataset_id = require_string(doc, "dataset_id", "");
  d.ingested_at = require_time(require(doc, "ingested_at", ""), "ingested_at");

  const json& files = require(doc, "files", "");
  if (!files.is_array()) throw ValidationError("files", "must be an array");
  d.files.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string where = "files[" + std::to_string(i) + "].";
    const json& jf = files[i];
    if (!jf.is_object()) throw ValidationError(where.substr(0, where.size() - 1), "must be an object");
    FileElement f;
    f.file_name = require_string(jf, "name", where);
    f.folder = require_string(jf, "folder", where);
    f.size_bytes = require_count(jf, "size_bytes", where);
    const auto fc = parse_file_category(require_string(jf, "file_category", where));
    if (!fc) throw ValidationError(where + "file_category", "unknown file category");
    f.file_category = *fc;
    const json& dc = require(jf, "data_category", where);
    if (!dc.is_null()) f.data_category = require_category(dc, where + "data_category");
    f.element_count = require_count(jf, "element_count", where);
    f.dataset_id = d.dataset_id;
    d.files.push_back(std::move(f));
  }

  const json& elements = require(doc, "elements", "");
  if (!elements.is_array()) throw ValidationError("elements", "must be an array");
  d.elements.reserve(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const std::string where = "elements[" + std::to_string(i) + "].";
    const json& je = elements[i];
    if (!je.is_object()) throw ValidationError(where.substr(0, where.size() - 1), "must be an object");
    DataElement e;
    e.id = require_string(je, "id", where);
    const json& t = require(je, "time", where);
    if (!t.is_null()) e.time = require_time(t, where + "time");
    e.text = require_string(je, "text", where);
    e.category = require_category(require(je, "category", where), where + "category");
    e.subcategory = require_string(je, "subcategory", where);
    e.source_file = require_string(je, "source_file", where);
    e.dataset_id = d.dataset_id;
    d.elements.push_back(std::move(e));
  }

  d.canonicalize();
  d.validate();
  return d;
}

std::string read_file(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw IoError("cannot open " + source.string());
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read " + source.string());
  return contents;
}

void write_file_atomic(const std::filesystem::path& destination, std::string_view contents) {
  auto tmp = destination;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, destination, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot replace " + destination.string());
  }
}

void write_unified_file(const Dataset& dataset, const std::filesystem::path& destination) {
  write_file_atomic(destination, write_unified(dataset));
}

Dataset read_unified_file(const std::filesystem::path& source) {
  return read_unified(read_file(source));
}

}  // namespace exportscope
