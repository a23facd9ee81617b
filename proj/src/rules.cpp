#include "exportscope/rules.hpp"

#include <nlohmann/json.hpp>

#include "embedded.hpp"
#include "exportscope/error.hpp"
#include "exportscope/ingest.hpp"
#include "template.hpp"

namespace exportscope {

using nlohmann::json;

const ParserRule* RuleSet::match(std::string_view path) const {
  for (const auto& rule : rules) {
    if (glob_match(rule.path_glob, path)) return &rule;
  }
  return nullptr;
}

namespace {

std::vector<std::string> split_records_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto slash = path.find('/', start);
    const auto seg = path.substr(start, slash == std::string::npos ? std::string::npos : slash - start);
    if (!seg.empty()) out.push_back(seg);
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  return out;
}

std::string get_string(const json& rule, const char* key, const std::string& where, bool required) {
  const auto it = rule.find(key);
  if (it == rule.end()) {
    if (required) throw RuleError(where + ": missing '" + key + "'");
    return {};
  }
  if (!it->is_string()) throw RuleError(where + ": '" + key + "' must be a string");
  return it->get<std::string>();
}

ParserRule parse_rule(const json& j, const std::string& service, std::size_t index) {
  std::string where = service + " rule #" + std::to_string(index);
  if (!j.is_object()) throw RuleError(where + ": must be an object");
  ParserRule rule;
  rule.name = get_string(j, "name", where, true);
  where = service + " rule '" + rule.name + "'";
  rule.path_glob = get_string(j, "path", where, true);
  if (rule.path_glob.empty()) throw RuleError(where + ": empty path glob");

  const std::string format = get_string(j, "format", where, true);
  if (format == "json") {
    rule.format = RecordFormat::kJson;
  } else if (format == "js-wrapped-json") {
    rule.format = RecordFormat::kJsWrappedJson;
  } else if (format == "csv") {
    rule.format = RecordFormat::kCsv;
  } else {
    throw RuleError(where + ": unknown format '" + format + "'");
  }

  const auto category = parse_category(get_string(j, "category", where, true));
  if (!category) throw RuleError(where + ": unknown category");
  rule.category = *category;

  rule.records_path = split_records_path(get_string(j, "records", where, false));
  const std::string each = get_string(j, "each", where, false);
  if (each.empty() || each == "elements") {
    rule.each = RecordExpansion::kElements;
  } else if (each == "entries") {
    rule.each = RecordExpansion::kEntries;
  } else {
    throw RuleError(where + ": 'each' must be 'elements' or 'entries'");
  }

  if (const auto t = j.find("time"); t != j.end() && !t->is_null()) {
    if (!t->is_object()) throw RuleError(where + ": 'time' must be an object");
    TimeRecipe recipe;
    recipe.field = get_string(*t, "field", where + ".time", true);
    const std::string fmt = get_string(*t, "format", where + ".time", false);
    const auto parsed = parse_time_format(fmt.empty() ? "auto" : fmt);
    if (!parsed) throw RuleError(where + ": unknown time format '" + fmt + "'");
    recipe.format = *parsed;
    rule.time = std::move(recipe);
  }

  const auto text = j.find("text");
  if (text == j.end()) throw RuleError(where + ": missing 'text'");
  if (text->is_string()) {
    rule.text_templates.push_back(text->get<std::string>());
  } else if (text->is_array() && !text->empty()) {
    for (const auto& t : *text) {
      if (!t.is_string()) throw RuleError(where + ": 'text' entries must be strings");
      rule.text_templates.push_back(t.get<std::string>());
    }
  } else {
    throw RuleError(where + ": 'text' must be a template or a non-empty list of templates");
  }
  for (const auto& t : rule.text_templates) {
    if (!compile_template(t)) throw RuleError(where + ": malformed template '" + t + "'");
  }

  if (j.contains("subcategory")) {
    rule.subcategory = get_string(j, "subcategory", where, true);
    if (!compile_template(*rule.subcategory)) {
      throw RuleError(where + ": malformed subcategory template");
    }
  }
  if (const auto r = j.find("repair_encoding"); r != j.end()) {
    if (!r->is_boolean()) throw RuleError(where + ": 'repair_encoding' must be a boolean");
    rule.repair_encoding = r->get<bool>();
  }
  return rule;
}

}  // namespace

RuleSet parse_rule_file(std::string_view document) {
  const json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw RuleError("rule file is not a JSON object");
  if (doc.value("schema_version", 0) != 1) throw RuleError("rule file needs schema_version 1");
  RuleSet set;
  set.service = get_string(doc, "service", "rule file", true);
  if (set.service.empty()) throw RuleError("rule file: empty service");
  const auto rules = doc.find("rules");
  if (rules == doc.end() || !rules->is_array()) throw RuleError("rule file: 'rules' must be an array");
  for (std::size_t i = 0; i < rules->size(); ++i) {
    set.rules.push_back(parse_rule((*rules)[i], set.service, i));
  }
  return set;
}

const std::map<std::string, RuleSet>& default_rules() {
  static const std::map<std::string, RuleSet> table = [] {
    std::map<std::string, RuleSet> out;
    for (const auto document : embedded::rule_files()) {
      RuleSet set = parse_rule_file(document);
      std::string service = set.service;
      out.emplace(std::move(service), std::move(set));
    }
    return out;
  }();
  return table;
}

const RuleSet& default_rules_for(std::string_view service) {
  const auto& table = default_rules();
  const auto it = table.find(std::string(service));
  if (it == table.end()) throw UnsupportedServiceError("no rules for service " + std::string(service));
  return it->second;
}

}  // namespace exportscope
