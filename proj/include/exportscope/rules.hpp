#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exportscope/model.hpp"
#include "exportscope/timestamp.hpp"

namespace exportscope {

enum class RecordFormat { kJson, kJsWrappedJson, kCsv };

// How the node at the end of the records path turns into records.
enum class RecordExpansion {
  kElements,  // array items (or the node itself when it is not an array)
  kEntries,   // object members, each as {"key": name, "value": member}
};

// Field references inside a record: dotted path ("data.0.post"), "^name"
// to search the enclosing objects from nearest to the document root, or
// "." for the record itself.
struct TimeRecipe {
  std::string field;
  TimeFormat format = TimeFormat::kAuto;
};

// One declarative extraction rule. Templates are literal text with {field}
// placeholders; "{{" and "}}" escape braces.
struct ParserRule {
  std::string name;
  std::string path_glob;
  RecordFormat format = RecordFormat::kJson;
  Category category = Category::kOther;
  std::vector<std::string> records_path;  // segments; "*" iterates arrays and objects
  RecordExpansion each = RecordExpansion::kElements;
  std::optional<TimeRecipe> time;
  std::vector<std::string> text_templates;     // first fully resolvable one wins
  std::optional<std::string> subcategory;      // defaults to the rule name
  bool repair_encoding = false;
};

struct RuleSet {
  std::string service;
  std::vector<ParserRule> rules;

  // First rule (in file order) whose glob matches the path.
  const ParserRule* match(std::string_view path) const;
};

// Parses a rule file; throws RuleError with the offending rule named.
RuleSet parse_rule_file(std::string_view document);

// Built-in rule tables keyed by service.
const std::map<std::string, RuleSet>& default_rules();
const RuleSet& default_rules_for(std::string_view service);

}  // namespace exportscope
