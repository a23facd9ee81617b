#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace exportscope {

struct FieldRef {
  enum class Scope { kRecord, kAncestors, kSelf };
  Scope scope = Scope::kRecord;
  std::vector<std::string> segments;
};

struct TemplatePiece {
  std::string literal;
  std::optional<FieldRef> field;
};

using CompiledTemplate = std::vector<TemplatePiece>;

FieldRef parse_field_ref(std::string_view ref);
std::optional<CompiledTemplate> compile_template(std::string_view text);

// A record together with the objects enclosing it, outermost first.
struct RecordContext {
  const nlohmann::json* record = nullptr;
  std::span<const nlohmann::json* const> ancestors;
};

const nlohmann::json* resolve(const FieldRef& ref, const RecordContext& ctx);

// Scalars render as text, arrays of scalars join with ", ". Null, objects
// and nested arrays do not render.
std::optional<std::string> render_value(const nlohmann::json& v);

// nullopt when any placeholder fails to resolve.
std::optional<std::string> render(const CompiledTemplate& t, const RecordContext& ctx);
// Unresolved placeholders render as empty text.
std::string render_lenient(const CompiledTemplate& t, const RecordContext& ctx);

}  // namespace exportscope
