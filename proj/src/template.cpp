#include "template.hpp"

#include <charconv>

namespace exportscope {

using nlohmann::json;

FieldRef parse_field_ref(std::string_view ref) {
  FieldRef out;
  if (ref.empty() || ref == ".") {
    out.scope = FieldRef::Scope::kSelf;
    return out;
  }
  if (ref.front() == '^') {
    out.scope = FieldRef::Scope::kAncestors;
    ref.remove_prefix(1);
  }
  std::size_t start = 0;
  while (start <= ref.size()) {
    const auto dot = ref.find('.', start);
    out.segments.emplace_back(ref.substr(start, dot == std::string_view::npos ? ref.npos : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return out;
}

std::optional<CompiledTemplate> compile_template(std::string_view text) {
  CompiledTemplate out;
  std::string literal;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '{' && i + 1 < text.size() && text[i + 1] == '{') {
      literal += '{';
      ++i;
    } else if (c == '}' && i + 1 < text.size() && text[i + 1] == '}') {
      literal += '}';
      ++i;
    } else if (c == '{') {
      const auto close = text.find('}', i);
      if (close == std::string_view::npos) return std::nullopt;
      const auto ref = text.substr(i + 1, close - i - 1);
      if (ref.find('{') != std::string_view::npos) return std::nullopt;
      if (!literal.empty()) out.push_back({std::move(literal), std::nullopt});
      literal.clear();
      out.push_back({{}, parse_field_ref(ref)});
      i = close;
    } else if (c == '}') {
      return std::nullopt;
    } else {
      literal += c;
    }
  }
  if (!literal.empty()) out.push_back({std::move(literal), std::nullopt});
  return out;
}

namespace {

const json* walk(const json* node, const std::vector<std::string>& segments) {
  for (const auto& seg : segments) {
    if (node->is_object()) {
      const auto it = node->find(seg);
      if (it == node->end()) return nullptr;
      node = &*it;
    } else if (node->is_array()) {
      std::size_t idx = 0;
      const auto [ptr, ec] = std::from_chars(seg.data(), seg.data() + seg.size(), idx);
      if (ec != std::errc() || ptr != seg.data() + seg.size() || idx >= node->size()) {
        return nullptr;
      }
      node = &(*node)[idx];
    } else {
      return nullptr;
    }
  }
  return node;
}

}  // namespace

const json* resolve(const FieldRef& ref, const RecordContext& ctx) {
  switch (ref.scope) {
    case FieldRef::Scope::kSelf:
      return ctx.record;
    case FieldRef::Scope::kRecord:
      return walk(ctx.record, ref.segments);
    case FieldRef::Scope::kAncestors:
      for (auto it = ctx.ancestors.rbegin(); it != ctx.ancestors.rend(); ++it) {
        if (const json* hit = walk(*it, ref.segments)) return hit;
      }
      return nullptr;
  }
  return nullptr;
}

std::optional<std::string> render_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean() || v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const json& item = v[i];
      std::optional<std::string> part;
      if (item.is_object() && item.size() == 1) {
        // [{"name": "A"}, {"name": "B"}] renders as "A, B".
        part = render_value(item.begin().value());
        if (part && item.begin().value().is_array()) part.reset();
      } else if (!item.is_array()) {
        part = render_value(item);
      }
      if (!part) return std::nullopt;
      if (i > 0) out += ", ";
      out += *part;
    }
    return out;
  }
  return std::nullopt;
}

std::optional<std::string> render(const CompiledTemplate& t, const RecordContext& ctx) {
  std::string out;
  for (const auto& piece : t) {
    if (!piece.field) {
      out += piece.literal;
      continue;
    }
    const json* v = resolve(*piece.field, ctx);
    if (v == nullptr) return std::nullopt;
    auto text = render_value(*v);
    if (!text) return std::nullopt;
    out += *text;
  }
  return out;
}

std::string render_lenient(const CompiledTemplate& t, const RecordContext& ctx) {
  std::string out;
  for (const auto& piece : t) {
    if (!piece.field) {
      out += piece.literal;
      continue;
    }
    if (const json* v = resolve(*piece.field, ctx)) {
      if (auto text = render_value(*v)) out += *text;
    }
  }
  return out;
}

}  // namespace exportscope
