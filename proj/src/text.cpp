#include "exportscope/text.hpp"

#include <nlohmann/json.hpp>

#include "exportscope/error.hpp"

namespace exportscope {

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

namespace {

// Decodes one scalar value at s[i]; returns its byte length or 0 if invalid.
std::size_t decode_one(std::string_view s, std::size_t i, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  std::size_t len;
  char32_t min;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
    min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
    min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
    min = 0x10000;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

// One repair step. Returns false when s is left as is.
bool repair_step(std::string_view s, std::string& out) {
  std::string lifted;
  lifted.reserve(s.size());
  bool changed = false;
  for (std::size_t i = 0; i < s.size();) {
    char32_t cp;
    const std::size_t n = decode_one(s, i, cp);
    if (n == 0 || cp >= 0x100) return false;
    if (cp >= 0x80) changed = true;
    lifted += static_cast<char>(cp);
    i += n;
  }
  if (!changed || !is_valid_utf8(lifted)) return false;
  out = std::move(lifted);
  return true;
}

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$';
}

bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

}  // namespace

bool decode_utf8(std::string_view s, std::u32string& out) {
  out.clear();
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    char32_t cp;
    const std::size_t n = decode_one(s, i, cp);
    if (n == 0) return false;
    out += cp;
    i += n;
  }
  return true;
}

bool is_valid_utf8(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    char32_t cp;
    const std::size_t n = decode_one(s, i, cp);
    if (n == 0) return false;
    i += n;
  }
  return true;
}

std::string sanitize_utf8(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    char32_t cp;
    const std::size_t n = decode_one(s, i, cp);
    if (n == 0) {
      append_utf8(out, 0xFFFD);
      ++i;
    } else {
      out.append(s.substr(i, n));
      i += n;
    }
  }
  return out;
}

std::string repair_mojibake(std::string_view s) {
  std::string current(s);
  std::string next;
  // Every step shrinks the byte length, so this terminates.
  while (repair_step(current, next)) current.swap(next);
  return current;
}

std::string unwrap_js_export(std::string_view content) {
  std::size_t i = 0;
  if (content.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  auto skip_space = [&] {
    while (i < content.size() && is_space(content[i])) ++i;
  };
  skip_space();
  for (std::string_view kw : {"var", "let", "const"}) {
    if (content.substr(i, kw.size()) == kw && i + kw.size() < content.size() &&
        is_space(content[i + kw.size()])) {
      i += kw.size();
      skip_space();
      break;
    }
  }

  if (i >= content.size() || !is_ident_start(content[i])) {
    throw WrapperFormatError("no variable assignment found");
  }
  // Dotted identifier with optional ["key"] / [0] subscripts.
  while (true) {
    while (i < content.size() && is_ident_char(content[i])) ++i;
    if (i < content.size() && content[i] == '.') {
      ++i;
      if (i >= content.size() || !is_ident_start(content[i])) {
        throw WrapperFormatError("malformed identifier before '='");
      }
      continue;
    }
    if (i < content.size() && content[i] == '[') {
      const auto close = content.find(']', i);
      if (close == std::string_view::npos) throw WrapperFormatError("unterminated subscript");
      i = close + 1;
      continue;
    }
    break;
  }
  skip_space();
  if (i >= content.size() || content[i] != '=' ||
      (i + 1 < content.size() && content[i + 1] == '=')) {
    throw WrapperFormatError("no variable assignment found");
  }
  ++i;

  std::string_view literal = content.substr(i);
  while (!literal.empty() && is_space(literal.front())) literal.remove_prefix(1);
  while (!literal.empty() && (is_space(literal.back()) || literal.back() == ';')) {
    literal.remove_suffix(1);
  }
  if (literal.empty() || !nlohmann::json::accept(literal)) {
    throw WrapperFormatError("assigned value is not a JSON document");
  }
  return std::string(literal);
}

char32_t fold_case(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if (cp == 0xB5) return 0x3BC;
  if (cp >= 0x100 && cp <= 0x17F) {
    if ((cp <= 0x12F) || (cp >= 0x132 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) {
      return (cp % 2 == 0) ? cp + 1 : cp;
    }
    if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
      return (cp % 2 == 1) ? cp + 1 : cp;
    }
    if (cp == 0x178) return 0xFF;
    if (cp == 0x17F) return 's';
    return cp;
  }
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32;
  if (cp == 0x3C2) return 0x3C3;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  return cp;
}

std::string casefold_utf8(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    char32_t cp;
    const std::size_t n = decode_one(s, i, cp);
    if (n == 0) {
      out += s[i];
      ++i;
      continue;
    }
    if (cp < 0x80) {
      out += static_cast<char>(fold_case(cp));
    } else {
      append_utf8(out, fold_case(cp));
    }
    i += n;
  }
  return out;
}

}  // namespace exportscope
