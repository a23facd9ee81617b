#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace exportscope {

void append_utf8(std::string& out, char32_t cp);

// Strict decoding (no overlongs, no surrogates). Returns false on invalid input.
bool decode_utf8(std::string_view s, std::u32string& out);
bool is_valid_utf8(std::string_view s);

// Replaces every invalid sequence with U+FFFD.
std::string sanitize_utf8(std::string_view s);

// Undoes UTF-8 text that was decoded as Latin-1 and re-encoded, the way some
// exports escape every byte of a UTF-8 string as its own \u00XX codepoint.
// Repeats until a fixpoint, so layered corruption is peeled completely and
// repair(repair(s)) == repair(s).
std::string repair_mojibake(std::string_view s);

// Extracts the literal from `some.dotted.name = <json>;`. Throws
// WrapperFormatError when there is no assignment or the literal is not JSON.
std::string unwrap_js_export(std::string_view content);

// Simple (one-to-one) case folding over Latin, Greek and Cyrillic.
char32_t fold_case(char32_t cp);
std::string casefold_utf8(std::string_view s);

}  // namespace exportscope
