#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "exportscope/model.hpp"

namespace exportscope {

inline constexpr int kUnifiedSchemaVersion = 1;

// Canonical unified-export document: compact UTF-8 JSON, fixed key order,
// files sorted by path, elements in element_order.
std::string write_unified(const Dataset& dataset);

// Writes atomically (temporary file, then rename). Throws IoError.
void write_unified_file(const Dataset& dataset, const std::filesystem::path& destination);

// Throws FormatVersionError for an unsupported schema_version and
// ValidationError (naming the field) for anything else.
Dataset read_unified(std::string_view document);
Dataset read_unified_file(const std::filesystem::path& source);

// Shared by every writer of local files.
void write_file_atomic(const std::filesystem::path& destination, std::string_view contents);
std::string read_file(const std::filesystem::path& source);

}  // namespace exportscope
