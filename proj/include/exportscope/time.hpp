#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace exportscope {

// All element times are UTC with second precision.
using Timestamp = std::chrono::sys_seconds;

inline constexpr std::int64_t kSecondsPerDay = 86400;

// Earliest and latest instants representable in the unified document
// (four-digit years).
Timestamp min_timestamp();
Timestamp max_timestamp();
bool in_document_range(Timestamp t);

// "2019-01-01T12:34:56Z"
std::string format_rfc3339(Timestamp t);

// Accepts exactly the form produced by format_rfc3339.
std::optional<Timestamp> parse_rfc3339_utc(std::string_view text);

inline Timestamp from_unix_seconds(std::int64_t s) {
  return Timestamp{std::chrono::seconds{s}};
}
inline std::int64_t to_unix_seconds(Timestamp t) {
  return t.time_since_epoch().count();
}

// Floor division helpers used by the timeline projection.
std::int64_t days_since_epoch(Timestamp t);
std::int64_t seconds_of_day(Timestamp t);

}  // namespace exportscope
