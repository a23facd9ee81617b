#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string_view>

#include "exportscope/time.hpp"

namespace exportscope {

enum class TimeFormat {
  kAuto,          // numbers by magnitude, strings as ISO-8601 then Twitter style
  kEpochSeconds,
  kEpochMillis,
  kEpochMicros,
  kIso8601,
  kTwitter,       // "Wed Oct 10 20:19:24 +0000 2018"
};

std::optional<TimeFormat> parse_time_format(std::string_view name);

// Numbers at or above this magnitude are read as epoch milliseconds in kAuto.
inline constexpr double kEpochMillisThreshold = 1e11;

// Never throws; anything unreadable or outside years 1..9999 yields nullopt.
std::optional<Timestamp> parse_timestamp(const nlohmann::json& raw,
                                         TimeFormat hint = TimeFormat::kAuto);
std::optional<Timestamp> parse_timestamp_text(std::string_view text,
                                              TimeFormat hint = TimeFormat::kAuto);

}  // namespace exportscope
