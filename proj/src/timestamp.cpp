#include "exportscope/timestamp.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>

namespace exportscope {

using namespace std::chrono;

namespace {

std::optional<Timestamp> checked(std::int64_t unix_seconds) {
  // Bound first so the chrono arithmetic cannot overflow.
  if (unix_seconds < -62135596800LL || unix_seconds > 253402300799LL) return std::nullopt;
  const Timestamp t = from_unix_seconds(unix_seconds);
  if (!in_document_range(t)) return std::nullopt;
  return t;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t unit_divisor(TimeFormat f) {
  switch (f) {
    case TimeFormat::kEpochMillis:
      return 1000;
    case TimeFormat::kEpochMicros:
      return 1000000;
    default:
      return 1;
  }
}

std::optional<Timestamp> from_integer(std::int64_t v, TimeFormat hint) {
  if (hint == TimeFormat::kAuto) {
    const double mag = std::abs(static_cast<double>(v));
    hint = mag >= kEpochMillisThreshold ? TimeFormat::kEpochMillis : TimeFormat::kEpochSeconds;
  }
  if (hint != TimeFormat::kEpochSeconds && hint != TimeFormat::kEpochMillis &&
      hint != TimeFormat::kEpochMicros) {
    return std::nullopt;
  }
  return checked(floor_div(v, unit_divisor(hint)));
}

std::optional<Timestamp> from_double(double v, TimeFormat hint) {
  if (!std::isfinite(v)) return std::nullopt;
  if (hint == TimeFormat::kAuto) {
    hint = std::abs(v) >= kEpochMillisThreshold ? TimeFormat::kEpochMillis
                                                : TimeFormat::kEpochSeconds;
  }
  if (hint != TimeFormat::kEpochSeconds && hint != TimeFormat::kEpochMillis &&
      hint != TimeFormat::kEpochMicros) {
    return std::nullopt;
  }
  const double secs = std::floor(v / static_cast<double>(unit_divisor(hint)));
  if (std::abs(secs) > 1e12) return std::nullopt;
  return checked(static_cast<std::int64_t>(secs));
}

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return i_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[i_]; }
  bool eat(char c) {
    if (peek() != c) return false;
    ++i_;
    return true;
  }
  bool digits(std::size_t n, int& out) {
    if (i_ + n > s_.size()) return false;
    int v = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const char c = s_[i_ + k];
      if (c < '0' || c > '9') return false;
      v = v * 10 + (c - '0');
    }
    i_ += n;
    out = v;
    return true;
  }
  void skip_digits() {
    while (!done() && s_[i_] >= '0' && s_[i_] <= '9') ++i_;
  }
  void skip_spaces() {
    while (!done() && s_[i_] == ' ') ++i_;
  }
  bool word(std::string_view w) {
    if (s_.substr(i_, w.size()) != w) return false;
    i_ += w.size();
    return true;
  }
  std::string_view take(std::size_t n) {
    const auto out = s_.substr(i_, n);
    i_ += out.size();
    return out;
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
};

std::optional<Timestamp> compose(int y, int mo, int d, int h, int mi, int s, int offset_seconds) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (y < 1 || !ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  if (s == 60) s = 59;  // leap second, clamp
  const auto local = time_point_cast<seconds>(sys_days{ymd}) + hours{h} + minutes{mi} + seconds{s};
  return checked(to_unix_seconds(local) - offset_seconds);
}

// Parses "+HH:MM", "+HHMM", "+HH", "Z", " UTC"; returns false on junk.
bool parse_offset(Cursor& c, int& offset_seconds) {
  offset_seconds = 0;
  c.skip_spaces();
  if (c.done()) return true;
  if (c.eat('Z') || c.eat('z') || c.word("UTC") || c.word("GMT")) return c.done();
  const char sign = c.peek();
  if (sign != '+' && sign != '-') return false;
  c.eat(sign);
  int oh = 0, om = 0;
  if (!c.digits(2, oh)) return false;
  c.eat(':');
  if (!c.done() && !c.digits(2, om)) return false;
  if (!c.done() || oh > 23 || om > 59) return false;
  offset_seconds = (sign == '-' ? -1 : 1) * (oh * 3600 + om * 60);
  return true;
}

std::optional<Timestamp> parse_iso(std::string_view text) {
  Cursor c(text);
  int y, mo, d, h = 0, mi = 0, s = 0;
  if (!c.digits(4, y) || !c.eat('-') || !c.digits(2, mo) || !c.eat('-') || !c.digits(2, d)) {
    return std::nullopt;
  }
  if (c.done()) return compose(y, mo, d, 0, 0, 0, 0);
  if (!c.eat('T') && !c.eat('t') && !c.eat(' ')) return std::nullopt;
  if (!c.digits(2, h) || !c.eat(':') || !c.digits(2, mi)) return std::nullopt;
  if (c.eat(':')) {
    if (!c.digits(2, s)) return std::nullopt;
    if (c.eat('.') || c.eat(',')) c.skip_digits();
  }
  int offset = 0;
  if (!parse_offset(c, offset)) return std::nullopt;
  return compose(y, mo, d, h, mi, s, offset);
}

constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

std::optional<Timestamp> parse_twitter(std::string_view text) {
  // "Wed Oct 10 20:19:24 +0000 2018"
  Cursor c(text);
  c.take(3);
  if (!c.eat(' ')) return std::nullopt;
  const auto mon = c.take(3);
  int mo = 0;
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (kMonths[i] == mon) mo = static_cast<int>(i) + 1;
  }
  int d, h, mi, s, oh, om, y;
  if (mo == 0 || !c.eat(' ') || !c.digits(2, d) || !c.eat(' ') || !c.digits(2, h) ||
      !c.eat(':') || !c.digits(2, mi) || !c.eat(':') || !c.digits(2, s) || !c.eat(' ')) {
    return std::nullopt;
  }
  const char sign = c.peek();
  if ((!c.eat('+') && !c.eat('-')) || !c.digits(2, oh) || !c.digits(2, om) || !c.eat(' ') ||
      !c.digits(4, y) || !c.done()) {
    return std::nullopt;
  }
  return compose(y, mo, d, h, mi, s, (sign == '-' ? -1 : 1) * (oh * 3600 + om * 60));
}

bool is_numeric(std::string_view s, bool& has_fraction) {
  has_fraction = false;
  std::size_t i = 0;
  if (i < s.size() && s[i] == '-') ++i;
  const std::size_t int_start = i;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  if (i == int_start) return false;
  if (i < s.size() && s[i] == '.') {
    has_fraction = true;
    ++i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  }
  return i == s.size();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

std::optional<TimeFormat> parse_time_format(std::string_view name) {
  if (name == "auto") return TimeFormat::kAuto;
  if (name == "epoch_s") return TimeFormat::kEpochSeconds;
  if (name == "epoch_ms") return TimeFormat::kEpochMillis;
  if (name == "epoch_us") return TimeFormat::kEpochMicros;
  if (name == "iso8601") return TimeFormat::kIso8601;
  if (name == "twitter") return TimeFormat::kTwitter;
  return std::nullopt;
}

std::optional<Timestamp> parse_timestamp_text(std::string_view text, TimeFormat hint) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  bool has_fraction = false;
  if (is_numeric(text, has_fraction)) {
    if (hint == TimeFormat::kIso8601 || hint == TimeFormat::kTwitter) return std::nullopt;
    if (!has_fraction) {
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
      return from_integer(v, hint);
    }
    double v = 0;
    try {
      v = std::stod(std::string(text));
    } catch (...) {
      return std::nullopt;
    }
    return from_double(v, hint);
  }
  switch (hint) {
    case TimeFormat::kIso8601:
      return parse_iso(text);
    case TimeFormat::kTwitter:
      return parse_twitter(text);
    case TimeFormat::kAuto: {
      if (auto t = parse_iso(text)) return t;
      return parse_twitter(text);
    }
    default:
      return std::nullopt;
  }
}

std::optional<Timestamp> parse_timestamp(const nlohmann::json& raw, TimeFormat hint) {
  if (raw.is_number_integer()) {
    if (raw.is_number_unsigned() &&
        raw.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      return std::nullopt;
    }
    return from_integer(raw.get<std::int64_t>(), hint);
  }
  if (raw.is_number_float()) return from_double(raw.get<double>(), hint);
  if (raw.is_string()) return parse_timestamp_text(raw.get_ref<const std::string&>(), hint);
  return std::nullopt;
}

}  // namespace exportscope
