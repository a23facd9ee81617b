#include "exportscope/fixture.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <span>

#include <nlohmann/json.hpp>

#include "exportscope/error.hpp"
#include "exportscope/text.hpp"
#include "exportscope/zip.hpp"

namespace exportscope {

using J = nlohmann::ordered_json;

std::uint64_t FixtureVolume::total_elements() const {
  return std::uint64_t{conversations} * messages_per_conversation + posts + logins + locations +
         searches + media_files + contacts + activities + account_records;
}

void FixtureSpec::validate() const {
  auto check_span = [](const TimeExtent& s, const std::string& field) {
    if (s.min > s.max) throw ValidationError(field, "start must not be after end");
    if (!in_document_range(s.min) || !in_document_range(s.max)) {
      throw ValidationError(field, "outside the representable range");
    }
  };
  auto inside = [&](const TimeExtent& s) {
    return s.min >= time_span.min && s.max <= time_span.max;
  };
  check_span(time_span, "time_span");
  if (featured) {
    if (featured->partner.empty()) throw ValidationError("featured.partner", "must not be empty");
    check_span(featured->time_span, "featured.time_span");
    if (!inside(featured->time_span)) {
      throw ValidationError("featured.time_span", "must lie inside time_span");
    }
  }
  for (const auto& [c, s] : category_spans) {
    const std::string field = "category_spans." + std::string(category_name(c));
    check_span(s, field);
    if (!inside(s)) throw ValidationError(field, "must lie inside time_span");
  }
  if (!(non_ascii_fraction >= 0.0 && non_ascii_fraction <= 1.0)) {
    throw ValidationError("non_ascii_fraction", "must lie in [0, 1]");
  }
  if (owner.empty()) throw ValidationError("owner", "must not be empty");
}

std::uint64_t FixtureManifest::total_elements() const {
  std::uint64_t n = 0;
  for (auto c : expected_counts) n += c;
  return n;
}

std::string FixtureManifest::to_document() const {
  J doc;
  doc["expected_service"] = expected_service;
  J files_json = J::array();
  for (const auto& f : files) {
    J j;
    j["path"] = f.path;
    j["size_bytes"] = f.size_bytes;
    j["file_category"] = file_category_name(f.file_category);
    j["data_category"] = f.data_category ? J(category_name(*f.data_category)) : J(nullptr);
    j["element_count"] = f.element_count;
    files_json.push_back(std::move(j));
  }
  doc["files"] = std::move(files_json);
  J counts = J::object();
  for (auto c : kAllCategories) counts[std::string(category_name(c))] = count(c);
  doc["expected_counts"] = std::move(counts);
  return doc.dump(2);
}

FixtureManifest FixtureManifest::from_document(std::string_view document) {
  const auto doc = nlohmann::json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ValidationError("manifest", "must be a JSON object");
  }
  FixtureManifest m;
  try {
    m.expected_service = doc.at("expected_service").get<std::string>();
    for (const auto& f : doc.at("files")) {
      ManifestFile mf;
      mf.path = f.at("path").get<std::string>();
      mf.size_bytes = f.at("size_bytes").get<std::uint64_t>();
      const auto fc = parse_file_category(f.at("file_category").get<std::string>());
      if (!fc) throw ValidationError("files.file_category", "unknown file category");
      mf.file_category = *fc;
      if (!f.at("data_category").is_null()) {
        mf.data_category = parse_category(f.at("data_category").get<std::string>());
        if (!mf.data_category) throw ValidationError("files.data_category", "unknown category");
      }
      mf.element_count = f.at("element_count").get<std::uint64_t>();
      m.files.push_back(std::move(mf));
    }
    for (const auto& [name, n] : doc.at("expected_counts").items()) {
      const auto c = parse_category(name);
      if (!c) throw ValidationError("expected_counts", "unknown category " + name);
      m.expected_counts[static_cast<std::size_t>(*c)] = n.get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("manifest", e.what());
  }
  return m;
}

const std::vector<std::string>& fixture_services() {
  static const std::vector<std::string> services = {"facebook", "google", "instagram", "twitter"};
  return services;
}

namespace {

// std distributions differ between standard libraries, so draws are mapped
// onto ranges by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t below(std::uint64_t n) { return n <= 1 ? 0 : eng_() % n; }
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  template <typename T>
  const T& pick(std::span<const T> items) {
    return items[below(items.size())];
  }
  std::string hex(std::size_t digits) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s;
    for (std::size_t i = 0; i < digits; ++i) s += kHex[below(16)];
    return s;
  }
  std::string digits(std::size_t n) {
    std::string s(1, static_cast<char>('1' + below(9)));
    for (std::size_t i = 1; i < n; ++i) s += static_cast<char>('0' + below(10));
    return s;
  }

 private:
  std::mt19937_64 eng_;
};

// None of these may contain the featured partners' names.
constexpr std::string_view kFirstNames[] = {
    "Ben",  "Clara", "David", "Emma", "Felix",  "Greta", "Hannah", "Ivan",
    "Julia", "Karl", "Lena",  "Mia",  "Noah",   "Olga",  "Paul",   "Rosa",
    "Sven", "Tara",  "Ulla",  "Viktor", "Wanda", "Yusuf", "Zoe",   "Oskar",
};
constexpr std::string_view kLastNames[] = {
    "Meyer", "Schmidt", "Fischer", "Weber",  "Wagner", "Becker", "Hoffmann",
    "Koch",  "Richter", "Klein",   "Wolf",   "Neumann", "Braun", "Hartmann",
};
constexpr std::string_view kWords[] = {
    "coffee", "tomorrow", "meeting",  "train",  "weekend", "movie",   "dinner",  "project",
    "birthday", "holiday", "weather", "concert", "book",   "garden",  "lunch",   "football",
    "picture", "music",   "city",     "beach",  "mountain", "bike",   "exam",    "office",
    "party",  "recipe",   "sunset",   "museum", "market",  "library", "tonight", "great",
    "thanks", "later",    "really",   "maybe",  "funny",   "soon",    "home",    "work",
};
constexpr std::string_view kNonAsciiWords[] = {
    "café", "Grüße", "naïve", "Zürich", "crème brûlée", "smörgåsbord", "Kraków", "São Paulo",
    "\xF0\x9F\x98\x80", "\xF0\x9F\x91\x8D", "déjà vu", "Straße",
};
constexpr std::string_view kCities[] = {
    "Berlin", "Hamburg", "Munich", "Vienna", "Zurich", "Amsterdam", "Copenhagen",
    "Prague", "Lisbon",  "Oslo",   "Dublin", "Madrid", "Stockholm", "Helsinki",
};
constexpr std::string_view kCountries[] = {"DE", "AT", "CH", "NL", "DK", "CZ", "PT", "NO"};
constexpr std::string_view kAdvertisers[] = {
    "Northwind Outdoor", "Contoso Travel", "Fabrikam Shoes", "Tailspin Games",
    "Wingtip Coffee",    "Litware Books",  "Proseware Audio", "Adatum Bank",
};
constexpr std::string_view kUserAgents[] = {
    "Mozilla/5.0 (X11; Linux x86_64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/70.0",
    "Mozilla/5.0 (iPhone; CPU iPhone OS 12_1 like Mac OS X) AppleWebKit/605.1.15",
    "Mozilla/5.0 (Windows NT 10.0; Win64; x64; rv:64.0) Gecko/20100101 Firefox/64.0",
};

template <typename T, std::size_t N>
std::span<const T> all(const T (&a)[N]) {
  return std::span<const T>(a, N);
}

struct Message {
  std::string sender;
  Timestamp time;
  std::string text;
};

struct Conversation {
  std::string partner;
  std::vector<Message> messages;
};

struct Civil {
  int year;
  unsigned month, day, hour, minute, second, weekday;
};

Civil civil(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
          static_cast<unsigned>(ymd.day()), static_cast<unsigned>(hms.hours().count()),
          static_cast<unsigned>(hms.minutes().count()), static_cast<unsigned>(hms.seconds().count()),
          weekday{day}.c_encoding()};
}

std::string fmt(const char* pattern, const Civil& c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, c.year, c.month, c.day, c.hour, c.minute, c.second);
  return buf;
}

// "2019-01-01T12:34:56.789Z"
std::string iso_millis(Timestamp t, unsigned millis) {
  char buf[8];
  std::snprintf(buf, sizeof buf, ".%03uZ", millis % 1000);
  return fmt("%04d-%02u-%02uT%02u:%02u:%02u", civil(t)) + buf;
}
std::string iso_offset(Timestamp t) { return fmt("%04d-%02u-%02uT%02u:%02u:%02u+00:00", civil(t)); }
std::string iso_z(Timestamp t) { return fmt("%04d-%02u-%02uT%02u:%02u:%02uZ", civil(t)); }
std::string spaced(Timestamp t) { return fmt("%04d-%02u-%02u %02u:%02u:%02u", civil(t)); }

// "Wed Oct 10 20:19:24 +0000 2018"
std::string twitter_time(Timestamp t) {
  static constexpr const char* kDays[] = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};
  static constexpr const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                            "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  const Civil c = civil(t);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s %s %02u %02u:%02u:%02u +0000 %04d", kDays[c.weekday],
                kMonths[c.month - 1], c.day, c.hour, c.minute, c.second, c.year);
  return buf;
}

// Facebook writes UTF-8 bytes as \u00XX escapes. Lifting each byte to a code
// point and dumping with ensure_ascii reproduces that.
std::string lift_bytes(std::string_view s) {
  std::string out;
  for (unsigned char b : s) append_utf8(out, b);
  return out;
}

void lift_strings(J& j) {
  if (j.is_string()) {
    j = lift_bytes(j.get_ref<const std::string&>());
  } else if (j.is_structured()) {
    for (auto& child : j) lift_strings(child);
  }
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

std::string slug(std::string_view s) {
  std::string out;
  for (char ch : lowercase(s)) {
    if ((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9')) out += ch;
  }
  return out.empty() ? "x" : out;
}

class Generator {
 public:
  explicit Generator(const FixtureSpec& spec) : spec_(spec), rng_(spec.seed) {}

  Fixture run() {
    if (spec_.service == "facebook") {
      facebook();
    } else if (spec_.service == "google") {
      google();
    } else if (spec_.service == "twitter") {
      twitter();
    } else if (spec_.service == "instagram") {
      instagram();
    } else {
      throw UnsupportedServiceError("no fixture generator for service '" + spec_.service + "'");
    }
    return finish();
  }

 private:
  const FixtureVolume& vol() const { return spec_.volume; }

  void add(std::string path, std::string content, std::optional<Category> category = std::nullopt,
           std::uint64_t count = 0) {
    files_.push_back({std::move(path), std::move(content), count > 0 ? category : std::nullopt, count});
  }

  Fixture finish() {
    Fixture fx;
    fx.manifest.expected_service = spec_.service;
    ZipWriter zip;
    for (const auto& f : files_) {
      const auto fc = classify_file(f.path);
      zip.add(f.path, f.content, fc != FileCategory::kPicture && fc != FileCategory::kVideo);
      fx.manifest.files.push_back(
          {f.path, f.content.size(), fc, f.category, f.count});
      if (f.category) fx.manifest.expected_counts[static_cast<std::size_t>(*f.category)] += f.count;
    }
    std::sort(fx.manifest.files.begin(), fx.manifest.files.end(),
              [](const ManifestFile& a, const ManifestFile& b) { return a.path < b.path; });
    fx.archive = zip.finish();
    return fx;
  }

  TimeExtent span_for(Category c) const {
    const auto it = spec_.category_spans.find(c);
    return it == spec_.category_spans.end() ? spec_.time_span : it->second;
  }

  Timestamp time_in(const TimeExtent& s) {
    return from_unix_seconds(rng_.between(to_unix_seconds(s.min), to_unix_seconds(s.max)));
  }
  Timestamp time(Category c) { return time_in(span_for(c)); }

  // Times for n records, ascending.
  std::vector<Timestamp> times(Category c, std::size_t n) {
    std::vector<Timestamp> out(n);
    for (auto& t : out) t = time(c);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string word() { return std::string(rng_.pick(all(kWords))); }

  std::string sentence(std::size_t min_words = 3, std::size_t max_words = 9) {
    const auto n = static_cast<std::size_t>(rng_.between(static_cast<std::int64_t>(min_words),
                                                          static_cast<std::int64_t>(max_words)));
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) s += ' ';
      s += word();
    }
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
    if (rng_.chance(spec_.non_ascii_fraction)) {
      s += ' ';
      s += rng_.pick(all(kNonAsciiWords));
    }
    return s;
  }

  std::string person() {
    std::string name;
    for (;;) {
      name = std::string(rng_.pick(all(kFirstNames))) + " " + std::string(rng_.pick(all(kLastNames)));
      if (used_names_.insert(name).second) return name;
      if (used_names_.size() >= std::size(kFirstNames) * std::size(kLastNames)) break;
    }
    name += " " + std::to_string(used_names_.size());
    used_names_.insert(name);
    return name;
  }

  std::string ip() {
    return std::to_string(rng_.between(11, 223)) + "." + std::to_string(rng_.between(0, 255)) + "." +
           std::to_string(rng_.between(0, 255)) + "." + std::to_string(rng_.between(1, 254));
  }

  std::string city() { return std::string(rng_.pick(all(kCities))); }

  std::string binary_blob(std::size_t min_size, std::size_t max_size) {
    const auto n = static_cast<std::size_t>(
        rng_.between(static_cast<std::int64_t>(min_size), static_cast<std::int64_t>(max_size)));
    std::string s = "\xFF\xD8\xFF\xE0";
    while (s.size() < n) s += static_cast<char>(rng_.below(256));
    s += "\xFF\xD9";
    return s;
  }

  std::vector<Conversation> conversations() {
    std::vector<Conversation> out;
    auto fill = [&](Conversation& conv, std::uint32_t n, const TimeExtent& span) {
      for (std::uint32_t i = 0; i < n; ++i) {
        const bool mine = rng_.chance(0.5);
        const Timestamp t = time_in(span);
        conv.messages.push_back({mine ? spec_.owner : conv.partner, t, sentence()});
      }
      std::stable_sort(conv.messages.begin(), conv.messages.end(),
                       [](const Message& a, const Message& b) { return a.time < b.time; });
    };
    if (spec_.featured) {
      used_names_.insert(spec_.featured->partner);
      out.push_back({spec_.featured->partner, {}});
      fill(out.back(), spec_.featured->messages, spec_.featured->time_span);
    }
    for (std::uint32_t c = 0; c < vol().conversations; ++c) {
      out.push_back({person(), {}});
      fill(out.back(), vol().messages_per_conversation, span_for(Category::kMessages));
    }
    return out;
  }

  static std::uint64_t message_count(const std::vector<Conversation>& convs) {
    std::uint64_t n = 0;
    for (const auto& c : convs) n += c.messages.size();
    return n;
  }

  // ---- Facebook ---------------------------------------------------------

  void fb_add(std::string path, J doc, std::optional<Category> c = std::nullopt, std::uint64_t n = 0) {
    lift_strings(doc);
    add(std::move(path), doc.dump(2, ' ', true), c, n);
  }

  void facebook() {
    const std::string& owner = spec_.owner;
    fb_add("profile_information/profile_information.json",
           J{{"profile_v2",
              {{"name", {{"full_name", owner}}},
               {"emails", {{"emails", J::array({slug(owner) + "@example.com"})}}},
               {"registration_timestamp", to_unix_seconds(spec_.time_span.min)}}}});

    for (const auto& conv : conversations()) {
      J messages = J::array();
      for (auto it = conv.messages.rbegin(); it != conv.messages.rend(); ++it) {
        messages.push_back({{"sender_name", it->sender},
                            {"timestamp_ms", to_unix_seconds(it->time) * 1000 + rng_.between(0, 999)},
                            {"content", it->text},
                            {"type", "Generic"}});
      }
      J doc = {{"participants", J::array({J{{"name", conv.partner}}, J{{"name", owner}}})},
               {"messages", std::move(messages)},
               {"title", conv.partner},
               {"is_still_participant", true},
               {"thread_type", "Regular"},
               {"thread_path", "inbox/" + slug(conv.partner) + "_" + rng_.hex(10)}};
      const std::string folder = doc["thread_path"].get<std::string>();
      const auto n = conv.messages.size();
      fb_add("messages/" + folder + "/message_1.json", std::move(doc), Category::kMessages, n);
    }

    if (vol().posts > 0) {
      const std::uint32_t comments = vol().posts / 3;
      const std::uint32_t posts = vol().posts - comments;
      if (posts > 0) {
        J doc = J::array();
        for (auto t : times(Category::kPostsAndComments, posts)) {
          doc.push_back({{"timestamp", to_unix_seconds(t)},
                         {"data", J::array({J{{"post", sentence(4, 14)}}})},
                         {"title", owner + " updated their status."}});
        }
        fb_add("posts/your_posts_1.json", std::move(doc), Category::kPostsAndComments, posts);
      }
      if (comments > 0) {
        J rows = J::array();
        for (auto t : times(Category::kPostsAndComments, comments)) {
          const std::string other = person();
          rows.push_back(
              {{"timestamp", to_unix_seconds(t)},
               {"data", J::array({J{{"comment",
                                     {{"timestamp", to_unix_seconds(t)},
                                      {"comment", sentence(2, 8)},
                                      {"author", owner}}}}})},
               {"title", owner + " commented on " + other + "'s post."}});
        }
        fb_add("comments/comments.json", J{{"comments_v2", std::move(rows)}},
               Category::kPostsAndComments, comments);
      }
    }

    if (vol().logins > 0) {
      J rows = J::array();
      for (auto t : times(Category::kSecurity, vol().logins)) {
        rows.push_back({{"action", rng_.chance(0.8) ? "Login" : "Session updated"},
                        {"timestamp", to_unix_seconds(t)},
                        {"ip_address", ip()},
                        {"user_agent", rng_.pick(all(kUserAgents))},
                        {"datr_cookie", rng_.hex(24)},
                        {"city", city()},
                        {"country", rng_.pick(all(kCountries))}});
      }
      fb_add("security_and_login_information/account_activity.json",
             J{{"account_activity_v2", std::move(rows)}}, Category::kSecurity, vol().logins);
    }

    if (vol().locations > 0) {
      J rows = J::array();
      for (auto t : times(Category::kLocation, vol().locations)) {
        rows.push_back({{"name", city()},
                        {"coordinate",
                         {{"latitude", static_cast<double>(rng_.between(45000, 60000)) / 1000.0},
                          {"longitude", static_cast<double>(rng_.between(-9000, 25000)) / 1000.0}}},
                        {"creation_timestamp", to_unix_seconds(t)}});
      }
      fb_add("location/location_history.json", J{{"location_history_v2", std::move(rows)}},
             Category::kLocation, vol().locations);
    }

    if (vol().searches > 0) {
      J rows = J::array();
      for (auto t : times(Category::kSearch, vol().searches)) {
        const std::string q = rng_.chance(0.5) ? person() : word() + " " + word();
        rows.push_back({{"timestamp", to_unix_seconds(t)},
                        {"data", J::array({J{{"text", q}}})},
                        {"title", "You searched Facebook"}});
      }
      fb_add("search/your_search_history.json", J{{"searches_v2", std::move(rows)}},
             Category::kSearch, vol().searches);
    }

    if (vol().contacts > 0) {
      J rows = J::array();
      for (auto t : times(Category::kContacts, vol().contacts)) {
        rows.push_back({{"name", person()}, {"timestamp", to_unix_seconds(t)}});
      }
      fb_add("friends_and_followers/friends.json", J{{"friends_v2", std::move(rows)}},
             Category::kContacts, vol().contacts);
    }

    if (vol().account_records > 0) {
      static constexpr std::string_view kUpdates[] = {"profile picture", "cover photo", "city",
                                                      "work history", "relationship status"};
      J rows = J::array();
      for (auto t : times(Category::kAccount, vol().account_records)) {
        rows.push_back({{"timestamp", to_unix_seconds(t)},
                        {"title", owner + " updated their " + std::string(rng_.pick(all(kUpdates))) + "."}});
      }
      fb_add("profile_information/profile_update_history.json",
             J{{"profile_updates_v2", std::move(rows)}}, Category::kAccount, vol().account_records);
    }

    if (vol().activities > 0) {
      J rows = J::array();
      for (auto t : times(Category::kActivity, vol().activities)) {
        rows.push_back({{"title", rng_.pick(all(kAdvertisers))},
                        {"action", rng_.chance(0.7) ? "Clicked ad" : "Hid ad"},
                        {"timestamp", to_unix_seconds(t)}});
      }
      fb_add("ads_information/advertisers_you've_interacted_with.json",
             J{{"history_v2", std::move(rows)}}, Category::kActivity, vol().activities);
    }

    if (vol().media_files > 0) {
      static constexpr std::string_view kAlbums[] = {"Mobile Uploads", "Profile Pictures", "Holiday"};
      std::vector<J> albums(std::size(kAlbums), J::array());
      for (std::uint32_t i = 0; i < vol().media_files; ++i) {
        const auto a = rng_.below(std::size(kAlbums));
        const std::string uri = "photos_and_videos/" + slug(kAlbums[a]) + "_" + std::to_string(a) +
                                "/" + rng_.digits(15) + "_n.jpg";
        albums[a].push_back({{"uri", uri},
                             {"creation_timestamp", to_unix_seconds(time(Category::kMedia))},
                             {"title", word()}});
        add(uri, binary_blob(200, 1500));
      }
      for (std::size_t a = 0; a < albums.size(); ++a) {
        if (albums[a].empty()) continue;
        const auto n = albums[a].size();
        fb_add("photos_and_videos/album/" + std::to_string(a) + ".json",
               J{{"name", kAlbums[a]}, {"photos", std::move(albums[a])}}, Category::kMedia, n);
      }
    }
  }

  // ---- Google -----------------------------------------------------------

  void google() {
    add("Takeout/archive_browser.html",
        "<!DOCTYPE html><html><head><meta charset=\"utf-8\"><title>Archive Overview</title></head>"
        "<body><h1>Your account, your data.</h1></body></html>\n");

    if (vol().locations > 0) {
      J rows = J::array();
      for (auto t : times(Category::kLocation, vol().locations)) {
        rows.push_back({{"timestampMs", std::to_string(to_unix_seconds(t) * 1000 + rng_.between(0, 999))},
                        {"latitudeE7", rng_.between(450000000, 600000000)},
                        {"longitudeE7", rng_.between(-90000000, 250000000)},
                        {"accuracy", rng_.between(3, 60)}});
      }
      add("Takeout/Location History/Records.json", J{{"locations", std::move(rows)}}.dump(2),
          Category::kLocation, vol().locations);
    }

    auto my_activity = [&](const std::string& header, Category c, std::uint32_t n,
                           const std::function<std::string()>& title) {
      J rows = J::array();
      auto ts = times(c, n);
      for (auto it = ts.rbegin(); it != ts.rend(); ++it) {
        rows.push_back({{"header", header},
                        {"title", title()},
                        {"titleUrl", "https://www.example.com/" + rng_.hex(12)},
                        {"time", iso_millis(*it, static_cast<unsigned>(rng_.below(1000)))},
                        {"products", J::array({header})}});
      }
      return rows.dump(2);
    };
    if (vol().searches > 0) {
      add("Takeout/My Activity/Search/MyActivity.json",
          my_activity("Search", Category::kSearch, vol().searches,
                      [&] { return "Searched for " + word() + " " + word(); }),
          Category::kSearch, vol().searches);
    }
    if (vol().activities > 0) {
      add("Takeout/My Activity/YouTube/MyActivity.json",
          my_activity("YouTube", Category::kActivity, vol().activities,
                      [&] { return "Watched " + sentence(2, 5); }),
          Category::kActivity, vol().activities);
    }

    const auto convs = conversations();
    if (!convs.empty()) {
      J list = J::array();
      for (const auto& conv : convs) {
        J events = J::array();
        for (const auto& m : conv.messages) {
          events.push_back({{"sender_name", m.sender},
                            {"timestamp", std::to_string(to_unix_seconds(m.time) * 1000000 +
                                                         rng_.between(0, 999999))},
                            {"text", m.text}});
        }
        list.push_back({{"conversation_id", {{"id", rng_.hex(20)}}},
                        {"name", conv.partner},
                        {"participants", J::array({spec_.owner, conv.partner})},
                        {"events", std::move(events)}});
      }
      add("Takeout/Hangouts/Hangouts.json", J{{"conversations", std::move(list)}}.dump(2),
          Category::kMessages, message_count(convs));
    }

    if (vol().logins > 0) {
      std::string csv = "Activity Timestamp,IP Address,Activity Type,User Agent String,Product Name\n";
      auto ts = times(Category::kSecurity, vol().logins);
      for (auto it = ts.rbegin(); it != ts.rend(); ++it) {
        csv += spaced(*it) + " UTC," + ip() + "," + (rng_.chance(0.7) ? "Login" : "Token refresh") +
               ",\"" + std::string(rng_.pick(all(kUserAgents))) + ", like Gecko\"," +
               (rng_.chance(0.5) ? "Gmail" : "Google Drive") + "\n";
      }
      add("Takeout/Access Log Activity/Activities - A list of Google services accessed by your "
          "devices.csv",
          std::move(csv), Category::kSecurity, vol().logins);
    }

    if (vol().contacts > 0) {
      std::string csv = "Name,Given Name,Family Name,E-mail 1 - Type,E-mail 1 - Value\n";
      std::string vcf;
      for (std::uint32_t i = 0; i < vol().contacts; ++i) {
        const std::string name = person();
        const auto space = name.find(' ');
        const std::string mail = slug(name) + "@example.org";
        csv += name + "," + name.substr(0, space) + "," + name.substr(space + 1) + ",* Home," + mail + "\n";
        vcf += "BEGIN:VCARD\r\nVERSION:3.0\r\nFN:" + name + "\r\nEMAIL;TYPE=INTERNET:" + mail +
               "\r\nEND:VCARD\r\n";
      }
      add("Takeout/Contacts/All Contacts/All Contacts.csv", std::move(csv), Category::kContacts,
          vol().contacts);
      add("Takeout/Contacts/All Contacts/All Contacts.vcf", std::move(vcf));
    }

    if (vol().account_records > 0) {
      static constexpr std::string_view kEvents[] = {"Password changed", "Recovery phone updated",
                                                     "2-Step Verification turned on", "Name changed"};
      J rows = J::array();
      for (auto t : times(Category::kAccount, vol().account_records)) {
        rows.push_back({{"timestamp", iso_z(t)}, {"description", rng_.pick(all(kEvents))}});
      }
      add("Takeout/Google Account/account_history.json", J{{"events", std::move(rows)}}.dump(2),
          Category::kAccount, vol().account_records);
    }

    if (vol().posts > 0) {
      J rows = J::array();
      for (auto t : times(Category::kPostsAndComments, vol().posts)) {
        rows.push_back({{"video_title", sentence(2, 5)},
                        {"text", sentence(3, 10)},
                        {"time", iso_millis(t, static_cast<unsigned>(rng_.below(1000)))}});
      }
      add("Takeout/YouTube and YouTube Music/comments/my-comments.json", rows.dump(2),
          Category::kPostsAndComments, vol().posts);
    }

    for (std::uint32_t i = 0; i < vol().media_files; ++i) {
      const Timestamp t = time(Category::kMedia);
      char name[32];
      std::snprintf(name, sizeof name, "IMG_%04u.jpg", i + 1);
      const std::string folder =
          "Takeout/Google Photos/Photos from " + std::to_string(civil(t).year) + "/";
      J sidecar = {{"title", name},
                   {"description", ""},
                   {"photoTakenTime", {{"timestamp", std::to_string(to_unix_seconds(t))},
                                       {"formatted", iso_z(t)}}},
                   {"geoData", {{"latitude", static_cast<double>(rng_.between(45000, 60000)) / 1000.0},
                                {"longitude", static_cast<double>(rng_.between(-9000, 25000)) / 1000.0}}}};
      add(folder + name, binary_blob(300, 2500));
      add(folder + name + ".json", sidecar.dump(2), Category::kMedia, 1);
    }
  }

  // ---- Twitter ----------------------------------------------------------

  void tw_add(const std::string& name, const J& doc, std::optional<Category> c = std::nullopt,
              std::uint64_t n = 0) {
    add("data/" + name + ".js", "window.YTD." + name_to_ident(name) + ".part0 = " + doc.dump(2), c, n);
  }

  static std::string name_to_ident(std::string_view name) {
    std::string out;
    bool upper = false;
    for (char ch : name) {
      if (ch == '-') {
        upper = true;
      } else {
        out += upper && ch >= 'a' && ch <= 'z' ? static_cast<char>(ch - 'a' + 'A') : ch;
        upper = false;
      }
    }
    return out;
  }

  void twitter() {
    const std::string handle = slug(spec_.owner);
    const std::string account_id = rng_.digits(9);
    J manifest = {{"userInfo", {{"accountId", account_id}, {"userName", handle},
                                {"displayName", spec_.owner}}},
                  {"archiveInfo", {{"sizeBytes", "0"}, {"isPartialArchive", false}}}};
    add("data/manifest.js", "window.__THAR_CONFIG = " + manifest.dump(2));

    if (vol().posts > 0) {
      J doc = J::array();
      auto ts = times(Category::kPostsAndComments, vol().posts);
      for (auto it = ts.rbegin(); it != ts.rend(); ++it) {
        doc.push_back({{"tweet", {{"id_str", rng_.digits(18)},
                                  {"full_text", sentence(3, 14)},
                                  {"created_at", twitter_time(*it)},
                                  {"favorite_count", std::to_string(rng_.below(50))},
                                  {"lang", "en"}}}});
      }
      tw_add("tweet", doc, Category::kPostsAndComments, vol().posts);
    }

    const auto convs = conversations();
    if (!convs.empty()) {
      J doc = J::array();
      for (const auto& conv : convs) {
        const std::string partner_id = rng_.digits(9);
        J messages = J::array();
        for (auto it = conv.messages.rbegin(); it != conv.messages.rend(); ++it) {
          const bool mine = it->sender == spec_.owner;
          messages.push_back({{"messageCreate",
                               {{"recipientId", mine ? partner_id : account_id},
                                {"text", it->text},
                                {"senderId", mine ? account_id : partner_id},
                                {"id", rng_.digits(18)},
                                {"createdAt", iso_millis(it->time, static_cast<unsigned>(rng_.below(1000)))}}}});
        }
        doc.push_back({{"dmConversation", {{"conversationId", account_id + "-" + partner_id},
                                           {"messages", std::move(messages)}}}});
      }
      tw_add("direct-messages", doc, Category::kMessages, message_count(convs));
    }

    if (vol().logins > 0) {
      J doc = J::array();
      for (auto t : times(Category::kSecurity, vol().logins)) {
        doc.push_back({{"ipAudit", {{"accountId", account_id},
                                    {"createdAt", iso_millis(t, static_cast<unsigned>(rng_.below(1000)))},
                                    {"loginIp", ip()}}}});
      }
      tw_add("ip-audit", doc, Category::kSecurity, vol().logins);
    }

    if (vol().contacts > 0) {
      J doc = J::array();
      for (std::uint32_t i = 0; i < vol().contacts; ++i) {
        const std::string id = rng_.digits(9);
        doc.push_back({{"follower", {{"accountId", id},
                                     {"userLink", "https://twitter.com/intent/user?user_id=" + id}}}});
      }
      tw_add("follower", doc, Category::kContacts, vol().contacts);
    }

    if (vol().account_records > 0) {
      J doc = J::array();
      for (auto t : times(Category::kAccount, vol().account_records)) {
        doc.push_back({{"account", {{"email", handle + "@example.com"},
                                    {"createdVia", rng_.chance(0.5) ? "web" : "oauth:258901"},
                                    {"username", handle},
                                    {"accountId", account_id},
                                    {"createdAt", iso_millis(t, 0)},
                                    {"accountDisplayName", spec_.owner}}}});
      }
      tw_add("account", doc, Category::kAccount, vol().account_records);
    }

    if (vol().activities > 0) {
      J doc = J::array();
      std::uint32_t left = vol().activities;
      auto ts = times(Category::kActivity, vol().activities);
      std::size_t next = 0;
      while (left > 0) {
        const auto batch = static_cast<std::uint32_t>(std::min<std::int64_t>(left, rng_.between(1, 5)));
        J impressions = J::array();
        for (std::uint32_t i = 0; i < batch; ++i) {
          const std::string adv(rng_.pick(all(kAdvertisers)));
          impressions.push_back({{"deviceInfo", {{"osType", "Desktop"}}},
                                 {"displayLocation", "TimelineHome"},
                                 {"advertiserInfo", {{"advertiserName", adv}, {"screenName", "@" + slug(adv)}}},
                                 {"impressionTime", spaced(ts[next++])}});
        }
        doc.push_back({{"ad", {{"adsUserData", {{"adImpressions", {{"impressions", std::move(impressions)}}}}}}}});
        left -= batch;
      }
      tw_add("ad-impressions", doc, Category::kActivity, vol().activities);
    }

    if (vol().locations > 0) {
      J places = J::array();
      for (std::uint32_t i = 0; i < vol().locations; ++i) {
        places.push_back(city() + ", " + std::string(rng_.pick(all(kCountries))));
      }
      J doc = J::array({J{{"p13nData", {{"demographics", {{"languages", J::array()}}},
                                         {"locationHistory", std::move(places)}}}}});
      tw_add("personalization", doc, Category::kLocation, vol().locations);
    }

    if (vol().searches > 0) {
      J doc = J::array();
      for (std::uint32_t i = 0; i < vol().searches; ++i) {
        doc.push_back({{"savedSearch", {{"savedSearchId", rng_.digits(12)}, {"query", word() + " " + word()}}}});
      }
      tw_add("saved-search", doc, Category::kSearch, vol().searches);
    }

    if (vol().media_files > 0) {
      J doc = J::array();
      for (auto t : times(Category::kMedia, vol().media_files)) {
        const std::string file = "data/tweet_media/" + rng_.digits(18) + "-" + rng_.hex(8) + ".jpg";
        add(file, binary_blob(300, 2500));
        doc.push_back({{"media", {{"mediaType", "photo"},
                                  {"mediaUrl", file},
                                  {"createdAt", iso_millis(t, 0)}}}});
      }
      tw_add("media", doc, Category::kMedia, vol().media_files);
    }
  }

  // ---- Instagram --------------------------------------------------------

  void instagram() {
    const std::string handle = slug(spec_.owner);
    add("profile.json", J{{"biography", sentence(3, 6)},
                          {"date_joined", iso_offset(spec_.time_span.min)},
                          {"email", handle + "@example.com"},
                          {"name", spec_.owner},
                          {"username", handle}}
                            .dump(2));

    // media.json is part of the service signature, so it is always present.
    {
      J photos = J::array();
      auto ts = times(Category::kMedia, vol().media_files);
      for (auto it = ts.rbegin(); it != ts.rend(); ++it) {
        const Civil c = civil(*it);
        char month[8];
        std::snprintf(month, sizeof month, "%04d%02u", c.year, c.month);
        const std::string path = std::string("photos/") + month + "/" + rng_.hex(32) + ".jpg";
        add(path, binary_blob(300, 2500));
        photos.push_back({{"caption", sentence(1, 6)}, {"taken_at", iso_offset(*it)}, {"path", path}});
      }
      add("media.json",
          J{{"photos", std::move(photos)}, {"videos", J::array()}, {"stories", J::array()}}.dump(2),
          Category::kMedia, vol().media_files);
    }

    const auto convs = conversations();
    if (!convs.empty()) {
      J doc = J::array();
      for (const auto& conv : convs) {
        J msgs = J::array();
        for (auto it = conv.messages.rbegin(); it != conv.messages.rend(); ++it) {
          msgs.push_back({{"sender", it->sender == spec_.owner ? handle : slug(conv.partner)},
                          {"created_at", iso_offset(it->time)},
                          {"text", it->text}});
        }
        doc.push_back({{"participants", J::array({handle, slug(conv.partner)})},
                       {"conversation", std::move(msgs)}});
      }
      add("messages.json", doc.dump(2), Category::kMessages, message_count(convs));
    }

    if (vol().posts > 0) {
      J rows = J::array();
      for (auto t : times(Category::kPostsAndComments, vol().posts)) {
        rows.push_back(J::array({iso_offset(t), sentence(1, 8), slug(person())}));
      }
      add("comments.json", J{{"media_comments", std::move(rows)}}.dump(2),
          Category::kPostsAndComments, vol().posts);
    }

    if (vol().logins > 0) {
      J rows = J::array();
      for (auto t : times(Category::kSecurity, vol().logins)) {
        rows.push_back({{"cookie_name", "SESSIONID"},
                        {"ip_address", ip()},
                        {"language_code", "en"},
                        {"timestamp", iso_offset(t)},
                        {"user_agent", rng_.pick(all(kUserAgents))},
                        {"device_id", rng_.hex(16)}});
      }
      add("account_history.json", J{{"login_history", std::move(rows)}}.dump(2),
          Category::kSecurity, vol().logins);
    }

    if (vol().contacts > 0) {
      J followers = J::object();
      for (auto t : times(Category::kContacts, vol().contacts)) {
        followers[slug(person())] = iso_offset(t);
      }
      add("connections.json", J{{"followers", std::move(followers)}, {"following", J::object()}}.dump(2),
          Category::kContacts, vol().contacts);
    }

    if (vol().searches > 0) {
      J rows = J::array();
      for (auto t : times(Category::kSearch, vol().searches)) {
        rows.push_back({{"search_click", rng_.chance(0.5) ? slug(person()) : "#" + word()},
                        {"time", iso_offset(t)},
                        {"type", "user"}});
      }
      add("searches.json", rows.dump(2), Category::kSearch, vol().searches);
    }

    if (vol().account_records > 0) {
      static constexpr std::string_view kFields[] = {"Bio", "Name", "Email", "Phone"};
      J rows = J::array();
      for (auto t : times(Category::kAccount, vol().account_records)) {
        rows.push_back({{"changed", rng_.pick(all(kFields))},
                        {"previous_value", word()},
                        {"new_value", word()},
                        {"change_date", iso_offset(t)}});
      }
      add("profile_changes.json", J{{"profile_changes", std::move(rows)}}.dump(2), Category::kAccount,
          vol().account_records);
    }

    if (vol().activities > 0) {
      J rows = J::array();
      for (auto t : times(Category::kActivity, vol().activities)) {
        rows.push_back({{"username", slug(person())}, {"timestamp", iso_offset(t)}});
      }
      add("seen_content.json", J{{"chaining_seen", std::move(rows)}}.dump(2), Category::kActivity,
          vol().activities);
    }

    if (vol().locations > 0) {
      J rows = J::array();
      for (std::uint32_t i = 0; i < vol().locations; ++i) rows.push_back(city());
      add("locations_of_interest.json", J{{"locations_of_interest", std::move(rows)}}.dump(2),
          Category::kLocation, vol().locations);
    }
  }

  struct PendingFile {
    std::string path;
    std::string content;
    std::optional<Category> category;
    std::uint64_t count;
  };

  const FixtureSpec& spec_;
  Rng rng_;
  std::vector<PendingFile> files_;
  std::set<std::string> used_names_;
};

TimeExtent years(int from, int to) {
  using namespace std::chrono;
  const auto a = sys_days{year{from} / January / 1};
  const auto b = sys_days{year{to} / December / 31} + hours{23} + minutes{59} + seconds{59};
  return {Timestamp{a}, Timestamp{b}};
}

TimeExtent months(int y0, unsigned m0, int y1, unsigned m1) {
  using namespace std::chrono;
  const auto a = sys_days{year{y0} / month{m0} / 1};
  const auto b = sys_days{year{y1} / month{m1} / last} + hours{23} + minutes{59} + seconds{59};
  return {Timestamp{a}, Timestamp{b}};
}

}  // namespace

Fixture generate(const FixtureSpec& spec) {
  if (std::find(fixture_services().begin(), fixture_services().end(), spec.service) ==
      fixture_services().end()) {
    throw UnsupportedServiceError("no fixture generator for service '" + spec.service + "'");
  }
  spec.validate();
  return Generator(spec).run();
}

FixtureSpec use_case_1_preset() {
  FixtureSpec s;
  s.service = "facebook";
  s.seed = 2011;
  s.owner = "Bob";
  s.time_span = years(2009, 2019);
  s.volume = {.conversations = 8,
              .messages_per_conversation = 30,
              .posts = 60,
              .logins = 40,
              .locations = 30,
              .searches = 40,
              .media_files = 45,
              .contacts = 50,
              .activities = 30,
              .account_records = 10};
  s.featured = FeaturedConversation{"Alice", 400, months(2010, 9, 2012, 3)};
  return s;
}

std::vector<NamedSpec> use_case_2_presets() {
  std::vector<NamedSpec> out;

  FixtureSpec alice_fb;
  alice_fb.service = "facebook";
  alice_fb.seed = 5201;
  alice_fb.owner = "Alice";
  alice_fb.time_span = years(2009, 2019);
  alice_fb.volume = {.conversations = 6,
                     .messages_per_conversation = 120,
                     .posts = 20,
                     .logins = 60,
                     .locations = 10,
                     .searches = 15,
                     .media_files = 20,
                     .contacts = 40,
                     .activities = 25,
                     .account_records = 5};
  alice_fb.category_spans[Category::kSecurity] = years(2016, 2019);
  out.push_back({"alice-facebook", alice_fb});

  FixtureSpec alice_google;
  alice_google.service = "google";
  alice_google.seed = 5202;
  alice_google.owner = "Alice";
  alice_google.time_span = years(2013, 2019);
  alice_google.volume = {.conversations = 2,
                         .messages_per_conversation = 20,
                         .posts = 5,
                         .logins = 10,
                         .locations = 15,
                         .searches = 20,
                         .media_files = 6,
                         .contacts = 10,
                         .activities = 60,
                         .account_records = 3};
  alice_google.category_spans[Category::kMessages] = years(2015, 2015);
  alice_google.category_spans[Category::kActivity] = years(2015, 2015);
  out.push_back({"alice-google", alice_google});

  FixtureSpec bob_fb;
  bob_fb.service = "facebook";
  bob_fb.seed = 5203;
  bob_fb.owner = "Bob";
  bob_fb.time_span = years(2009, 2019);
  bob_fb.volume = {.conversations = 4,
                   .messages_per_conversation = 25,
                   .posts = 150,
                   .logins = 40,
                   .locations = 20,
                   .searches = 30,
                   .media_files = 60,
                   .contacts = 60,
                   .activities = 30,
                   .account_records = 8};
  bob_fb.category_spans[Category::kSecurity] = years(2016, 2019);
  out.push_back({"bob-facebook", bob_fb});

  FixtureSpec bob_google;
  bob_google.service = "google";
  bob_google.seed = 5204;
  bob_google.owner = "Bob";
  bob_google.time_span = years(2012, 2019);
  bob_google.volume = {.conversations = 1,
                       .messages_per_conversation = 10,
                       .posts = 10,
                       .logins = 50,
                       .locations = 3000,
                       .searches = 300,
                       .media_files = 40,
                       .contacts = 30,
                       .activities = 1200,
                       .account_records = 5};
  bob_google.category_spans[Category::kLocation] = years(2014, 2019);
  out.push_back({"bob-google", bob_google});
  return out;
}

}  // namespace exportscope
