#pragma once

// Test-only helpers: random inputs and naive oracles that re-derive results
// without going through the code under test.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <memory>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "exportscope/fixture.hpp"
#include "exportscope/parse.hpp"
#include "exportscope/query.hpp"
#include "exportscope/text.hpp"
#include "exportscope/zip.hpp"

namespace es_test {

using namespace exportscope;

inline Timestamp fixed_ingest_time() { return from_unix_seconds(1577836800); }  // 2020-01-01

// Epoch conversion through the C library rather than std::chrono.
inline Timestamp utc(int y, int mo, int d, int h = 0, int mi = 0, int s = 0) {
  std::tm tm{};
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = s;
  return from_unix_seconds(static_cast<std::int64_t>(timegm(&tm)));
}

inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + rng() % (hi - lo + 1);
}

// Random spec with at most max_elements elements in total.
inline FixtureSpec random_spec(std::uint64_t seed, std::uint64_t max_elements = 10000) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 17);
  FixtureSpec s;
  s.service = fixture_services()[draw(rng, 0, 3)];
  s.seed = seed;
  s.owner = (seed % 2 == 0) ? "Sam" : "Robin";
  const int y0 = static_cast<int>(draw(rng, 2004, 2016));
  const int y1 = y0 + static_cast<int>(draw(rng, 0, 4));
  s.time_span = {utc(y0, 1, 1), utc(y1, 12, 31, 23, 59, 59)};
  s.non_ascii_fraction = static_cast<double>(draw(rng, 0, 100)) / 100.0;
  // Budget split so the total stays under max_elements.
  const std::uint64_t budget = draw(rng, 0, max_elements);
  auto share = [&](std::uint64_t parts) {
    return static_cast<std::uint32_t>(draw(rng, 0, budget / parts));
  };
  s.volume.conversations = static_cast<std::uint32_t>(draw(rng, 0, 12));
  s.volume.messages_per_conversation =
      s.volume.conversations == 0 ? 0
                                  : static_cast<std::uint32_t>(draw(rng, 0, budget / 10 / s.volume.conversations));
  s.volume.posts = share(10);
  s.volume.logins = share(10);
  s.volume.locations = share(10);
  s.volume.searches = share(10);
  s.volume.media_files = share(40);
  s.volume.contacts = share(10);
  s.volume.activities = share(10);
  s.volume.account_records = share(40);
  if (draw(rng, 0, 3) == 0) {
    const auto total = s.time_span.max - s.time_span.min;
    s.featured = FeaturedConversation{"Alice", static_cast<std::uint32_t>(draw(rng, 1, budget / 20 + 1)),
                                      {s.time_span.min + total / 4, s.time_span.min + total / 2}};
  }
  return s;
}

inline IngestResult ingest_fixture(const Fixture& fx, const std::string& name = "fixture.zip",
                                   const Registry& registry = Registry{}) {
  const auto archive = ZipArchive::from_bytes(fx.archive);
  IngestOptions opts;
  opts.parse.ingested_at = fixed_ingest_time();
  return ingest_archive(archive, name, registry, opts);
}

inline std::array<std::uint64_t, kCategoryCount> count_by_category(const Dataset& ds) {
  std::array<std::uint64_t, kCategoryCount> out{};
  for (const auto& e : ds.elements) ++out[static_cast<std::size_t>(e.category)];
  return out;
}

// Encodes each byte of s as the code point with the same value.
inline std::string lift_bytes(const std::string& s) {
  std::string out;
  for (unsigned char b : s) {
    if (b < 0x80) {
      out += static_cast<char>(b);
    } else {
      out += static_cast<char>(0xC0 | (b >> 6));
      out += static_cast<char>(0x80 | (b & 0x3F));
    }
  }
  return out;
}

inline void put_utf8(std::string& out, char32_t cp) {
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

// Random valid UTF-8 drawn from ASCII, Latin-1, the BMP and astral planes.
inline std::string random_unicode(std::mt19937_64& rng, std::size_t max_len = 24) {
  const std::size_t n = draw(rng, 0, max_len);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    char32_t cp = 0;
    switch (draw(rng, 0, 4)) {
      case 0: cp = static_cast<char32_t>(draw(rng, 0x20, 0x7E)); break;
      case 1: cp = static_cast<char32_t>(draw(rng, 0x80, 0xFF)); break;
      case 2: cp = static_cast<char32_t>(draw(rng, 0x100, 0x7FF)); break;
      case 3:
        do {
          cp = static_cast<char32_t>(draw(rng, 0x800, 0xFFFD));
        } while (cp >= 0xD800 && cp <= 0xDFFF);
        break;
      default: cp = static_cast<char32_t>(draw(rng, 0x10000, 0x10FFFF)); break;
    }
    put_utf8(s, cp);
  }
  return s;
}

// Full-scan filter written against the datasets directly.
struct NaiveHit {
  std::size_t dataset_index;
  const DataElement* element;
};

inline std::vector<NaiveHit> naive_select(const std::vector<std::shared_ptr<const Dataset>>& datasets,
                                          const Selection& sel) {
  std::vector<NaiveHit> hits;
  const std::string needle = sel.query ? casefold_utf8(*sel.query) : std::string();
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const auto& ds = *datasets[d];
    if (!sel.dataset_ids.empty() &&
        std::find(sel.dataset_ids.begin(), sel.dataset_ids.end(), ds.dataset_id) == sel.dataset_ids.end()) {
      continue;
    }
    for (const auto& e : ds.elements) {
      if (!sel.categories.empty() &&
          std::find(sel.categories.begin(), sel.categories.end(), e.category) == sel.categories.end()) {
        continue;
      }
      if (sel.time_range) {
        if (!e.time) continue;
        if (*e.time < sel.time_range->min || *e.time > sel.time_range->max) continue;
      }
      if (sel.query && !needle.empty()) {
        const bool in_text = casefold_utf8(e.text).find(needle) != std::string::npos;
        const bool in_sub = casefold_utf8(e.subcategory).find(needle) != std::string::npos;
        if (!in_text && !in_sub) continue;
      }
      hits.push_back({d, &e});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const NaiveHit& a, const NaiveHit& b) {
    const auto key = [](const NaiveHit& h) {
      const bool null_time = !h.element->time;
      const auto t = h.element->time ? to_unix_seconds(*h.element->time) : 0;
      return std::make_tuple(null_time, t, h.element->id, h.dataset_index);
    };
    return key(a) < key(b);
  });
  return hits;
}

}  // namespace es_test
