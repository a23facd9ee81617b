#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exportscope/model.hpp"

namespace exportscope {

// Record counts per kind of data. Each maps to one category of the service's
// default rules; messages come as conversations x messages_per_conversation.
struct FixtureVolume {
  std::uint32_t conversations = 0;
  std::uint32_t messages_per_conversation = 0;
  std::uint32_t posts = 0;
  std::uint32_t logins = 0;
  std::uint32_t locations = 0;
  std::uint32_t searches = 0;
  std::uint32_t media_files = 0;
  std::uint32_t contacts = 0;
  std::uint32_t activities = 0;
  std::uint32_t account_records = 0;

  std::uint64_t total_elements() const;
};

// A conversation with a fixed partner and its own time window, e.g. the one
// long chat that dominates an export.
struct FeaturedConversation {
  std::string partner;
  std::uint32_t messages = 0;
  TimeExtent time_span;
};

struct FixtureSpec {
  std::string service;
  std::uint64_t seed = 0;
  FixtureVolume volume;
  TimeExtent time_span;
  std::string owner = "Sam";
  std::optional<FeaturedConversation> featured;
  // Narrower windows for individual categories; must lie inside time_span.
  std::map<Category, TimeExtent> category_spans;
  // Share of messages that carry non-ASCII text. Facebook fixtures store all
  // non-ASCII text in its byte-escaped (mojibake) form.
  double non_ascii_fraction = 0.25;

  // Throws ValidationError.
  void validate() const;
};

struct ManifestFile {
  std::string path;
  std::uint64_t size_bytes = 0;
  FileCategory file_category = FileCategory::kOther;
  std::optional<Category> data_category;
  std::uint64_t element_count = 0;
  friend bool operator==(const ManifestFile&, const ManifestFile&) = default;
};

struct FixtureManifest {
  std::string expected_service;
  std::vector<ManifestFile> files;
  std::array<std::uint64_t, kCategoryCount> expected_counts{};

  std::uint64_t total_elements() const;
  std::uint64_t count(Category c) const { return expected_counts[static_cast<std::size_t>(c)]; }

  // {"expected_service", "files": [...], "expected_counts": {category: n}}
  std::string to_document() const;
  static FixtureManifest from_document(std::string_view document);
  friend bool operator==(const FixtureManifest&, const FixtureManifest&) = default;
};

struct Fixture {
  std::string archive;  // zip bytes
  FixtureManifest manifest;
};

const std::vector<std::string>& fixture_services();

// Pure function of the spec: identical specs give byte-identical archives.
// Throws UnsupportedServiceError or ValidationError.
Fixture generate(const FixtureSpec& spec);

// Bob's Facebook export with one long conversation with Alice around 2011.
FixtureSpec use_case_1_preset();

// Alice and Bob, each with a Facebook and a Google export, in the order
// alice-facebook, alice-google, bob-facebook, bob-google.
struct NamedSpec {
  std::string name;
  FixtureSpec spec;
};
std::vector<NamedSpec> use_case_2_presets();

}  // namespace exportscope
