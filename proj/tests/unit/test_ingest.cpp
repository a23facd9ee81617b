#include <doctest.h>

#include <algorithm>
#include <random>

#include <zlib.h>

#include "exportscope/error.hpp"
#include "exportscope/ingest.hpp"
#include "exportscope/zip.hpp"
#include "support.hpp"

using namespace exportscope;

namespace {

std::string make_zip(const std::vector<std::pair<std::string, std::string>>& entries, bool compress = true) {
  ZipWriter w;
  for (const auto& [name, data] : entries) w.add(name, data, compress);
  return w.finish();
}

ArchiveListing listing_of(std::initializer_list<const char*> paths) {
  ArchiveListing l;
  std::size_t i = 0;
  for (const char* p : paths) l.entries.push_back({p, 1, false, i++});
  return l;
}

}  // namespace

TEST_CASE("zip writer and reader round trip") {
  std::mt19937_64 rng(3);
  std::string blob(70000, '\0');
  for (auto& c : blob) c = static_cast<char>(rng() & 0xff);
  const std::string text(100000, 'a');
  for (bool compress : {true, false}) {
    const auto bytes = make_zip({{"a/b.txt", "hello"}, {"blob.bin", blob}, {"empty", ""}, {"long.txt", text}},
                                compress);
    const auto zip = ZipArchive::from_bytes(bytes);
    REQUIRE(zip.entries().size() == 4);
    CHECK(zip.read(zip.entries()[0]) == "hello");
    CHECK(zip.read(zip.entries()[1]) == blob);
    CHECK(zip.read(zip.entries()[2]).empty());
    CHECK(zip.read(zip.entries()[3]) == text);
    CHECK(zip.entries()[3].uncompressed_size == text.size());
    if (compress) CHECK(zip.entries()[3].compressed_size < text.size());
  }
  // crc32 against zlib directly.
  CHECK(crc32_of("hello") == static_cast<std::uint32_t>(crc32(0, reinterpret_cast<const Bytef*>("hello"), 5)));
  // Deterministic output.
  CHECK(make_zip({{"x", "1"}}) == make_zip({{"x", "1"}}));
}

TEST_CASE("corrupt archives are rejected") {
  CHECK_THROWS_AS(ZipArchive::from_bytes("definitely not a zip"), ArchiveFormatError);
  CHECK_THROWS_AS(ZipArchive::from_bytes(""), ArchiveFormatError);
  auto bytes = make_zip({{"a.txt", std::string(1000, 'x')}}, false);
  // Flip a payload byte: the CRC check must catch it.
  const auto pos = bytes.find(std::string(20, 'x'));
  REQUIRE(pos != std::string::npos);
  bytes[pos + 5] = 'y';
  const auto zip = ZipArchive::from_bytes(bytes);
  CHECK_THROWS_AS(zip.read(zip.entries()[0]), ArchiveFormatError);
  // Truncation.
  const auto good = make_zip({{"a.txt", "abc"}});
  CHECK_THROWS_AS(ZipArchive::from_bytes(good.substr(0, good.size() - 10)), ArchiveFormatError);
}

TEST_CASE("list_archive normalizes paths") {
  const auto bytes = make_zip({{"dir/", ""},
                               {"dir/messages.json", "{}"},
                               {"./root.txt", "r"},
                               {"win\\style\\file.csv", "a,b"},
                               {"zero.bin", ""}});
  const auto l = list_archive(bytes, "x.zip");
  CHECK(l.archive_name == "x.zip");
  REQUIRE(l.entries.size() == 4);
  CHECK(l.entries[0].path == "dir/messages.json");
  CHECK(l.entries[1].path == "root.txt");
  CHECK(l.entries[2].path == "win/style/file.csv");
  CHECK(l.entries[3].size_bytes == 0);
  CHECK(list_archive(make_zip({})).entries.empty());
}

TEST_CASE("list_archive reports uncompressed sizes") {
  const std::string five_mb(5 * 1024 * 1024, 'm');
  const auto l = list_archive(make_zip({{"messages.json", five_mb}}));
  REQUIRE(l.entries.size() == 1);
  CHECK(l.entries[0].size_bytes == 5242880);
}

TEST_CASE("path traversal rejects the whole archive") {
  CHECK_THROWS_AS(list_archive(make_zip({{"ok.txt", "1"}, {"../evil.txt", "x"}})), SecurityError);
  CHECK_THROWS_AS(list_archive(make_zip({{"a/../../evil.txt", "x"}})), SecurityError);
  CHECK_THROWS_AS(list_archive(make_zip({{"/etc/passwd", "x"}})), SecurityError);
  CHECK_THROWS_AS(list_archive(make_zip({{"a\\..\\..\\evil", "x"}})), SecurityError);
  CHECK_THROWS_AS(list_archive(make_zip({{"C:/evil", "x"}})), SecurityError);
  // ".." inside a name is harmless.
  CHECK_NOTHROW(list_archive(make_zip({{"a/..b/c..txt", "x"}})));
  CHECK_THROWS_AS(list_archive(make_zip({{"a.txt", "1"}, {"./a.txt", "2"}})), ArchiveFormatError);
}

TEST_CASE("glob matching") {
  CHECK(glob_match("data/*.js", "data/tweet.js"));
  CHECK_FALSE(glob_match("data/*.js", "data/sub/tweet.js"));
  CHECK(glob_match("Takeout/**", "Takeout/a/b/c.json"));
  CHECK(glob_match("**/x.json", "x.json"));
  CHECK(glob_match("**/x.json", "a/b/x.json"));
  CHECK(glob_match("message_?.json", "message_1.json"));
  CHECK_FALSE(glob_match("message_?.json", "message_12.json"));
  CHECK(glob_match("messages/inbox/*/message_*.json", "messages/inbox/bob_1/message_3.json"));
}

TEST_CASE("detect_service with the default signatures") {
  const auto& sig = default_signatures();
  CHECK(detect_service(listing_of({"Takeout/archive_browser.html", "Takeout/x.json"}), sig) == "google");
  CHECK(detect_service(listing_of({"data/manifest.js", "data/tweet.js"}), sig) == "twitter");
  CHECK(detect_service(listing_of({"profile_information/profile_information.json"}), sig) == "facebook");
  CHECK(detect_service(listing_of({"profile.json", "media.json"}), sig) == "instagram");
  CHECK_THROWS_AS(detect_service(listing_of({"random/file.txt"}), sig), UnknownServiceError);
  CHECK_THROWS_AS(detect_service(ArchiveListing{}, sig), UnknownServiceError);
  // Forbidden globs: a Takeout tree disqualifies Facebook.
  CHECK(detect_service(listing_of({"profile_information/profile_information.json", "Takeout/archive_browser.html"}),
                       sig) == "google");
}

TEST_CASE("detect_service is independent of entry order") {
  std::vector<std::string> paths = {"data/manifest.js", "data/tweet.js", "data/follower.js", "README.txt"};
  for (int i = 0; i < 24; ++i) {
    ArchiveListing l;
    for (std::size_t k = 0; k < paths.size(); ++k) l.entries.push_back({paths[k], 1, false, k});
    CHECK(detect_service(l, default_signatures()) == "twitter");
    std::next_permutation(paths.begin(), paths.end());
  }
}

TEST_CASE("signature priority and merging") {
  const auto extra = parse_signatures(R"({"schema_version":1,"services":{
      "mastodon":{"required":["outbox.json","actor.json"],"priority":20},
      "twitter":{"required":["data/manifest.js"],"forbidden":["outbox.json"],"priority":10}}})");
  const auto table = merge_signatures(default_signatures(), extra);
  CHECK(detect_service(listing_of({"outbox.json", "actor.json", "data/manifest.js"}), table) == "mastodon");
  CHECK(detect_service(listing_of({"data/manifest.js"}), table) == "twitter");
  CHECK(table.size() == default_signatures().size() + 1);
  CHECK_THROWS_AS(parse_signatures(R"({"schema_version":1,"services":{"x":{"required":[]}}})"), RuleError);
  CHECK_THROWS_AS(parse_signatures("[]"), RuleError);
}

TEST_CASE("build_file_elements splits paths") {
  ArchiveListing l;
  l.entries.push_back({"messages/inbox/a/messages.json", 10, false, 0});
  l.entries.push_back({"top.jpg", 0, false, 1});
  const auto files = build_file_elements(l, "ds");
  REQUIRE(files.size() == 2);
  CHECK(files[0].folder == "messages/inbox/a/");
  CHECK(files[0].file_name == "messages.json");
  CHECK(files[0].file_category == FileCategory::kText);
  CHECK_FALSE(files[0].data_category.has_value());
  CHECK(files[0].element_count == 0);
  CHECK(files[1].folder.empty());
  CHECK(files[1].size_bytes == 0);
  CHECK(files[1].dataset_id == "ds");
}

TEST_CASE("fixture archives list exactly their manifest") {
  for (const auto& service : fixture_services()) {
    FixtureSpec spec;
    spec.service = service;
    spec.seed = 12;
    spec.time_span = {es_test::utc(2015, 1, 1), es_test::utc(2016, 1, 1)};
    spec.volume = {2, 3, 4, 5, 6, 7, 3, 4, 5, 2};
    const auto fx = generate(spec);
    const auto l = list_archive(fx.archive);
    std::vector<std::string> got, want;
    for (const auto& e : l.entries) got.push_back(e.path);
    for (const auto& f : fx.manifest.files) want.push_back(f.path);
    std::sort(got.begin(), got.end());
    CHECK(got == want);
    CHECK(build_file_elements(l, "d").size() == fx.manifest.files.size());
    CHECK(detect_service(l, default_signatures()) == service);
  }
}
