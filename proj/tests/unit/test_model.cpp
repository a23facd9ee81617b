#include <doctest.h>

#include <set>

#include "exportscope/error.hpp"
#include "exportscope/model.hpp"
#include "exportscope/unified_io.hpp"
#include "support.hpp"

using namespace exportscope;

TEST_CASE("classify_file maps lowercase extensions") {
  CHECK(classify_file("messages.json") == FileCategory::kText);
  CHECK(classify_file("noextension") == FileCategory::kOther);
  CHECK(classify_file("Photo.JPG") == FileCategory::kPicture);
  CHECK(classify_file("folder.d/clip.MoV") == FileCategory::kVideo);
  CHECK(classify_file("voice.m4a") == FileCategory::kAudio);
  CHECK(classify_file("index.html") == FileCategory::kDocument);
  CHECK(classify_file("archive.zip") == FileCategory::kOther);
  CHECK(classify_file(".hidden") == FileCategory::kOther);
  CHECK(classify_file("trailingdot.") == FileCategory::kOther);

  // Case-fold oracle: every table extension in mixed case lands where its
  // lowercase form does.
  const std::pair<const char*, FileCategory> table[] = {
      {"jpg", FileCategory::kPicture}, {"jpeg", FileCategory::kPicture}, {"png", FileCategory::kPicture},
      {"gif", FileCategory::kPicture}, {"webp", FileCategory::kPicture}, {"bmp", FileCategory::kPicture},
      {"svg", FileCategory::kPicture}, {"mp4", FileCategory::kVideo},    {"mov", FileCategory::kVideo},
      {"avi", FileCategory::kVideo},   {"webm", FileCategory::kVideo},   {"mkv", FileCategory::kVideo},
      {"mp3", FileCategory::kAudio},   {"wav", FileCategory::kAudio},    {"ogg", FileCategory::kAudio},
      {"m4a", FileCategory::kAudio},   {"aac", FileCategory::kAudio},    {"json", FileCategory::kText},
      {"js", FileCategory::kText},     {"csv", FileCategory::kText},     {"txt", FileCategory::kText},
      {"vcf", FileCategory::kText},    {"ics", FileCategory::kText},     {"xml", FileCategory::kText},
      {"html", FileCategory::kDocument}, {"pdf", FileCategory::kDocument}, {"doc", FileCategory::kDocument},
      {"docx", FileCategory::kDocument},
  };
  for (const auto& [ext, cat] : table) {
    std::string upper = ext;
    for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    CHECK(classify_file(std::string("a.") + ext) == cat);
    CHECK(classify_file("B." + upper) == cat);
  }
}

TEST_CASE("category names, labels and colors") {
  std::set<std::string_view> colors, names;
  for (auto c : kAllCategories) {
    colors.insert(category_color(c));
    names.insert(category_name(c));
    CHECK(parse_category(category_name(c)) == c);
    CHECK(category_color(c) != kNoDataColor);
  }
  CHECK(colors.size() == kCategoryCount);
  CHECK(names.size() == kCategoryCount);
  CHECK(category_name(Category::kSearch) == "Search");
  CHECK(category_label(Category::kPostsAndComments) == "Posts and Comments");
  CHECK_FALSE(parse_category("Nope").has_value());
}

TEST_CASE("element_id") {
  // Frozen: SHA-256 over "8:facebook21:messages/inbox/a.json1:02:hi", first 16
  // bytes in hex, computed once outside this code base.
  CHECK(element_id("facebook", "messages/inbox/a.json", 0, "hi") == "137956007cd63e773e98061ad0362a3b");
  CHECK(element_id("a", "b", 1, "c") == element_id("a", "b", 1, "c"));
  CHECK(element_id("a", "b", 1, "c") != element_id("a", "b", 2, "c"));
  // Field boundaries are part of the digest input.
  CHECK(element_id("ab", "c", 0, "") != element_id("a", "bc", 0, ""));
  CHECK(element_id("x", "y", 0, "z").size() == 32);
}

namespace {

Dataset small_dataset() {
  Dataset d;
  d.dataset_id = "test-1";
  d.service = "facebook";
  d.ingested_at = es_test::utc(2020, 1, 1);
  d.files.push_back({"message_1.json", "messages/inbox/a/", 120, FileCategory::kText, Category::kMessages, 2, "test-1"});
  d.files.push_back({"p.jpg", "photos/", 50, FileCategory::kPicture, std::nullopt, 0, "test-1"});
  const std::string src = "messages/inbox/a/message_1.json";
  d.elements.push_back({element_id("facebook", src, 0, "A says: \"hi\""), es_test::utc(2019, 1, 1, 12, 34, 56),
                        "A says: \"hi\"", Category::kMessages, "A", src, "test-1"});
  d.elements.push_back({element_id("facebook", src, 1, "B says: \"yo\""), std::nullopt, "B says: \"yo\"",
                        Category::kMessages, "A", src, "test-1"});
  d.canonicalize();
  return d;
}

}  // namespace

TEST_CASE("unified document round trip") {
  const Dataset d = small_dataset();
  d.validate();
  const std::string doc = write_unified(d);
  CHECK(doc.find("\"time\":\"2019-01-01T12:34:56Z\"") != std::string::npos);
  CHECK(doc.find("\"time\":null") != std::string::npos);
  CHECK(doc.find('\n') == std::string::npos);
  CHECK(doc.rfind("{\"schema_version\":1,\"service\":\"facebook\",\"dataset_id\":\"test-1\",", 0) == 0);
  const Dataset back = read_unified(doc);
  CHECK(back == d);
  CHECK(write_unified(back) == doc);
  CHECK(d.time_extent()->min == es_test::utc(2019, 1, 1, 12, 34, 56));
}

TEST_CASE("empty dataset document") {
  Dataset d;
  d.dataset_id = "empty";
  d.service = "google";
  const std::string doc = write_unified(d);
  CHECK(doc.find("\"files\":[],\"elements\":[]") != std::string::npos);
  CHECK(read_unified(doc) == d);
  CHECK_FALSE(d.time_extent().has_value());
}

TEST_CASE("hand-written minimal document") {
  const std::string doc = R"({"schema_version":1,"service":"twitter","dataset_id":"t",
    "ingested_at":"2020-01-01T00:00:00Z",
    "files":[{"name":"tweet.js","folder":"data/","size_bytes":10,"file_category":"Text",
              "data_category":"PostsAndComments","element_count":1}],
    "elements":[{"id":"abc","time":"2019-01-01T12:34:56Z","text":"hello","category":"PostsAndComments",
                 "subcategory":"tweets","source_file":"data/tweet.js"}]})";
  const Dataset d = read_unified(doc);
  REQUIRE(d.files.size() == 1);
  CHECK(d.files[0].element_count == 1);
  CHECK(d.elements[0].dataset_id == "t");
  CHECK(d.elements[0].time == es_test::utc(2019, 1, 1, 12, 34, 56));
}

TEST_CASE("read_unified rejects invalid documents") {
  const std::string good = write_unified(small_dataset());
  auto mutate = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    s.replace(pos, from.size(), to);
    return s;
  };
  CHECK_THROWS_AS(read_unified(mutate("\"schema_version\":1", "\"schema_version\":2")), FormatVersionError);
  CHECK_THROWS_AS(read_unified(mutate("\"schema_version\":1,", "")), FormatVersionError);
  CHECK_THROWS_AS(read_unified("not json"), ValidationError);

  try {
    read_unified(mutate("\"source_file\":\"messages/inbox/a/message_1.json\"", "\"source_file\":\"missing.json\""));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field().find("source_file") != std::string::npos);
  }
  CHECK_THROWS_AS(read_unified(mutate("\"element_count\":2", "\"element_count\":3")), ValidationError);
  CHECK_THROWS_AS(read_unified(mutate("\"time\":\"2019-01-01T12:34:56Z\"", "\"time\":\"2019-01-01 12:34:56\"")),
                  ValidationError);
  CHECK_THROWS_AS(read_unified(mutate("\"category\":\"Messages\"", "\"category\":\"Chats\"")), ValidationError);
}

TEST_CASE("validate enforces the count and category invariants") {
  Dataset d = small_dataset();
  d.files[0].data_category = Category::kPostsAndComments;
  CHECK_THROWS_AS(d.validate(), ValidationError);
  d = small_dataset();
  d.elements.push_back(d.elements[0]);
  d.files[0].element_count = 3;
  CHECK_THROWS_AS(d.validate(), ValidationError);  // duplicate id
}

TEST_CASE("time formatting") {
  CHECK(format_rfc3339(from_unix_seconds(1546346096)) == "2019-01-01T12:34:56Z");
  CHECK(format_rfc3339(from_unix_seconds(0)) == "1970-01-01T00:00:00Z");
  CHECK(format_rfc3339(es_test::utc(1969, 12, 31, 23, 59, 59)) == "1969-12-31T23:59:59Z");
  CHECK(parse_rfc3339_utc("2019-01-01T12:34:56Z") == from_unix_seconds(1546346096));
  CHECK_FALSE(parse_rfc3339_utc("2019-01-01T12:34:56").has_value());
  CHECK_FALSE(parse_rfc3339_utc("2019-02-30T12:34:56Z").has_value());
  CHECK(days_since_epoch(from_unix_seconds(-1)) == -1);
  CHECK(seconds_of_day(from_unix_seconds(-1)) == 86399);
}
