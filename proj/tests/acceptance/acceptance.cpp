// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "exportscope/error.hpp"
#include "exportscope/render.hpp"
#include "exportscope/sensitivity.hpp"
#include "exportscope/treemap.hpp"
#include "exportscope/unified_io.hpp"
#include "support.hpp"

using namespace exportscope;
using Clock = std::chrono::steady_clock;
using DatasetPtr = std::shared_ptr<const Dataset>;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> failures;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (failures.size() < 5) failures.push_back(what);
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

DatasetPtr ingest_ptr(const Fixture& fx, const std::string& name) {
  return std::make_shared<const Dataset>(es_test::ingest_fixture(fx, name).parsed.dataset);
}

struct Uc2 {
  std::vector<std::string> names;
  std::vector<Fixture> fixtures;
  std::vector<DatasetPtr> datasets;
};

const Uc2& uc2() {
  static const Uc2 data = [] {
    Uc2 d;
    for (const auto& p : use_case_2_presets()) {
      d.names.push_back(p.name);
      d.fixtures.push_back(generate(p.spec));
      d.datasets.push_back(ingest_ptr(d.fixtures.back(), p.name + ".zip"));
    }
    return d;
  }();
  return data;
}

// 1 -------------------------------------------------------------------------
Outcome round_trip() {
  Outcome o;
  const auto t0 = Clock::now();
  std::uint64_t elements = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto spec = es_test::random_spec(seed, 10000);
    const auto tag = "seed " + std::to_string(seed);
    o.require(spec.volume.total_elements() + (spec.featured ? spec.featured->messages : 0) <= 10000,
              tag + ": spec over budget");
    const auto fx = generate(spec);
    const auto result = es_test::ingest_fixture(fx);
    const Dataset& ds = result.parsed.dataset;
    const std::string doc = write_unified(ds);
    const Dataset back = read_unified(doc);
    o.require(back == ds, tag + ": read_unified differs from the parsed dataset");
    o.require(write_unified(back) == doc, tag + ": second write differs");
    const auto counts = es_test::count_by_category(ds);
    for (auto c : kAllCategories) {
      o.require(counts[static_cast<std::size_t>(c)] == fx.manifest.count(c),
                tag + ": " + std::string(category_name(c)) + " count differs from manifest");
    }
    o.require(result.service == fx.manifest.expected_service, tag + ": wrong service");
    elements += ds.elements.size();
  }
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "took " + fmt("%.1f", secs) + " s");
  o.detail = "100 specs, " + std::to_string(elements) + " elements, " + fmt("%.2f", secs) + " s";
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome detection() {
  Outcome o;
  std::size_t archives = 0;
  auto check = [&](const Fixture& fx, const std::string& tag) {
    const auto got = detect_service(list_archive(fx.archive), default_signatures());
    o.require(got == fx.manifest.expected_service, tag + ": detected " + got);
    ++archives;
  };
  for (const auto& service : fixture_services()) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto spec = es_test::random_spec(seed * 31, 2000);
      spec.service = service;
      check(generate(spec), service + " seed " + std::to_string(seed));
    }
    FixtureSpec empty;
    empty.service = service;
    empty.time_span = {es_test::utc(2015, 1, 1), es_test::utc(2016, 1, 1)};
    check(generate(empty), service + " empty");
  }
  check(generate(use_case_1_preset()), "use case 1");
  for (const auto& p : use_case_2_presets()) check(generate(p.spec), p.name);

  ZipWriter w;
  w.add("notes/todo.txt", "milk");
  w.add("data.json", "{}");
  bool threw = false;
  try {
    detect_service(list_archive(w.finish()), default_signatures());
  } catch (const UnknownServiceError&) {
    threw = true;
  }
  o.require(threw, "signatureless archive was not rejected");
  o.detail = std::to_string(archives) + " fixture archives, signatureless archive rejected";
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome mojibake() {
  Outcome o;
  o.require(repair_mojibake(es_test::lift_bytes("\xC3\xA9")) == "\xC3\xA9", "golden e-acute");
  o.require(repair_mojibake(es_test::lift_bytes("\xF0\x9F\x98\x80")) == "\xF0\x9F\x98\x80", "golden emoji");
  o.require(repair_mojibake("\xC3\xA9") == "\xC3\xA9", "correct text changed");
  std::mt19937_64 rng(1000003);
  std::size_t tested = 0, round_trips = 0, excluded = 0;
  for (int i = 0; i < 5000; ++i) {
    const std::string t = es_test::random_unicode(rng, 32);
    const std::string lifted = es_test::lift_bytes(t);
    for (const auto* s : {&t, &lifted}) {
      const std::string once = repair_mojibake(*s);
      o.require(repair_mojibake(once) == once, "not idempotent");
      ++tested;
    }
    if (lifted == t) continue;  // pure ASCII
    // Text that already reads as valid mojibake gets peeled further; the
    // round trip is defined for the rest.
    if (repair_mojibake(t) != t) {
      ++excluded;
      continue;
    }
    o.require(repair_mojibake(lifted) == t, "round trip failed");
    ++round_trips;
  }
  o.require(round_trips >= 1000, "fewer than 1000 round trips");
  o.detail = std::to_string(round_trips) + " round trips, " + std::to_string(tested) + " idempotence checks, " +
             std::to_string(excluded) + " self-mojibake inputs excluded";
  return o;
}

// 4 -------------------------------------------------------------------------
Outcome js_unwrap() {
  Outcome o;
  std::size_t files = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto spec = es_test::random_spec(seed * 7, 3000);
    spec.service = "twitter";
    const auto fx = generate(spec);
    const auto zip = ZipArchive::from_bytes(fx.archive);
    for (const auto& e : zip.entries()) {
      if (e.name.size() < 3 || e.name.compare(e.name.size() - 3, 3, ".js") != 0) continue;
      ++files;
      try {
        const auto doc = nlohmann::json::parse(unwrap_js_export(zip.read(e)));
        o.require(!doc.is_discarded(), e.name + ": not JSON");
      } catch (const std::exception& ex) {
        o.require(false, e.name + ": " + ex.what());
      }
    }
  }
  std::size_t rejected = 0;
  for (const char* bad : {"[1, 2, 3]", "{\"a\": 1}", "", "   ", "x == [1]", "x => [1]", "f(x) = 1", "x = ",
                          "x = [1]; y = [2]", "return [1]", "// x = [1]"}) {
    try {
      unwrap_js_export(bad);
      o.require(false, std::string("accepted: ") + bad);
    } catch (const WrapperFormatError&) {
      ++rejected;
    }
  }
  o.require(files > 10, "too few .js files");
  o.detail = std::to_string(files) + " fixture .js files unwrapped, " + std::to_string(rejected) +
             " non-assignment inputs rejected";
  return o;
}

// 5 -------------------------------------------------------------------------
using Keys = std::vector<std::pair<std::size_t, std::string>>;

Keys keys_of(const std::vector<ElementRef>& refs) {
  Keys k;
  for (const auto& r : refs) k.emplace_back(r.dataset_index, r.element->id);
  return k;
}

Keys keys_of(const std::vector<es_test::NaiveHit>& hits) {
  Keys k;
  for (const auto& h : hits) k.emplace_back(h.dataset_index, h.element->id);
  return k;
}

bool is_subset(const std::vector<ElementRef>& small, const std::vector<ElementRef>& big) {
  std::set<std::pair<std::size_t, std::string>> b;
  for (const auto& r : big) b.insert({r.dataset_index, r.element->id});
  return std::all_of(small.begin(), small.end(),
                     [&](const ElementRef& r) { return b.count({r.dataset_index, r.element->id}) > 0; });
}

// A random word of a random element, so most queries hit something.
std::string random_needle(std::mt19937_64& rng, const MergedView& view) {
  const auto& e = *view.elements()[es_test::draw(rng, 0, view.elements().size() - 1)].element;
  std::istringstream words(e.text);
  std::vector<std::string> list;
  for (std::string w; words >> w;) list.push_back(w);
  if (list.empty()) return "a";
  std::string w = list[es_test::draw(rng, 0, list.size() - 1)];
  // Trim to a prefix that ends on a code point boundary.
  std::size_t cut = es_test::draw(rng, 1, w.size());
  while (cut < w.size() && (static_cast<unsigned char>(w[cut]) & 0xC0) == 0x80) ++cut;
  return w.substr(0, cut);
}

std::string flip_ascii_case(std::string s, std::mt19937_64& rng) {
  for (auto& ch : s) {
    if (std::isalpha(static_cast<unsigned char>(ch)) && es_test::draw(rng, 0, 1)) {
      ch = std::isupper(static_cast<unsigned char>(ch)) ? static_cast<char>(std::tolower(ch))
                                                          : static_cast<char>(std::toupper(ch));
    }
  }
  return s;
}

Outcome query_oracle() {
  Outcome o;
  const auto& data = uc2();
  const auto view = MergedView::merge(data.datasets);
  std::mt19937_64 rng(500);
  const auto extent = *compute_stats(view).time_extent;
  const auto span = to_unix_seconds(extent.max) - to_unix_seconds(extent.min);
  std::size_t hits = 0, with_query = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto tag = "trial " + std::to_string(trial);
    Selection sel;
    if (es_test::draw(rng, 0, 2) == 0) {
      for (const auto& d : data.datasets)
        if (es_test::draw(rng, 0, 1)) sel.dataset_ids.push_back(d->dataset_id);
    }
    if (es_test::draw(rng, 0, 1)) {
      for (auto c : kAllCategories)
        if (es_test::draw(rng, 0, 2) == 0) sel.categories.push_back(c);
    }
    if (es_test::draw(rng, 0, 1)) {
      const auto a = extent.min + std::chrono::seconds(es_test::draw(rng, 0, span));
      const auto b = a + std::chrono::seconds(es_test::draw(rng, 0, span / 2));
      sel.time_range = TimeExtent{a, b};
    }
    if (es_test::draw(rng, 0, 3) != 0) {
      sel.query = random_needle(rng, view);
      ++with_query;
    }
    const auto got = apply_selection(view, sel);
    o.require(keys_of(got) == keys_of(es_test::naive_select(data.datasets, sel)), tag + ": differs from full scan");
    hits += got.size();

    // Monotonicity: dropping any filter never loses elements; extending the
    // query never gains any.
    for (int drop = 0; drop < 4; ++drop) {
      Selection wider = sel;
      if (drop == 0) wider.dataset_ids.clear();
      if (drop == 1) wider.categories.clear();
      if (drop == 2) wider.time_range.reset();
      if (drop == 3) wider.query.reset();
      o.require(is_subset(got, apply_selection(view, wider)), tag + ": not monotone");
    }
    if (sel.query) {
      Selection longer = sel;
      *longer.query += random_needle(rng, view).substr(0, 1);
      o.require(is_subset(apply_selection(view, longer), got), tag + ": longer query gained elements");
      Selection flipped = sel;
      flipped.query = flip_ascii_case(*sel.query, rng);
      o.require(keys_of(apply_selection(view, flipped)) == keys_of(got), tag + ": case-sensitive");
      Selection folded = sel;
      folded.query = casefold_utf8(*sel.query);
      o.require(keys_of(apply_selection(view, folded)) == keys_of(got), tag + ": fold-sensitive");
    }
  }
  o.detail = "500 selections over " + std::to_string(view.elements().size()) + " elements (" +
             std::to_string(with_query) + " with text queries, " + std::to_string(hits) + " hits)";
  return o;
}

// 6 -------------------------------------------------------------------------
Outcome timeline() {
  Outcome o;
  {
    Dataset d;
    d.dataset_id = "golden";
    d.service = "twitter";
    d.files.push_back({"tweet.js", "data/", 1, FileCategory::kText, Category::kPostsAndComments, 1, "golden"});
    d.elements.push_back({"g", es_test::utc(2019, 1, 1, 12, 34, 56), "t", Category::kPostsAndComments, "",
                          "data/tweet.js", "golden"});
    const auto view = MergedView::merge({std::make_shared<const Dataset>(d)});
    const auto pts = timeline_project(apply_selection(view, {}));
    o.require(pts.size() == 1 && pts[0].y == 45296, "12:34:56 does not map to 45296");
  }
  const auto& data = uc2();
  const auto view = MergedView::merge(data.datasets);
  const auto refs = apply_selection(view, {});
  std::size_t checked = 0;
  for (std::int64_t offset : {0ll, 3600ll, -8 * 3600ll, 5 * 3600ll + 1800, 14 * 3600ll}) {
    const auto pts = timeline_project(refs, offset);
    for (const auto& p : pts) {
      o.require(p.y >= 0 && p.y < 86400, "y out of range");
      o.require(p.x * 86400 + p.y == to_unix_seconds(*p.ref.element->time) + offset, "x/y do not recompose");
    }
    checked += pts.size();
    std::multiset<std::pair<std::size_t, std::string>> whole, joined;
    for (const auto& p : pts) whole.insert({p.ref.dataset_index, p.ref.element->id});
    const auto parts = partition_by_dataset(view, pts);
    o.require(parts.size() == data.datasets.size(), "wrong panel count");
    for (const auto& part : parts) {
      for (const auto& p : part.points) {
        o.require(p.ref.dataset_index == part.dataset_index, "point in the wrong panel");
        joined.insert({p.ref.dataset_index, p.ref.element->id});
      }
    }
    o.require(joined == whole, "union of panels differs from the whole");
  }
  o.detail = std::to_string(checked) + " points over 5 display offsets, partition law on " +
             std::to_string(data.datasets.size()) + " datasets";
  return o;
}

// 7 -------------------------------------------------------------------------
Outcome treemap() {
  Outcome o;
  std::mt19937_64 rng(200);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_prop = 0, worst_total = 0, worst_overlap = 0, worst_overrun = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = es_test::draw(rng, 1, 200);
    std::deque<FileElement> files;
    std::vector<TreemapNode> nodes;
    for (std::uint64_t i = 0; i < n; ++i) {
      double w = 0;
      switch (es_test::draw(rng, 0, 3)) {
        case 0: w = unit(rng); break;
        case 1: w = static_cast<double>(es_test::draw(rng, 1, 1000000)); break;
        case 2: w = std::pow(10.0, 6 * unit(rng)); break;
        default: w = es_test::draw(rng, 0, 9) == 0 ? 0.0 : 1.0 + unit(rng); break;
      }
      files.push_back({"f" + std::to_string(i), "", 0, FileCategory::kOther, std::nullopt, 0, "ds"});
      nodes.push_back({&files.back(), 0, w});
    }
    const double total = std::accumulate(nodes.begin(), nodes.end(), 0.0,
                                         [](double s, const TreemapNode& nd) { return s + nd.weight; });
    if (total == 0) nodes[0].weight = 1;
    const double W = 100 + 1900 * unit(rng);
    const double H = 100 + 1900 * unit(rng);
    const double sum = std::accumulate(nodes.begin(), nodes.end(), 0.0,
                                       [](double s, const TreemapNode& nd) { return s + nd.weight; });
    const auto rects = squarify(nodes, W, H);
    o.require(rects.size() == nodes.size(), "rect count");
    double area = 0;
    for (const auto& r : rects) {
      area += r.area();
      const double expected = W * H * r.node.weight / sum;
      const double rel = expected == 0 ? r.area() : std::abs(r.area() - expected) / expected;
      worst_prop = std::max(worst_prop, rel);
      worst_overrun = std::max({worst_overrun, -r.x / W, -r.y / H, (r.x + r.w - W) / W, (r.y + r.h - H) / H});
    }
    for (std::size_t i = 0; i < rects.size(); ++i) {
      for (std::size_t j = i + 1; j < rects.size(); ++j) {
        const auto& a = rects[i];
        const auto& b = rects[j];
        const double ow = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
        const double oh = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
        if (ow > 0 && oh > 0) worst_overlap = std::max(worst_overlap, ow * oh);
      }
    }
    worst_total = std::max(worst_total, std::abs(area - W * H) / (W * H));
  }
  o.require(worst_prop <= 1e-9, "proportionality error " + fmt("%.3g", worst_prop));
  o.require(worst_overlap == 0, "overlap " + fmt("%.3g", worst_overlap));
  o.require(worst_total <= 1e-6, "total area error " + fmt("%.3g", worst_total));
  // Areas are exact, so a thin final box can push the last row past the edge
  // by its rounding error.
  o.require(worst_overrun <= 1e-9, "rect exceeds the viewport by " + fmt("%.3g", worst_overrun));

  // Same inputs, same bytes, from archive generation through to the SVG.
  auto svg_once = [] {
    const auto fx = generate(use_case_1_preset());
    const auto view = MergedView::merge({ingest_ptr(fx, "uc1.zip")});
    const auto rects = squarify(make_nodes(select_files(view), ScaleAttribute::kSize), 1200, 800);
    return treemap_svg(rects, view, 1200, 800);
  };
  o.require(svg_once() == svg_once(), "SVG output differs between runs");
  o.detail = "200 layouts: max relative area error " + fmt("%.2g", worst_prop) + ", max overlap " +
             fmt("%.2g", worst_overlap) + ", max total error " + fmt("%.2g", worst_total) + ", max edge overrun " + fmt("%.2g", worst_overrun) + "; SVG byte-equal";
  return o;
}

// 8 -------------------------------------------------------------------------
Outcome sensitivity() {
  Outcome o;
  const auto& data = uc2();
  const auto view = MergedView::merge(data.datasets);
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SensitivityStore store;
  std::map<std::string, double> naive;
  const auto base = es_test::utc(2021, 1, 1);
  for (int i = 0; i < 2000; ++i) {
    const auto& id = view.elements()[es_test::draw(rng, 0, view.elements().size() - 1)].element->id;
    const double v = unit(rng);
    store.rate(view, id, v, base + std::chrono::seconds(i));
    naive[id] = v;
  }
  double sum = 0;
  for (const auto& [id, v] : naive) sum += v;
  const double mean = sum / static_cast<double>(naive.size());
  const auto avg = average(store, view);
  o.require(avg && std::abs(*avg - mean) <= 1e-12, "average differs from the naive mean");
  // Per-dataset averages against the naive mean over that dataset.
  for (const auto& d : data.datasets) {
    Selection sel;
    sel.dataset_ids = {d->dataset_id};
    double s = 0;
    std::size_t n = 0;
    for (const auto& e : d->elements) {
      const auto it = naive.find(e.id);
      if (it == naive.end()) continue;
      s += it->second;
      ++n;
    }
    const auto a = average(store, view, sel);
    o.require(n == 0 ? !a.has_value() : (a && std::abs(*a - s / static_cast<double>(n)) <= 1e-12),
              d->dataset_id + ": average differs");
  }

  const auto file = std::filesystem::temp_directory_path() / "exportscope_acceptance_ratings.json";
  store.save(file);
  o.require(SensitivityStore::load(file) == store, "persistence round trip differs");
  std::filesystem::remove(file);

  const auto& id = view.elements().front().element->id;
  store.rate(view, id, 0.1, base + std::chrono::hours(100000));
  store.rate(view, id, 0.7, base + std::chrono::hours(100001));
  o.require(store.value(id) == 0.7, "later rating did not replace the earlier one");
  store.rate(view, id, 0.3, base);
  o.require(store.value(id) == 0.7, "older rating replaced a newer one");

  o.detail = "2000 ratings on " + std::to_string(naive.size()) + " elements, mean " + fmt("%.6f", mean);
  return o;
}

// 9 -------------------------------------------------------------------------
std::vector<Category> ranked(const std::array<std::uint64_t, kCategoryCount>& counts) {
  std::vector<Category> order(kAllCategories.begin(), kAllCategories.end());
  std::stable_sort(order.begin(), order.end(), [&](Category a, Category b) {
    return counts[static_cast<std::size_t>(a)] > counts[static_cast<std::size_t>(b)];
  });
  return order;
}

Outcome use_cases() {
  Outcome o;
  std::string detail;
  {
    const auto fx = generate(use_case_1_preset());
    const auto ds = ingest_ptr(fx, "uc1.zip");
    const auto view = MergedView::merge({ds});
    const auto rects = squarify(make_nodes(select_files(view), ScaleAttribute::kSize), 1200, 800);
    const auto largest = std::max_element(rects.begin(), rects.end(), [](const auto& a, const auto& b) {
      return a.area() < b.area();
    });
    const std::string path = largest->node.file->path();
    const bool is_alice = path.find("messages/inbox/alice_") == 0 &&
                          largest->node.file->data_category == Category::kMessages;
    o.require(is_alice, "largest treemap node is " + path);

    Selection sel;
    sel.query = "Alice";
    const auto found = apply_selection(view, sel);
    std::set<std::string> got, want;
    for (const auto& r : found) got.insert(r.element->id);
    for (const auto& e : ds->elements)
      if (e.source_file == path) want.insert(e.id);
    o.require(!want.empty() && got == want, "search 'Alice' returned " + std::to_string(got.size()) +
                                                " elements, the conversation file holds " +
                                                std::to_string(want.size()));
    detail = "UC1 largest node " + path + ", 'Alice' -> " + std::to_string(got.size()) + " elements";
  }
  {
    const auto& data = uc2();
    const auto view = MergedView::merge(data.datasets);
    for (std::size_t i = 0; i < data.names.size(); ++i) {
      Selection sel;
      sel.dataset_ids = {data.datasets[i]->dataset_id};
      const auto stats = compute_stats(view, sel);
      const auto from_stats = ranked(stats.per_category);
      const auto from_manifest = ranked(data.fixtures[i].manifest.expected_counts);
      o.require(stats.per_category == data.fixtures[i].manifest.expected_counts,
                data.names[i] + ": counts differ from manifest");
      if (data.names[i] == "bob-google") {
        const std::set<Category> top2(from_stats.begin(), from_stats.begin() + 2);
        o.require(top2 == std::set<Category>{Category::kLocation, Category::kActivity},
                  "bob-google top categories are " + std::string(category_name(from_stats[0])) + "+" +
                      std::string(category_name(from_stats[1])));
        o.require(std::set<Category>(from_manifest.begin(), from_manifest.begin() + 2) == top2,
                  "bob-google ranking differs from manifest");
        detail += "; bob-google top " + std::string(category_name(from_stats[0])) + "+" +
                  std::string(category_name(from_stats[1]));
      }
      if (data.names[i] == "alice-facebook") {
        o.require(from_stats[0] == Category::kMessages && from_manifest[0] == Category::kMessages,
                  "alice-facebook top category is " + std::string(category_name(from_stats[0])));
        detail += "; alice-facebook top " + std::string(category_name(from_stats[0]));
      }
    }
  }
  o.detail = detail;
  return o;
}

// 10 ------------------------------------------------------------------------
Outcome scale() {
  Outcome o;
  FixtureSpec spec;
  spec.service = "google";
  spec.seed = 100000;
  spec.time_span = {es_test::utc(2012, 1, 1), es_test::utc(2019, 12, 31)};
  spec.volume = {10, 100, 1000, 1000, 90000, 2000, 100, 1000, 3900, 0};
  const auto fx = generate(spec);
  const auto file = std::filesystem::temp_directory_path() / "exportscope_acceptance_scale.zip";
  {
    std::ofstream out(file, std::ios::binary);
    out.write(fx.archive.data(), static_cast<std::streamsize>(fx.archive.size()));
  }
  const auto t0 = Clock::now();
  const auto zip = ZipArchive::open_file(file);
  const auto result = ingest_archive(zip, file.filename().string(), Registry{}, {});
  const auto ds = std::make_shared<const Dataset>(result.parsed.dataset);
  const auto stats = compute_stats(MergedView::merge({ds}));
  const double secs = seconds_since(t0);
  std::filesystem::remove(file);
  o.require(stats.total_elements == fx.manifest.total_elements(), "element count differs from manifest");
  o.require(stats.total_elements >= 100000, "fixture below 1e5 elements");
  o.require(secs < 10.0, "took " + fmt("%.2f", secs) + " s");
  o.detail = std::to_string(stats.total_elements) + " elements, " +
             std::to_string(fx.archive.size() / 1024) + " KiB archive, ingest+stats " + fmt("%.2f", secs) + " s";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"unification round trip", round_trip},
      {"service detection", detection},
      {"mojibake repair", mojibake},
      {"js unwrap", js_unwrap},
      {"query oracle equivalence", query_oracle},
      {"timeline projection", timeline},
      {"treemap layout", treemap},
      {"sensitivity store", sensitivity},
      {"use-case scenarios", use_cases},
      {"scale", scale},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, run] = criteria[i];
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = seconds_since(t0);
    std::printf("%s [%zu] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, name.c_str(), o.detail.c_str(), secs);
    for (const auto& f : o.failures) std::printf("     - %s\n", f.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
