#include <doctest.h>

#include <deque>
#include <numeric>

#include "exportscope/error.hpp"
#include "exportscope/treemap.hpp"
#include "support.hpp"

using namespace exportscope;

namespace {

// Owns the FileElements the nodes point at.
struct NodeSet {
  std::deque<FileElement> files;
  std::vector<TreemapNode> nodes;

  void add(double weight, std::optional<Category> cat = Category::kMessages) {
    files.push_back({"f" + std::to_string(files.size()) + ".json", "d/", static_cast<std::uint64_t>(weight),
                     FileCategory::kText, cat, 0, "ds"});
    nodes.push_back({&files.back(), 0, weight});
  }
};

double overlap(const TreemapRect& a, const TreemapRect& b) {
  const double w = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double h = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  return (w > 0 && h > 0) ? w * h : 0.0;
}

void check_layout(const std::vector<TreemapRect>& rects, const NodeSet& set, double W, double H) {
  REQUIRE(rects.size() == set.nodes.size());
  const double total = std::accumulate(set.nodes.begin(), set.nodes.end(), 0.0,
                                       [](double s, const TreemapNode& n) { return s + n.weight; });
  double area = 0;
  for (const auto& r : rects) {
    area += r.area();
    CHECK(r.w >= 0);
    CHECK(r.h >= 0);
    CHECK(r.x >= -1e-9);
    CHECK(r.y >= -1e-9);
    CHECK(r.x + r.w <= W + 1e-9);
    CHECK(r.y + r.h <= H + 1e-9);
    CHECK(std::abs(r.area() / (W * H) - r.node.weight / total) <= 1e-9);
  }
  CHECK(std::abs(area - W * H) <= 1e-6);
  for (std::size_t i = 0; i < rects.size(); ++i)
    for (std::size_t j = i + 1; j < rects.size(); ++j) CHECK(overlap(rects[i], rects[j]) <= 1e-9);
}

}  // namespace

TEST_CASE("a single node fills the viewport") {
  NodeSet s;
  s.add(42);
  const auto r = squarify(s.nodes, 640, 480);
  REQUIRE(r.size() == 1);
  CHECK(r[0].x == 0);
  CHECK(r[0].y == 0);
  CHECK(r[0].w == doctest::Approx(640));
  CHECK(r[0].h == doctest::Approx(480));
}

TEST_CASE("classic example in a 6x4 viewport") {
  NodeSet s;
  for (double w : {6, 6, 4, 3, 2, 2, 1}) s.add(w);
  const auto r = squarify(s.nodes, 6, 4);
  check_layout(r, s, 6, 4);
  // First row: the two 6s stacked along the short side as 3x2 blocks.
  CHECK(r[0].w == doctest::Approx(3));
  CHECK(r[0].h == doctest::Approx(2));
  CHECK(r[1].w == doctest::Approx(3));
  CHECK(r[1].h == doctest::Approx(2));
  CHECK(worst_aspect_ratio(r) <= worst_aspect_ratio(slice_layout(s.nodes, 6, 4)));
  CHECK(worst_aspect_ratio(r) < 3.0);
}

TEST_CASE("zero weights and degenerate inputs") {
  NodeSet s;
  s.add(5);
  s.add(0, std::nullopt);
  s.add(3);
  const auto r = squarify(s.nodes, 10, 10);
  REQUIRE(r.size() == 3);
  CHECK(r[2].node.weight == 0);
  CHECK(r[2].area() == 0);
  CHECK(r[0].area() + r[1].area() == doctest::Approx(100));

  NodeSet zeros;
  zeros.add(0);
  zeros.add(0);
  CHECK_THROWS_AS(squarify(zeros.nodes, 10, 10), DegenerateLayoutError);
  CHECK_THROWS_AS(squarify({}, 10, 10), ValidationError);
  CHECK_THROWS_AS(squarify(s.nodes, 0, 10), ValidationError);
}

TEST_CASE("random layouts are proportional, disjoint and complete") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    NodeSet s;
    const auto n = es_test::draw(rng, 1, 120);
    for (std::uint64_t i = 0; i < n; ++i) {
      // Heavy-tailed weights like file sizes.
      const double w = std::pow(10.0, static_cast<double>(es_test::draw(rng, 0, 6000)) / 1000.0);
      s.add(std::floor(w));
    }
    const double W = static_cast<double>(es_test::draw(rng, 50, 2000));
    const double H = static_cast<double>(es_test::draw(rng, 50, 2000));
    const auto sq = squarify(s.nodes, W, H);
    check_layout(sq, s, W, H);
    const auto sl = slice_layout(s.nodes, W, H);
    check_layout(sl, s, W, H);
    CHECK(worst_aspect_ratio(sq) <= worst_aspect_ratio(sl) + 1e-9);
  }
}

TEST_CASE("layout order is deterministic for ties") {
  NodeSet s;
  for (int i = 0; i < 8; ++i) s.add(10);
  const auto a = squarify(s.nodes, 300, 200);
  std::vector<TreemapNode> reversed(s.nodes.rbegin(), s.nodes.rend());
  const auto b = squarify(reversed, 300, 200);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].node.file == b[i].node.file);
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
  }
}

TEST_CASE("node weights and colors") {
  FileElement f{"m.json", "", 2048, FileCategory::kText, Category::kLocation, 7, "ds"};
  FileElement blank{"p.jpg", "", 900, FileCategory::kPicture, std::nullopt, 0, "ds"};
  const std::vector<FileRef> refs = {{&f, 0}, {&blank, 0}};
  const auto by_size = make_nodes(refs, ScaleAttribute::kSize);
  const auto by_count = make_nodes(refs, ScaleAttribute::kCount);
  CHECK(by_size[0].weight == 2048);
  CHECK(by_count[0].weight == 7);
  CHECK(by_count[1].weight == 0);
  CHECK(color_of(by_size[0]) == category_color(Category::kLocation));
  CHECK(color_of(by_size[1]) == kNoDataColor);
  CHECK(kNoDataColor == "#ffffff");
  CHECK(scale_name(ScaleAttribute::kCount) == "count");
}
