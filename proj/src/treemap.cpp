#include "exportscope/treemap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "exportscope/error.hpp"

namespace exportscope {

std::string_view scale_name(ScaleAttribute s) {
  return s == ScaleAttribute::kSize ? "size" : "count";
}

std::vector<TreemapNode> make_nodes(std::span<const FileRef> files, ScaleAttribute scale) {
  std::vector<TreemapNode> nodes;
  nodes.reserve(files.size());
  for (const auto& ref : files) {
    const double w = scale == ScaleAttribute::kSize ? static_cast<double>(ref.file->size_bytes)
                                                    : static_cast<double>(ref.file->element_count);
    nodes.push_back({ref.file, ref.dataset_index, w});
  }
  return nodes;
}

namespace {

struct Box {
  double x, y, w, h;
};

std::vector<std::size_t> placement_order(std::span<const TreemapNode> nodes) {
  std::vector<std::string> paths(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].file != nullptr) paths[i] = nodes[i].file->path();
  }
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (nodes[a].weight != nodes[b].weight) return nodes[a].weight > nodes[b].weight;
    if (paths[a] != paths[b]) return paths[a] < paths[b];
    return nodes[a].dataset_index < nodes[b].dataset_index;
  });
  return order;
}

void check_input(std::span<const TreemapNode> nodes, double width, double height) {
  if (nodes.empty()) throw ValidationError("nodes", "treemap needs at least one node");
  if (!(width > 0) || !(height > 0) || !std::isfinite(width) || !std::isfinite(height)) {
    throw ValidationError("viewport", "width and height must be positive");
  }
  for (const auto& n : nodes) {
    if (!(n.weight >= 0) || !std::isfinite(n.weight)) {
      throw ValidationError("weight", "weights must be finite and non-negative");
    }
  }
}

// Worst aspect ratio of a row with the given total area and extreme areas,
// laid along a side of length `side`.
double row_worst(double sum, double min_area, double max_area, double side) {
  const double s2 = sum * sum;
  const double side2 = side * side;
  return std::max(side2 * max_area / s2, s2 / (side2 * min_area));
}

// Places areas[begin, end) as one row along the shorter side of `box`,
// shrinking the box. Every rect gets exactly its area and starts where its
// neighbour ends; rounding may leave the final row a hair past the viewport
// edge.
void place_row(std::span<const double> areas, std::size_t begin, std::size_t end, Box& box,
               std::vector<Box>& out) {
  double sum = 0;
  for (std::size_t i = begin; i < end; ++i) sum += areas[i];
  if (box.w >= box.h) {
    const double thickness = sum / box.h;
    double y = box.y;
    for (std::size_t i = begin; i < end; ++i) {
      const double h = areas[i] / thickness;
      out.push_back({box.x, y, thickness, h});
      y += h;
    }
    box.x += thickness;
    box.w -= thickness;
  } else {
    const double thickness = sum / box.w;
    double x = box.x;
    for (std::size_t i = begin; i < end; ++i) {
      const double w = areas[i] / thickness;
      out.push_back({x, box.y, w, thickness});
      x += w;
    }
    box.y += thickness;
    box.h -= thickness;
  }
}

template <typename Place>
std::vector<TreemapRect> layout_with(std::span<const TreemapNode> nodes, double width,
                                     double height, Place&& place) {
  check_input(nodes, width, height);
  const auto order = placement_order(nodes);
  const double total = std::accumulate(nodes.begin(), nodes.end(), 0.0,
                                     [](double acc, const TreemapNode& n) { return acc + n.weight; });
  if (!(total > 0)) throw DegenerateLayoutError("all treemap weights are zero");

  std::size_t positive = 0;
  while (positive < order.size() && nodes[order[positive]].weight > 0) ++positive;
  std::vector<double> areas(positive);
  const double scale = static_cast<double>(width) * height / total;
  for (std::size_t i = 0; i < positive; ++i) areas[i] = nodes[order[i]].weight * scale;

  std::vector<Box> boxes;
  boxes.reserve(positive);
  place(std::span<const double>(areas), Box{0, 0, width, height}, boxes);

  std::vector<TreemapRect> rects;
  rects.reserve(nodes.size());
  for (std::size_t i = 0; i < positive; ++i) {
    rects.push_back({nodes[order[i]], boxes[i].x, boxes[i].y, boxes[i].w, boxes[i].h});
  }
  for (std::size_t i = positive; i < order.size(); ++i) {
    rects.push_back({nodes[order[i]], width, height, 0, 0});
  }
  return rects;
}

}  // namespace

std::vector<TreemapRect> squarify(std::span<const TreemapNode> nodes, double width, double height) {
  return layout_with(nodes, width, height,
                     [](std::span<const double> areas, Box box, std::vector<Box>& out) {
                       std::size_t i = 0;
                       while (i < areas.size()) {
                         const double side = std::min(box.w, box.h);
                         std::size_t end = i + 1;
                         double sum = areas[i];
                         double min_a = areas[i];
                         const double max_a = areas[i];  // areas are sorted descending
                         double worst = row_worst(sum, min_a, max_a, side);
                         while (end < areas.size()) {
                           const double next_sum = sum + areas[end];
                           const double next_min = std::min(min_a, areas[end]);
                           const double next_worst = row_worst(next_sum, next_min, max_a, side);
                           if (next_worst > worst) break;
                           sum = next_sum;
                           min_a = next_min;
                           worst = next_worst;
                           ++end;
                         }
                         place_row(areas, i, end, box, out);
                         i = end;
                       }
                     });
}

std::vector<TreemapRect> slice_layout(std::span<const TreemapNode> nodes, double width,
                                      double height) {
  return layout_with(nodes, width, height,
                     [](std::span<const double> areas, Box box, std::vector<Box>& out) {
                       // Slices run across the shorter side and stack along the longer one.
                       const bool horizontal = box.w >= box.h;
                       double pos = 0;
                       for (std::size_t i = 0; i < areas.size(); ++i) {
                         if (horizontal) {
                           const double w = areas[i] / box.h;
                           out.push_back({pos, 0, w, box.h});
                           pos += w;
                         } else {
                           const double h = areas[i] / box.w;
                           out.push_back({0, pos, box.w, h});
                           pos += h;
                         }
                       }
                     });
}

double worst_aspect_ratio(std::span<const TreemapRect> rects) {
  double worst = 1.0;
  for (const auto& r : rects) {
    if (!(r.w > 0) || !(r.h > 0)) continue;
    worst = std::max(worst, std::max(r.w / r.h, r.h / r.w));
  }
  return worst;
}

std::string_view color_of(const TreemapNode& node) {
  if (node.file == nullptr || !node.file->data_category) return kNoDataColor;
  return category_color(*node.file->data_category);
}

}  // namespace exportscope
