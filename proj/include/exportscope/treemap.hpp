#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "exportscope/model.hpp"
#include "exportscope/query.hpp"

namespace exportscope {

enum class ScaleAttribute { kSize, kCount };

std::string_view scale_name(ScaleAttribute s);

struct TreemapNode {
  const FileElement* file = nullptr;
  std::size_t dataset_index = 0;
  double weight = 0;
};

struct TreemapRect {
  TreemapNode node;
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double area() const { return w * h; }
};

// One node per file, weighted by byte size or element count.
std::vector<TreemapNode> make_nodes(std::span<const FileRef> files, ScaleAttribute scale);

// Squarified layout of the leaves inside [0,width]x[0,height]. Nodes are
// placed by descending weight (ties: path, then dataset index); zero-weight
// nodes get empty rects at the bottom-right corner, after all others.
// Throws ValidationError for an empty node list or empty viewport and
// DegenerateLayoutError when every weight is zero.
std::vector<TreemapRect> squarify(std::span<const TreemapNode> nodes, double width, double height);

// All nodes in one strip across the longer viewport side, same ordering.
std::vector<TreemapRect> slice_layout(std::span<const TreemapNode> nodes, double width,
                                      double height);

// Largest max(w/h, h/w) over rects with positive area.
double worst_aspect_ratio(std::span<const TreemapRect> rects);

// Category color of the file's data, white for files without data elements.
std::string_view color_of(const TreemapNode& node);

}  // namespace exportscope
