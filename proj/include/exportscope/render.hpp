#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exportscope/query.hpp"
#include "exportscope/treemap.hpp"

namespace exportscope {

// Treemap as a standalone SVG; each file rect carries a tooltip with its path,
// data category, element count and size.
std::string treemap_svg(std::span<const TreemapRect> rects, const MergedView& view, double width,
                        double height);

// Treemap geometry for an interactive front end:
// {"schema_version", "width", "height", "scale", "legend": [...], "rects": [...]}.
std::string treemap_geometry(std::span<const TreemapRect> rects, const MergedView& view,
                             double width, double height, ScaleAttribute scale);

struct TimelineOptions {
  double width = 1200;
  double panel_height = 320;
  std::int64_t offset_seconds = 0;
  // Fixes the x axis; otherwise the axis spans the plotted points.
  std::optional<TimeExtent> range;
  bool split_by_dataset = false;
};

struct MonthTick {
  std::int64_t day = 0;  // days since epoch of the 1st of the month
  std::string label;     // "2011-03", or "2011" when ticks are a year or more apart
};

// Month starts in [first_day, last_day], thinned so at most max_ticks remain.
std::vector<MonthTick> month_ticks(std::int64_t first_day, std::int64_t last_day,
                                   std::size_t max_ticks = 12);

// Dot plot of the selected elements: date on x, time of day on y, one outlined
// circle per element in its category color. Split mode stacks one panel per
// dataset.
std::string timeline_svg(const MergedView& view, const Selection& selection,
                         const TimelineOptions& options = {});

std::string stats_table(const Stats& stats);
std::string stats_json(const Stats& stats);

}  // namespace exportscope
