#include "exportscope/render.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace exportscope {

namespace {

using J = nlohmann::ordered_json;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Cuts at a code point boundary.
std::string truncate_utf8(std::string_view s, std::size_t max_bytes) {
  if (s.size() <= max_bytes) return std::string(s);
  std::size_t n = max_bytes;
  while (n > 0 && (static_cast<unsigned char>(s[n]) & 0xC0) == 0x80) --n;
  return std::string(s.substr(0, n)) + "...";
}

std::string svg_open(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\" font-family=\"sans-serif\">\n";
}

std::string file_label(const TreemapRect& r, const MergedView& view) {
  const FileElement& f = *r.node.file;
  std::string s = view.datasets()[r.node.dataset_index]->dataset_id + ": " + f.path();
  s += "\n" + std::string(f.data_category ? category_label(*f.data_category) : "no data elements");
  s += "\nelements: " + std::to_string(f.element_count) + ", bytes: " + std::to_string(f.size_bytes);
  return s;
}

}  // namespace

std::string treemap_svg(std::span<const TreemapRect> rects, const MergedView& view, double width,
                        double height) {
  std::string out = svg_open(width, height);
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" fill=\"#f0f0f0\"/>\n";
  for (const auto& r : rects) {
    if (!(r.w > 0) || !(r.h > 0) || r.node.file == nullptr) continue;
    out += "<rect x=\"" + num(r.x) + "\" y=\"" + num(r.y) + "\" width=\"" + num(r.w) +
           "\" height=\"" + num(r.h) + "\" fill=\"" + std::string(color_of(r.node)) +
           "\" stroke=\"#333333\" stroke-width=\"0.5\"><title>" + xml_escape(file_label(r, view)) +
           "</title></rect>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string treemap_geometry(std::span<const TreemapRect> rects, const MergedView& view,
                             double width, double height, ScaleAttribute scale) {
  J doc;
  doc["schema_version"] = 1;
  doc["width"] = width;
  doc["height"] = height;
  doc["scale"] = scale_name(scale);
  J legend = J::array();
  for (auto c : kAllCategories) {
    legend.push_back({{"category", category_name(c)},
                      {"label", category_label(c)},
                      {"color", category_color(c)}});
  }
  legend.push_back({{"category", nullptr}, {"label", "No data elements"}, {"color", kNoDataColor}});
  doc["legend"] = std::move(legend);
  J list = J::array();
  for (const auto& r : rects) {
    if (r.node.file == nullptr) continue;
    const FileElement& f = *r.node.file;
    list.push_back({{"dataset_id", view.datasets()[r.node.dataset_index]->dataset_id},
                    {"path", f.path()},
                    {"x", r.x},
                    {"y", r.y},
                    {"w", r.w},
                    {"h", r.h},
                    {"weight", r.node.weight},
                    {"color", color_of(r.node)},
                    {"file_category", file_category_name(f.file_category)},
                    {"data_category", f.data_category ? J(category_name(*f.data_category)) : J(nullptr)},
                    {"element_count", f.element_count},
                    {"size_bytes", f.size_bytes}});
  }
  doc["rects"] = std::move(list);
  return doc.dump(2) + "\n";
}

std::vector<MonthTick> month_ticks(std::int64_t first_day, std::int64_t last_day,
                                   std::size_t max_ticks) {
  using namespace std::chrono;
  std::vector<std::pair<std::int64_t, year_month>> starts;
  if (first_day > last_day || max_ticks == 0) return {};
  const year_month_day first{sys_days{days{first_day}}};
  year_month ym{first.year(), first.month()};
  if (first.day() != day{1}) ym += months{1};
  for (;;) {
    const std::int64_t d = sys_days{ym / 1}.time_since_epoch().count();
    if (d > last_day) break;
    starts.emplace_back(d, ym);
    ym += months{1};
  }
  static constexpr int kSteps[] = {1, 2, 3, 4, 6, 12, 24, 60, 120, 240, 600, 1200};
  int step = kSteps[std::size(kSteps) - 1];
  for (int s : kSteps) {
    // Upper bound on how many aligned ticks fall inside the range.
    if ((starts.size() + static_cast<std::size_t>(s) - 1) / static_cast<std::size_t>(s) <= max_ticks) {
      step = s;
      break;
    }
  }
  std::vector<MonthTick> ticks;
  for (const auto& [d, m] : starts) {
    const int index = static_cast<int>(m.year()) * 12 + static_cast<int>(static_cast<unsigned>(m.month())) - 1;
    if (index % step != 0) continue;
    char buf[16];
    if (step >= 12) {
      std::snprintf(buf, sizeof buf, "%04d", static_cast<int>(m.year()));
    } else {
      std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(m.year()),
                    static_cast<unsigned>(m.month()));
    }
    ticks.push_back({d, buf});
  }
  return ticks;
}

std::string timeline_svg(const MergedView& view, const Selection& selection,
                         const TimelineOptions& options) {
  constexpr double kLeft = 60, kRight = 20, kTop = 28, kBottom = 36, kLegend = 28;
  Selection sel = selection;
  if (options.range && !sel.time_range) sel.time_range = options.range;

  std::vector<DatasetTimeline> panels;
  if (options.split_by_dataset) {
    panels = partition_by_dataset(view, sel, options.offset_seconds);
  } else {
    const auto selected = apply_selection(view, sel);
    panels.push_back({0, "all datasets", timeline_project(selected, options.offset_seconds)});
  }

  std::int64_t x0 = 0, x1 = 0;
  if (options.range) {
    const auto shift = std::chrono::seconds{options.offset_seconds};
    x0 = days_since_epoch(options.range->min + shift);
    x1 = days_since_epoch(options.range->max + shift);
  } else {
    bool any = false;
    for (const auto& p : panels) {
      for (const auto& pt : p.points) {
        x0 = any ? std::min(x0, pt.x) : pt.x;
        x1 = any ? std::max(x1, pt.x) : pt.x;
        any = true;
      }
    }
  }
  const double plot_w = std::max(1.0, options.width - kLeft - kRight);
  const double plot_h = std::max(1.0, options.panel_height - kTop - kBottom);
  const double span_days = static_cast<double>(x1 - x0 + 1);
  auto px = [&](std::int64_t x) { return kLeft + (static_cast<double>(x - x0) + 0.5) / span_days * plot_w; };
  auto py = [&](std::int64_t y) { return static_cast<double>(y) / kSecondsPerDay * plot_h; };
  const auto ticks = month_ticks(x0, x1, 12);

  const double total_h = kLegend + options.panel_height * static_cast<double>(panels.size());
  std::string out = svg_open(options.width, total_h);

  double lx = kLeft;
  for (auto c : kAllCategories) {
    out += "<circle cx=\"" + num(lx) + "\" cy=\"14\" r=\"4\" fill=\"none\" stroke=\"" +
           std::string(category_color(c)) + "\" stroke-width=\"1.5\"/>";
    out += "<text x=\"" + num(lx + 8) + "\" y=\"18\" font-size=\"11\">" +
           xml_escape(category_label(c)) + "</text>\n";
    lx += 16 + 6.5 * static_cast<double>(category_label(c).size());
  }

  for (std::size_t i = 0; i < panels.size(); ++i) {
    const auto& panel = panels[i];
    const double oy = kLegend + options.panel_height * static_cast<double>(i);
    std::string title = panel.dataset_id;
    if (options.split_by_dataset) {
      title += " (" + view.datasets()[panel.dataset_index]->service + ")";
    }
    title += ": " + std::to_string(panel.points.size()) + " elements";
    out += "<g transform=\"translate(0," + num(oy) + ")\">\n";
    out += "<text x=\"" + num(kLeft) + "\" y=\"18\" font-size=\"13\" font-weight=\"bold\">" +
           xml_escape(title) + "</text>\n";
    out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(plot_w) +
           "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"#999999\"/>\n";
    for (int h = 0; h <= 24; h += 6) {
      const double y = kTop + py(h * 3600);
      char label[8];
      std::snprintf(label, sizeof label, "%02d:00", h);
      out += "<line x1=\"" + num(kLeft - 4) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft) +
             "\" y2=\"" + num(y) + "\" stroke=\"#999999\"/>";
      out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(y + 4) +
             "\" font-size=\"10\" text-anchor=\"end\">" + label + "</text>\n";
    }
    for (const auto& t : ticks) {
      const double x = kLeft + static_cast<double>(t.day - x0) / span_days * plot_w;
      const double y = kTop + plot_h;
      out += "<line x1=\"" + num(x) + "\" y1=\"" + num(y) + "\" x2=\"" + num(x) + "\" y2=\"" +
             num(y + 4) + "\" stroke=\"#999999\"/>";
      out += "<text x=\"" + num(x) + "\" y=\"" + num(y + 16) +
             "\" font-size=\"10\" text-anchor=\"middle\">" + t.label + "</text>\n";
    }
    for (const auto& pt : panel.points) {
      const DataElement& e = *pt.ref.element;
      out += "<circle cx=\"" + num(px(pt.x)) + "\" cy=\"" + num(kTop + py(pt.y)) +
             "\" r=\"3\" fill=\"none\" stroke=\"" + std::string(category_color(e.category)) +
             "\" stroke-width=\"1\"><title>" +
             xml_escape(format_rfc3339(*e.time) + " " + truncate_utf8(e.text, 120)) +
             "</title></circle>\n";
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string stats_table(const Stats& stats) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-20s %12s\n", "Category", "Elements");
  out += line;
  for (auto c : kAllCategories) {
    std::snprintf(line, sizeof line, "%-20s %12llu\n", std::string(category_label(c)).c_str(),
                  static_cast<unsigned long long>(stats.count(c)));
    out += line;
  }
  std::snprintf(line, sizeof line, "%-20s %12llu\n", "Total",
                static_cast<unsigned long long>(stats.total_elements));
  out += line;
  std::snprintf(line, sizeof line, "%-20s %12llu\n", "File bytes",
                static_cast<unsigned long long>(stats.total_size_bytes));
  out += line;
  if (stats.time_extent) {
    out += "Time span            " + format_rfc3339(stats.time_extent->min) + " .. " +
           format_rfc3339(stats.time_extent->max) + "\n";
  } else {
    out += "Time span            none\n";
  }
  for (const auto& [service, n] : stats.per_service) {
    std::snprintf(line, sizeof line, "Service %-12s %12llu\n", service.c_str(),
                  static_cast<unsigned long long>(n));
    out += line;
  }
  return out;
}

std::string stats_json(const Stats& stats) {
  J doc;
  doc["total_elements"] = stats.total_elements;
  doc["total_size_bytes"] = stats.total_size_bytes;
  if (stats.time_extent) {
    doc["time_extent"] = {{"min", format_rfc3339(stats.time_extent->min)},
                          {"max", format_rfc3339(stats.time_extent->max)}};
  } else {
    doc["time_extent"] = nullptr;
  }
  J per_category = J::object();
  for (auto c : kAllCategories) per_category[std::string(category_name(c))] = stats.count(c);
  doc["per_category"] = std::move(per_category);
  doc["per_service"] = stats.per_service;
  J per_file = J::array();
  for (const auto& [key, n] : stats.per_file) {
    per_file.push_back({{"dataset_id", key.dataset_id}, {"path", key.path}, {"elements", n}});
  }
  doc["per_file"] = std::move(per_file);
  return doc.dump(2) + "\n";
}

}  // namespace exportscope
