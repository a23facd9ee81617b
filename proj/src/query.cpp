#include "exportscope/query.hpp"

#include <algorithm>

#include "exportscope/error.hpp"
#include "exportscope/text.hpp"

namespace exportscope {

void Selection::validate() const {
  if (time_range && time_range->min > time_range->max) {
    throw ValidationError("time_range", "start is after end");
  }
}

MergedView MergedView::merge(std::vector<std::shared_ptr<const Dataset>> datasets) {
  MergedView view;
  std::unordered_set<std::string> seen;
  std::size_t total = 0;
  for (const auto& d : datasets) {
    if (!seen.insert(d->dataset_id).second) {
      throw ConflictError("dataset " + d->dataset_id + " is loaded twice");
    }
    total += d->elements.size();
  }
  view.datasets_ = std::move(datasets);
  view.elements_.reserve(total);
  for (std::size_t di = 0; di < view.datasets_.size(); ++di) {
    const Dataset& d = *view.datasets_[di];
    for (const auto& e : d.elements) view.elements_.push_back({&e, di});
    for (const auto& f : d.files) view.files_.push_back({&f, di});
  }
  std::stable_sort(view.elements_.begin(), view.elements_.end(),
                   [](const ElementRef& a, const ElementRef& b) {
                     if (element_order(*a.element, *b.element)) return true;
                     if (element_order(*b.element, *a.element)) return false;
                     return a.dataset_index < b.dataset_index;
                   });
  view.folded_text_.reserve(total);
  view.folded_sub_.reserve(total);
  view.ids_.reserve(total);
  for (const auto& ref : view.elements_) {
    view.folded_text_.push_back(casefold_utf8(ref.element->text));
    view.folded_sub_.push_back(casefold_utf8(ref.element->subcategory));
    view.ids_.insert(ref.element->id);
  }
  return view;
}

std::optional<std::size_t> MergedView::dataset_index(std::string_view dataset_id) const {
  for (std::size_t i = 0; i < datasets_.size(); ++i) {
    if (datasets_[i]->dataset_id == dataset_id) return i;
  }
  return std::nullopt;
}

std::vector<ElementRef> apply_selection(const MergedView& view, const Selection& selection) {
  selection.validate();
  std::vector<bool> dataset_ok(view.datasets().size(), selection.dataset_ids.empty());
  for (const auto& id : selection.dataset_ids) {
    if (const auto idx = view.dataset_index(id)) dataset_ok[*idx] = true;
  }
  std::array<bool, kCategoryCount> category_ok{};
  category_ok.fill(selection.categories.empty());
  for (Category c : selection.categories) category_ok[static_cast<std::size_t>(c)] = true;

  const std::string needle = selection.query ? casefold_utf8(*selection.query) : std::string();

  std::vector<ElementRef> out;
  const auto& elements = view.elements();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const ElementRef& ref = elements[i];
    const DataElement& e = *ref.element;
    if (!dataset_ok[ref.dataset_index]) continue;
    if (!category_ok[static_cast<std::size_t>(e.category)]) continue;
    if (selection.time_range) {
      if (!e.time || *e.time < selection.time_range->min || *e.time > selection.time_range->max) {
        continue;
      }
    }
    if (!needle.empty() && view.folded_text(i).find(needle) == std::string::npos &&
        view.folded_subcategory(i).find(needle) == std::string::npos) {
      continue;
    }
    out.push_back(ref);
  }
  return out;
}

std::vector<TimePoint> timeline_project(std::span<const ElementRef> elements,
                                        std::int64_t offset_seconds) {
  std::vector<TimePoint> points;
  points.reserve(elements.size());
  for (const auto& ref : elements) {
    if (!ref.element->time) continue;
    const Timestamp shifted = *ref.element->time + std::chrono::seconds{offset_seconds};
    points.push_back({ref, days_since_epoch(shifted), seconds_of_day(shifted)});
  }
  return points;
}

std::vector<DatasetTimeline> partition_by_dataset(const MergedView& view,
                                                  std::span<const TimePoint> points) {
  std::vector<DatasetTimeline> out(view.datasets().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].dataset_index = i;
    out[i].dataset_id = view.datasets()[i]->dataset_id;
  }
  for (const auto& p : points) out[p.ref.dataset_index].points.push_back(p);
  return out;
}

std::vector<DatasetTimeline> partition_by_dataset(const MergedView& view,
                                                  const Selection& selection,
                                                  std::int64_t offset_seconds) {
  const auto selected = apply_selection(view, selection);
  const auto points = timeline_project(selected, offset_seconds);
  return partition_by_dataset(view, points);
}

std::vector<FileRef> select_files(const MergedView& view, const Selection& selection) {
  std::vector<FileRef> out;
  for (const auto& ref : view.files()) {
    const Dataset& d = *view.datasets()[ref.dataset_index];
    if (!selection.dataset_ids.empty() &&
        std::find(selection.dataset_ids.begin(), selection.dataset_ids.end(), d.dataset_id) ==
            selection.dataset_ids.end()) {
      continue;
    }
    if (!selection.categories.empty()) {
      if (!ref.file->data_category ||
          std::find(selection.categories.begin(), selection.categories.end(),
                    *ref.file->data_category) == selection.categories.end()) {
        continue;
      }
    }
    out.push_back(ref);
  }
  return out;
}

Stats compute_stats(const MergedView& view, const Selection& selection) {
  Stats stats;
  for (const auto& ref : apply_selection(view, selection)) {
    const DataElement& e = *ref.element;
    const Dataset& d = *view.datasets()[ref.dataset_index];
    ++stats.per_category[static_cast<std::size_t>(e.category)];
    ++stats.per_service[d.service];
    ++stats.per_file[{d.dataset_id, e.source_file}];
    ++stats.total_elements;
    if (e.time) {
      if (!stats.time_extent) {
        stats.time_extent = TimeExtent{*e.time, *e.time};
      } else {
        stats.time_extent->min = std::min(stats.time_extent->min, *e.time);
        stats.time_extent->max = std::max(stats.time_extent->max, *e.time);
      }
    }
  }
  for (const auto& ref : select_files(view, selection)) stats.total_size_bytes += ref.file->size_bytes;
  return stats;
}

Stats operator+(const Stats& a, const Stats& b) {
  Stats out = a;
  for (std::size_t i = 0; i < kCategoryCount; ++i) out.per_category[i] += b.per_category[i];
  for (const auto& [k, v] : b.per_service) out.per_service[k] += v;
  for (const auto& [k, v] : b.per_file) out.per_file[k] += v;
  out.total_elements += b.total_elements;
  out.total_size_bytes += b.total_size_bytes;
  if (b.time_extent) {
    if (!out.time_extent) {
      out.time_extent = b.time_extent;
    } else {
      out.time_extent->min = std::min(out.time_extent->min, b.time_extent->min);
      out.time_extent->max = std::max(out.time_extent->max, b.time_extent->max);
    }
  }
  return out;
}

}  // namespace exportscope
