#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <chrono>
#include <filesystem>

#include "exportscope/error.hpp"
#include "exportscope/fixture.hpp"
#include "exportscope/parse.hpp"
#include "exportscope/query.hpp"
#include "exportscope/render.hpp"
#include "exportscope/sensitivity.hpp"
#include "exportscope/text.hpp"
#include "exportscope/timestamp.hpp"
#include "exportscope/treemap.hpp"
#include "exportscope/unified_io.hpp"
#include "exportscope/zip.hpp"

namespace py = pybind11;
using namespace exportscope;

namespace {

py::object json_loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

Timestamp parse_time_arg(const std::string& text, bool end_of_day, const char* field) {
  auto t = parse_timestamp_text(text);
  if (!t) throw ValidationError(field, "cannot parse time '" + text + "'");
  if (end_of_day && text.size() == 10) *t += std::chrono::seconds(86399);
  return *t;
}

std::optional<std::string> iso(const std::optional<Timestamp>& t) {
  if (!t) return std::nullopt;
  return format_rfc3339(*t);
}

Selection make_selection(std::vector<std::string> datasets, const std::vector<std::string>& categories,
                         const std::optional<std::string>& start, const std::optional<std::string>& end,
                         std::optional<std::string> query) {
  Selection s;
  s.dataset_ids = std::move(datasets);
  for (const auto& name : categories) {
    const auto c = parse_category(name);
    if (!c) throw ValidationError("categories", "unknown category '" + name + "'");
    s.categories.push_back(*c);
  }
  if (start || end) {
    s.time_range = TimeExtent{start ? parse_time_arg(*start, false, "start") : min_timestamp(),
                              end ? parse_time_arg(*end, true, "end") : max_timestamp()};
  }
  s.query = std::move(query);
  s.validate();
  return s;
}

py::dict element_dict(const MergedView& view, const ElementRef& ref) {
  const auto& e = *ref.element;
  py::dict d;
  d["id"] = e.id;
  d["time"] = iso(e.time);
  d["text"] = e.text;
  d["category"] = std::string(category_name(e.category));
  d["subcategory"] = e.subcategory;
  d["source_file"] = e.source_file;
  d["dataset_id"] = view.datasets()[ref.dataset_index]->dataset_id;
  return d;
}

py::dict report_dict(const IngestResult& r) {
  py::dict d;
  d["service"] = r.service;
  d["files_parsed"] = r.parsed.report.files_parsed;
  d["files_skipped"] = r.parsed.report.files_skipped;
  d["elements_emitted"] = r.parsed.report.elements_emitted;
  py::list warnings;
  for (const auto& w : r.parsed.report.warnings) warnings.append(py::make_tuple(w.path, w.message));
  d["warnings"] = warnings;
  return d;
}

IngestOptions ingest_options(const std::optional<std::string>& service,
                             const std::optional<std::string>& ingested_at, unsigned threads) {
  IngestOptions opts;
  opts.forced_service = service;
  if (ingested_at) opts.parse.ingested_at = parse_time_arg(*ingested_at, false, "ingested_at");
  opts.parse.threads = threads;
  return opts;
}

Registry make_registry(const std::optional<std::string>& rules, const std::optional<std::string>& signatures) {
  Registry reg;
  if (signatures) reg.load_signatures(*signatures);
  if (rules) reg.load_rules(*rules);
  return reg;
}

// Python-side handle on a merged set of datasets.
struct View {
  explicit View(const std::vector<std::shared_ptr<Dataset>>& datasets)
      : view(MergedView::merge({datasets.begin(), datasets.end()})) {}
  MergedView view;
};

FixtureVolume volume_from(const py::dict& v) {
  FixtureVolume out;
  const std::pair<const char*, std::uint32_t FixtureVolume::*> fields[] = {
      {"conversations", &FixtureVolume::conversations},
      {"messages_per_conversation", &FixtureVolume::messages_per_conversation},
      {"posts", &FixtureVolume::posts},
      {"logins", &FixtureVolume::logins},
      {"locations", &FixtureVolume::locations},
      {"searches", &FixtureVolume::searches},
      {"media_files", &FixtureVolume::media_files},
      {"contacts", &FixtureVolume::contacts},
      {"activities", &FixtureVolume::activities},
      {"account_records", &FixtureVolume::account_records},
  };
  std::size_t used = 0;
  for (const auto& [name, member] : fields) {
    if (v.contains(name)) {
      out.*member = v[name].cast<std::uint32_t>();
      ++used;
    }
  }
  if (used != v.size()) throw ValidationError("volume", "unknown volume field");
  return out;
}

py::tuple fixture_tuple(const Fixture& fx) {
  return py::make_tuple(py::bytes(fx.archive), json_loads(fx.manifest.to_document()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Unification, query and layout engine for personal data exports";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ArchiveFormatError>(m, "ArchiveFormatError", base);
  py::register_exception<SecurityError>(m, "SecurityError", base);
  py::register_exception<UnknownServiceError>(m, "UnknownServiceError", base);
  py::register_exception<UnsupportedServiceError>(m, "UnsupportedServiceError", base);
  py::register_exception<WrapperFormatError>(m, "WrapperFormatError", base);
  py::register_exception<FormatVersionError>(m, "FormatVersionError", base);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<ConflictError>(m, "ConflictError", base);
  py::register_exception<DegenerateLayoutError>(m, "DegenerateLayoutError", base);
  py::register_exception<UnknownElementError>(m, "UnknownElementError", base);
  py::register_exception<RuleError>(m, "RuleError", base);

  py::list categories;
  for (auto c : kAllCategories) categories.append(std::string(category_name(c)));
  m.attr("CATEGORIES") = categories;

  m.def("element_id", &element_id, py::arg("service"), py::arg("source_path"), py::arg("index"), py::arg("text"));
  m.def("repair_mojibake", [](const std::string& s) { return repair_mojibake(s); });
  m.def("unwrap_js_export", [](const std::string& s) { return unwrap_js_export(s); });
  m.def("category_color", [](const std::string& name) {
    const auto c = parse_category(name);
    if (!c) throw ValidationError("category", "unknown category '" + name + "'");
    return std::string(category_color(*c));
  });

  py::class_<Selection>(m, "Selection")
      .def(py::init(&make_selection), py::kw_only(), py::arg("datasets") = std::vector<std::string>{},
           py::arg("categories") = std::vector<std::string>{}, py::arg("start") = py::none(),
           py::arg("end") = py::none(), py::arg("query") = py::none())
      .def_readonly("datasets", &Selection::dataset_ids)
      .def_readonly("query", &Selection::query);

  py::class_<Dataset, std::shared_ptr<Dataset>>(m, "Dataset")
      .def_readonly("dataset_id", &Dataset::dataset_id)
      .def_readonly("service", &Dataset::service)
      .def_property_readonly("ingested_at", [](const Dataset& d) { return format_rfc3339(d.ingested_at); })
      .def_property_readonly("file_count", [](const Dataset& d) { return d.files.size(); })
      .def_property_readonly("element_count", [](const Dataset& d) { return d.elements.size(); })
      .def_property_readonly("time_extent",
                             [](const Dataset& d) -> std::optional<std::pair<std::string, std::string>> {
                               const auto t = d.time_extent();
                               if (!t) return std::nullopt;
                               return std::make_pair(format_rfc3339(t->min), format_rfc3339(t->max));
                             })
      .def("to_json", [](const Dataset& d) { return write_unified(d); })
      .def_static("from_json", [](const std::string& doc) { return std::make_shared<Dataset>(read_unified(doc)); })
      .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; })
      .def("__repr__", [](const Dataset& d) {
        return "<Dataset " + d.dataset_id + " service=" + d.service + " elements=" +
               std::to_string(d.elements.size()) + ">";
      });

  m.def(
      "detect_service",
      [](py::bytes archive, const std::optional<std::string>& signatures) {
        std::string bytes = archive;
        py::gil_scoped_release release;
        return detect_service(list_archive(std::move(bytes)), make_registry(std::nullopt, signatures).signatures);
      },
      py::arg("archive"), py::arg("signatures") = py::none());

  m.def(
      "ingest",
      [](py::bytes archive, const std::string& name, const std::optional<std::string>& service,
         const std::optional<std::string>& ingested_at, unsigned threads, const std::optional<std::string>& rules,
         const std::optional<std::string>& signatures) {
        std::string bytes = archive;
        IngestResult r;
        {
          py::gil_scoped_release release;
          const auto zip = ZipArchive::from_bytes(std::move(bytes));
          r = ingest_archive(zip, name, make_registry(rules, signatures), ingest_options(service, ingested_at, threads));
        }
        auto report = report_dict(r);
        return py::make_tuple(std::make_shared<Dataset>(std::move(r.parsed.dataset)), report);
      },
      py::arg("archive"), py::arg("name") = "archive.zip", py::kw_only(), py::arg("service") = py::none(),
      py::arg("ingested_at") = py::none(), py::arg("threads") = 0u, py::arg("rules") = py::none(),
      py::arg("signatures") = py::none());

  m.def(
      "ingest_file",
      [](const std::string& path, const std::optional<std::string>& service,
         const std::optional<std::string>& ingested_at, unsigned threads, const std::optional<std::string>& rules,
         const std::optional<std::string>& signatures) {
        IngestResult r;
        {
          py::gil_scoped_release release;
          const auto zip = ZipArchive::open_file(path);
          r = ingest_archive(zip, std::filesystem::path(path).filename().string(), make_registry(rules, signatures),
                             ingest_options(service, ingested_at, threads));
        }
        auto report = report_dict(r);
        return py::make_tuple(std::make_shared<Dataset>(std::move(r.parsed.dataset)), report);
      },
      py::arg("path"), py::kw_only(), py::arg("service") = py::none(), py::arg("ingested_at") = py::none(),
      py::arg("threads") = 0u, py::arg("rules") = py::none(), py::arg("signatures") = py::none());

  py::class_<View>(m, "View")
      .def(py::init<const std::vector<std::shared_ptr<Dataset>>&>(), py::arg("datasets"))
      .def_property_readonly("dataset_ids",
                             [](const View& v) {
                               std::vector<std::string> ids;
                               for (const auto& d : v.view.datasets()) ids.push_back(d->dataset_id);
                               return ids;
                             })
      .def("__len__", [](const View& v) { return v.view.elements().size(); })
      .def(
          "elements",
          [](const View& v, const Selection& sel, std::size_t limit) {
            py::list out;
            for (const auto& ref : apply_selection(v.view, sel)) {
              if (limit != 0 && out.size() >= limit) break;
              out.append(element_dict(v.view, ref));
            }
            return out;
          },
          py::arg("selection") = Selection{}, py::arg("limit") = 0)
      .def(
          "stats", [](const View& v, const Selection& sel) { return json_loads(stats_json(compute_stats(v.view, sel))); },
          py::arg("selection") = Selection{})
      .def(
          "timeline_points",
          [](const View& v, const Selection& sel, std::int64_t offset_seconds) {
            py::list out;
            for (const auto& p : timeline_project(apply_selection(v.view, sel), offset_seconds)) {
              out.append(py::make_tuple(v.view.datasets()[p.ref.dataset_index]->dataset_id, p.ref.element->id, p.x,
                                        p.y));
            }
            return out;
          },
          py::arg("selection") = Selection{}, py::arg("offset_seconds") = 0)
      .def(
          "timeline_svg",
          [](const View& v, const Selection& sel, bool split, std::int64_t offset_seconds, double width,
             double panel_height) {
            TimelineOptions o;
            o.split_by_dataset = split;
            o.offset_seconds = offset_seconds;
            o.width = width;
            o.panel_height = panel_height;
            return timeline_svg(v.view, sel, o);
          },
          py::arg("selection") = Selection{}, py::kw_only(), py::arg("split_by_dataset") = false,
          py::arg("offset_seconds") = 0, py::arg("width") = 1200.0, py::arg("panel_height") = 320.0)
      .def(
          "treemap",
          [](const View& v, const Selection& sel, const std::string& scale, double width, double height,
             const std::string& format) -> py::object {
            if (scale != "size" && scale != "count") throw ValidationError("scale", "size or count");
            if (format != "geometry" && format != "svg") throw ValidationError("format", "geometry or svg");
            const auto attr = scale == "size" ? ScaleAttribute::kSize : ScaleAttribute::kCount;
            const auto files = select_files(v.view, sel);
            const auto rects = squarify(make_nodes(files, attr), width, height);
            if (format == "svg") return py::str(treemap_svg(rects, v.view, width, height));
            return json_loads(treemap_geometry(rects, v.view, width, height, attr));
          },
          py::arg("selection") = Selection{}, py::kw_only(), py::arg("scale") = "size", py::arg("width") = 1200.0,
          py::arg("height") = 800.0, py::arg("format") = "geometry");

  py::class_<SensitivityStore>(m, "SensitivityStore")
      .def(py::init<>())
      .def(
          "rate",
          [](SensitivityStore& s, const View& v, const std::string& id, double value,
             const std::optional<std::string>& rated_at) {
            const Timestamp t = rated_at ? parse_time_arg(*rated_at, false, "rated_at")
                                         : std::chrono::time_point_cast<std::chrono::seconds>(
                                               std::chrono::system_clock::now());
            s.rate(v.view, id, value, t);
          },
          py::arg("view"), py::arg("element_id"), py::arg("value"), py::arg("rated_at") = py::none())
      .def("value", [](const SensitivityStore& s, const std::string& id) { return s.value(id); })
      .def("__len__", &SensitivityStore::size)
      .def(
          "average",
          [](const SensitivityStore& s, const View* v, const Selection& sel) {
            return v ? average(s, v->view, sel) : s.average();
          },
          py::arg("view") = py::none(), py::arg("selection") = Selection{})
      .def("to_json", &SensitivityStore::to_document)
      .def_static("from_json", [](const std::string& doc) { return SensitivityStore::from_document(doc); })
      .def("save", [](const SensitivityStore& s, const std::string& path) { s.save(path); })
      .def_static("load", [](const std::string& path) { return SensitivityStore::load(path); });

  m.def("fixture_services", &fixture_services);
  m.def(
      "generate_fixture",
      [](const std::string& service, std::uint64_t seed, const std::string& start, const std::string& end,
         const py::dict& volume, const std::string& owner, double non_ascii_fraction) {
        FixtureSpec spec;
        spec.service = service;
        spec.seed = seed;
        spec.time_span = {parse_time_arg(start, false, "start"), parse_time_arg(end, true, "end")};
        spec.volume = volume_from(volume);
        spec.owner = owner;
        spec.non_ascii_fraction = non_ascii_fraction;
        Fixture fx;
        {
          py::gil_scoped_release release;
          fx = generate(spec);
        }
        return fixture_tuple(fx);
      },
      py::arg("service"), py::arg("seed") = 1, py::kw_only(), py::arg("start") = "2015-01-01",
      py::arg("end") = "2019-12-31", py::arg("volume") = py::dict(), py::arg("owner") = "Sam",
      py::arg("non_ascii_fraction") = 0.25);
  m.def(
      "fixture_preset",
      [](const std::string& name) {
        std::vector<NamedSpec> specs;
        if (name == "use-case-1") {
          specs.push_back({"bob-facebook", use_case_1_preset()});
        } else if (name == "use-case-2") {
          specs = use_case_2_presets();
        } else {
          throw ValidationError("preset", "unknown preset '" + name + "'");
        }
        py::list out;
        for (const auto& s : specs) {
          const auto fx = generate(s.spec);
          const auto t = fixture_tuple(fx);
          out.append(py::make_tuple(s.name, t[0], t[1]));
        }
        return out;
      },
      py::arg("name"));
}
