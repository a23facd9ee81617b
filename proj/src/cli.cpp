#include "exportscope/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <ostream>
#include <set>
#include <thread>

#include "exportscope/error.hpp"
#include "exportscope/fixture.hpp"
#include "exportscope/parse.hpp"
#include "exportscope/render.hpp"
#include "exportscope/sensitivity.hpp"
#include "exportscope/text.hpp"
#include "exportscope/timestamp.hpp"
#include "exportscope/treemap.hpp"
#include "exportscope/unified_io.hpp"
#include "exportscope/zip.hpp"

namespace exportscope {

namespace {

namespace fs = std::filesystem;

Timestamp now() {
  return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::string env_or(const std::string& value, const char* name) {
  if (!value.empty()) return value;
  const char* v = std::getenv(name);
  return v != nullptr ? std::string(v) : std::string();
}

// "2011-05-01" or a full ISO-8601 instant. A bare date used as an upper bound
// covers the whole day.
Timestamp parse_bound(const std::string& text, bool upper, const std::string& field) {
  const auto t = parse_timestamp_text(text, TimeFormat::kIso8601);
  if (!t) throw ValidationError(field, "cannot read time '" + text + "'");
  const bool date_only = text.size() == 10;
  return upper && date_only ? *t + std::chrono::seconds{kSecondsPerDay - 1} : *t;
}

std::int64_t parse_offset(const std::string& text) {
  if (text.empty() || text == "Z" || text == "UTC" || text == "0") return 0;
  int h = 0, m = 0;
  char sign = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%c%2d:%2d%c", &sign, &h, &m, &tail) != 3 &&
      std::sscanf(text.c_str(), "%c%2d%2d%c", &sign, &h, &m, &tail) != 3) {
    m = 0;
    if (std::sscanf(text.c_str(), "%c%2d%c", &sign, &h, &tail) != 2) {
      throw ValidationError("tz-offset", "expected +HH:MM");
    }
  }
  if ((sign != '+' && sign != '-') || h > 18 || m > 59) {
    throw ValidationError("tz-offset", "expected +HH:MM");
  }
  const std::int64_t s = h * 3600 + m * 60;
  return sign == '-' ? -s : s;
}

Category category_arg(const std::string& name) {
  const std::string want = casefold_utf8(name);
  for (auto c : kAllCategories) {
    if (casefold_utf8(category_name(c)) == want || casefold_utf8(category_label(c)) == want) return c;
  }
  throw ValidationError("category", "unknown category '" + name + "'");
}

struct SelectionArgs {
  std::vector<std::string> datasets;
  std::vector<std::string> categories;
  std::string from;
  std::string to;
  std::string query;

  void add_to(CLI::App* app) {
    app->add_option("--dataset", datasets, "Restrict to these dataset ids");
    app->add_option("--category", categories, "Restrict to these categories");
    app->add_option("--from", from, "Earliest element time (ISO-8601)");
    app->add_option("--to", to, "Latest element time (ISO-8601, inclusive)");
    app->add_option("--query", query, "Case-insensitive text search");
  }

  Selection build() const {
    Selection s;
    s.dataset_ids = datasets;
    for (const auto& c : categories) s.categories.push_back(category_arg(c));
    if (!from.empty() || !to.empty()) {
      s.time_range = TimeExtent{from.empty() ? min_timestamp() : parse_bound(from, false, "from"),
                                to.empty() ? max_timestamp() : parse_bound(to, true, "to")};
    }
    if (!query.empty()) s.query = query;
    s.validate();
    return s;
  }
};

// Dataset arguments are unified documents or directories of them.
MergedView load_view(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  if (files.empty()) throw ValidationError("datasets", "no dataset files given");
  std::vector<std::shared_ptr<const Dataset>> datasets;
  for (const auto& f : files) datasets.push_back(std::make_shared<const Dataset>(read_unified_file(f)));
  return MergedView::merge(std::move(datasets));
}

void emit(const std::string& output, const std::string& content, std::ostream& out) {
  if (output.empty() || output == "-") {
    out << content;
  } else {
    write_file_atomic(output, content);
  }
}

Registry make_registry(const std::string& signatures, const std::string& rules) {
  Registry reg;
  const std::string sig = env_or(signatures, "EXPORTSCOPE_SIGNATURES");
  const std::string rul = env_or(rules, "EXPORTSCOPE_RULES");
  if (!sig.empty()) reg.load_signatures(sig);
  if (!rul.empty()) reg.load_rules(rul);
  return reg;
}

struct IngestArgs {
  std::vector<std::string> archives;
  std::string output_dir;
  std::string service;
  unsigned threads = 0;
  std::uint64_t max_entry_bytes = kDefaultMaxEntryBytes;
  std::string ingested_at;
  bool quiet = false;
};

int cmd_ingest(const IngestArgs& a, const Registry& reg, std::ostream& out, std::ostream& err) {
  struct Job {
    std::string archive;
    std::optional<IngestResult> result;
    std::string error;
    bool internal = false;
  };
  std::vector<Job> jobs;
  for (const auto& a_path : a.archives) jobs.push_back({a_path, std::nullopt, {}, false});

  IngestOptions opts;
  if (!a.service.empty()) opts.forced_service = a.service;
  opts.parse.max_entry_bytes = a.max_entry_bytes;
  if (!a.ingested_at.empty()) opts.parse.ingested_at = parse_bound(a.ingested_at, false, "ingested-at");
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(jobs.size()));
  opts.parse.threads = a.threads != 0 ? a.threads : std::max(1u, hw / std::max(1u, workers));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      Job& job = jobs[i];
      try {
        const auto archive = ZipArchive::open_file(job.archive);
        job.result = ingest_archive(archive, fs::path(job.archive).filename().string(), reg, opts);
      } catch (const UnknownServiceError& e) {
        job.error = std::string(e.what()) + " (use --service to choose one)";
      } catch (const Error& e) {
        job.error = e.what();
      } catch (const std::exception& e) {
        job.error = e.what();
        job.internal = true;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < workers; ++i) pool.emplace_back(work);
    work();
  }

  fs::create_directories(a.output_dir);
  int status = kExitOk;
  std::set<std::string> written;
  for (auto& job : jobs) {
    if (!job.result) {
      err << job.archive << ": error: " << job.error << "\n";
      status = std::max(status, job.internal ? kExitInternalError : kExitInputError);
      continue;
    }
    const auto& parsed = job.result->parsed;
    const auto& ds = parsed.dataset;
    if (!written.insert(ds.dataset_id).second) {
      err << job.archive << ": error: dataset " << ds.dataset_id
          << " was already produced by another archive in this run\n";
      status = std::max(status, kExitInputError);
      continue;
    }
    const fs::path dest = fs::path(a.output_dir) / (ds.dataset_id + ".json");
    write_unified_file(ds, dest);
    if (!a.quiet) {
      for (const auto& w : parsed.report.warnings) {
        err << job.archive << ": warning: " << w.path << ": " << w.message << "\n";
      }
    }
    out << job.archive << ": service=" << job.result->service << " dataset=" << ds.dataset_id
        << " files=" << ds.files.size() << " parsed=" << parsed.report.files_parsed
        << " skipped=" << parsed.report.files_skipped << " elements=" << ds.elements.size()
        << " warnings=" << parsed.report.warnings.size() << " -> " << dest.string() << "\n";
  }
  return status;
}

struct FixtureArgs {
  std::string preset;
  std::string service;
  std::uint64_t seed = 1;
  std::string owner = "Sam";
  std::string from = "2010-01-01";
  std::string to = "2019-12-31";
  FixtureVolume volume{.conversations = 5,
                       .messages_per_conversation = 20,
                       .posts = 30,
                       .logins = 20,
                       .locations = 30,
                       .searches = 20,
                       .media_files = 10,
                       .contacts = 25,
                       .activities = 30,
                       .account_records = 5};
  std::string output_dir;
};

int cmd_fixture(const FixtureArgs& a, std::ostream& out) {
  std::vector<NamedSpec> specs;
  if (a.preset == "use-case-1") {
    specs.push_back({"use-case-1-bob-facebook", use_case_1_preset()});
  } else if (a.preset == "use-case-2") {
    for (auto& s : use_case_2_presets()) specs.push_back({"use-case-2-" + s.name, s.spec});
  } else if (!a.preset.empty()) {
    throw ValidationError("preset", "unknown preset '" + a.preset + "'");
  } else {
    if (a.service.empty()) throw ValidationError("service", "--service or --preset is required");
    FixtureSpec s;
    s.service = a.service;
    s.seed = a.seed;
    s.owner = a.owner;
    s.volume = a.volume;
    s.time_span = {parse_bound(a.from, false, "from"), parse_bound(a.to, true, "to")};
    specs.push_back({a.service + "-" + std::to_string(a.seed), s});
  }
  fs::create_directories(a.output_dir);
  for (const auto& [name, spec] : specs) {
    const Fixture fx = generate(spec);
    const fs::path zip = fs::path(a.output_dir) / (name + ".zip");
    const fs::path manifest = fs::path(a.output_dir) / (name + ".manifest.json");
    write_file_atomic(zip, fx.archive);
    write_file_atomic(manifest, fx.manifest.to_document() + "\n");
    out << zip.string() << ": " << fx.manifest.files.size() << " files, "
        << fx.manifest.total_elements() << " elements\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explore personal data exports from online services", "exportscope"};
  app.require_subcommand(1);
  std::string signatures, rules, ratings;
  app.add_option("--signatures", signatures, "Extra service signatures (JSON)");
  app.add_option("--rules", rules, "Rule file or directory of rule files");
  app.add_option("--ratings", ratings, "Sensitivity ratings file");

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse export archives into unified datasets");
  ingest_cmd->add_option("archives", ingest.archives, "Export archives (.zip)")->required();
  ingest_cmd->add_option("-o,--output", ingest.output_dir, "Output directory")->required();
  ingest_cmd->add_option("--service", ingest.service, "Skip detection and use this service");
  ingest_cmd->add_option("--threads", ingest.threads, "Parser threads per archive");
  ingest_cmd->add_option("--max-entry-bytes", ingest.max_entry_bytes, "Skip larger entries");
  ingest_cmd->add_option("--ingested-at", ingest.ingested_at, "Override the ingestion time");
  ingest_cmd->add_flag("-q,--quiet", ingest.quiet, "Do not print per-file warnings");

  std::vector<std::string> inputs;
  SelectionArgs sel;
  std::string format, output;

  auto* stats_cmd = app.add_subcommand("stats", "Element counts per category");
  stats_cmd->add_option("datasets", inputs, "Unified dataset files or directories")->required();
  sel.add_to(stats_cmd);
  stats_cmd->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));

  auto* elements_cmd = app.add_subcommand("elements", "List selected data elements");
  elements_cmd->add_option("datasets", inputs)->required();
  sel.add_to(elements_cmd);
  std::size_t limit = 0;
  elements_cmd->add_option("--limit", limit, "Print at most this many (0: all)");
  elements_cmd->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));

  std::string scale = "size";
  double width = 1200, height = 800;
  auto* treemap_cmd = app.add_subcommand("treemap", "Treemap of the files in the datasets");
  treemap_cmd->add_option("datasets", inputs)->required();
  sel.add_to(treemap_cmd);
  treemap_cmd->add_option("--scale", scale, "size or count")->check(CLI::IsMember({"size", "count"}));
  treemap_cmd->add_option("--format", format, "svg or geometry")->check(CLI::IsMember({"svg", "geometry"}));
  treemap_cmd->add_option("--width", width);
  treemap_cmd->add_option("--height", height);
  treemap_cmd->add_option("-o,--output", output, "Output file (default: stdout)");

  TimelineOptions tl;
  std::string tz;
  auto* timeline_cmd = app.add_subcommand("timeline", "Date/time-of-day plot of the elements");
  timeline_cmd->add_option("datasets", inputs)->required();
  sel.add_to(timeline_cmd);
  timeline_cmd->add_flag("--split-by-dataset", tl.split_by_dataset, "One panel per dataset");
  timeline_cmd->add_option("--tz-offset", tz, "Display offset from UTC, e.g. +01:00");
  timeline_cmd->add_option("--width", tl.width);
  timeline_cmd->add_option("--panel-height", tl.panel_height);
  timeline_cmd->add_option("-o,--output", output, "Output file (default: stdout)");

  FixtureArgs fx;
  auto* fixture_cmd = app.add_subcommand("fixture", "Generate a synthetic export archive");
  fixture_cmd->add_option("--preset", fx.preset, "use-case-1 or use-case-2");
  fixture_cmd->add_option("--service", fx.service, "facebook, google, instagram or twitter");
  fixture_cmd->add_option("--seed", fx.seed);
  fixture_cmd->add_option("--owner", fx.owner);
  fixture_cmd->add_option("--from", fx.from, "Start of the time span");
  fixture_cmd->add_option("--to", fx.to, "End of the time span");
  fixture_cmd->add_option("--conversations", fx.volume.conversations);
  fixture_cmd->add_option("--messages-per-conversation", fx.volume.messages_per_conversation);
  fixture_cmd->add_option("--posts", fx.volume.posts);
  fixture_cmd->add_option("--logins", fx.volume.logins);
  fixture_cmd->add_option("--locations", fx.volume.locations);
  fixture_cmd->add_option("--searches", fx.volume.searches);
  fixture_cmd->add_option("--media-files", fx.volume.media_files);
  fixture_cmd->add_option("--contacts", fx.volume.contacts);
  fixture_cmd->add_option("--activities", fx.volume.activities);
  fixture_cmd->add_option("--account-records", fx.volume.account_records);
  fixture_cmd->add_option("-o,--output", fx.output_dir, "Output directory")->required();

  std::string element;
  double value = 0;
  auto* rate_cmd = app.add_subcommand("rate", "Record a sensitivity rating in [0, 1]");
  rate_cmd->add_option("datasets", inputs)->required();
  rate_cmd->add_option("--element", element, "Element id")->required();
  rate_cmd->add_option("--value", value, "0 = not sensitive, 1 = very sensitive")->required();

  auto* average_cmd = app.add_subcommand("average", "Mean sensitivity of the rated selected elements");
  average_cmd->add_option("datasets", inputs)->required();
  sel.add_to(average_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  const std::string ratings_path = env_or(ratings, "EXPORTSCOPE_RATINGS").empty()
                                       ? std::string("exportscope-ratings.json")
                                       : env_or(ratings, "EXPORTSCOPE_RATINGS");
  try {
    if (*ingest_cmd) return cmd_ingest(ingest, make_registry(signatures, rules), out, err);
    if (*fixture_cmd) return cmd_fixture(fx, out);

    const MergedView view = load_view(inputs);
    if (*stats_cmd) {
      const Stats s = compute_stats(view, sel.build());
      out << (format == "json" ? stats_json(s) : stats_table(s));
    } else if (*elements_cmd) {
      const auto selected = apply_selection(view, sel.build());
      const std::size_t n = limit == 0 ? selected.size() : std::min(limit, selected.size());
      if (format == "json") {
        nlohmann::ordered_json list = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < n; ++i) {
          const auto& e = *selected[i].element;
          list.push_back({{"dataset_id", e.dataset_id},
                          {"id", e.id},
                          {"time", e.time ? nlohmann::ordered_json(format_rfc3339(*e.time)) : nlohmann::ordered_json(nullptr)},
                          {"category", category_name(e.category)},
                          {"subcategory", e.subcategory},
                          {"text", e.text},
                          {"source_file", e.source_file}});
        }
        out << list.dump(2) << "\n";
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          const auto& e = *selected[i].element;
          out << e.id << "  " << (e.time ? format_rfc3339(*e.time) : std::string(20, '-')) << "  "
              << category_name(e.category) << "  [" << e.subcategory << "]  " << e.text << "\n";
        }
      }
    } else if (*treemap_cmd) {
      const ScaleAttribute attr = scale == "count" ? ScaleAttribute::kCount : ScaleAttribute::kSize;
      const Selection s = sel.build();
      const auto files = select_files(view, s);
      const auto nodes = make_nodes(files, attr);
      const auto rects = squarify(nodes, width, height);
      emit(output,
           format == "geometry" ? treemap_geometry(rects, view, width, height, attr)
                                : treemap_svg(rects, view, width, height),
           out);
    } else if (*timeline_cmd) {
      tl.offset_seconds = parse_offset(tz);
      Selection s = sel.build();
      tl.range = s.time_range;
      emit(output, timeline_svg(view, s, tl), out);
    } else if (*rate_cmd) {
      SensitivityStore store = SensitivityStore::load(ratings_path);
      store.rate(view, element, value, now());
      store.save(ratings_path);
      out << "rated " << element << " = " << value << " (" << store.size() << " ratings in "
          << ratings_path << ")\n";
    } else if (*average_cmd) {
      const SensitivityStore store = SensitivityStore::load(ratings_path);
      const Selection s = sel.build();
      const auto selected = apply_selection(view, s);
      std::size_t rated = 0;
      for (const auto& ref : selected) rated += store.value(ref.element->id).has_value() ? 1 : 0;
      const auto avg = average(store, view, s);
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", avg.value_or(0.0));
      out << "average=" << (avg ? buf : "n/a") << " rated=" << rated << " selected=" << selected.size()
          << "\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
}

}  // namespace exportscope
