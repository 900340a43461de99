#include "vforge/eval_report.hpp"

#include <atomic>
#include <fstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "vforge/error.hpp"
#include "vforge/image_io.hpp"
#include "vforge/manifest.hpp"

namespace vforge {

namespace {

constexpr const char* kBpScale = "mean absolute difference per channel, 0-255 pixel units";

MetricTriple evaluate(const FrameSequence& original, const FrameSequence& edited,
                      const MaskSequence& masks, const EvalRecord& rec, const Embedder& embedder,
                      const Scorer& scorer) {
  MetricTriple m;
  if (edited.length() >= 2) {
    m.tc = temporal_consistency(edited, embedder);
  }
  m.ta = text_alignment_for(rec.sample.task, edited, masks, rec.sample.caption, scorer);
  m.bp = background_preservation(original, edited, masks);
  return m;
}

EvalRow evaluate_record(const EvalRecord& rec, const std::filesystem::path& manifest_path,
                        const Embedder& embedder, const Scorer& scorer, int fps_factor) {
  EvalRow row;
  row.id = rec.sample.id;
  row.task = rec.sample.task;
  try {
    if (!rec.edited_ref) {
      throw Error(ErrorCode::kSchemaViolation, "record has no edited_ref");
    }
    const Rational fps = rec.sample.fps;
    const FrameSequence original =
        load_frames(resolve_ref(manifest_path, rec.sample.frames_ref), fps, rec.sample.id);
    const FrameSequence edited =
        load_frames(resolve_ref(manifest_path, *rec.edited_ref), fps, rec.sample.id);
    const MaskSequence masks = load_masks(resolve_ref(manifest_path, rec.sample.masks_ref));
    row.native = evaluate(original, edited, masks, rec, embedder, scorer);
    row.downsampled = evaluate(downsample_fps(original, fps_factor),
                               downsample_fps(edited, fps_factor),
                               downsample_masks(masks, fps_factor), rec, embedder, scorer);
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

struct Accumulator {
  double sum = 0.0;
  std::size_t n = 0;
  void add(const std::optional<double>& v) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  std::optional<double> mean() const {
    return n == 0 ? std::nullopt : std::optional<double>(sum / static_cast<double>(n));
  }
};

struct TripleAccumulator {
  Accumulator tc, ta, bp;
  void add(const MetricTriple& m) {
    tc.add(m.tc);
    ta.add(m.ta);
    bp.add(m.bp);
  }
  MetricTriple mean() const { return {tc.mean(), ta.mean(), bp.mean()}; }
};

std::string cell(const std::optional<double>& v) { return v ? fmt::format("{:.2f}", *v) : "-"; }

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json triple_json(const MetricTriple& m) {
  return {{"tc", opt_json(m.tc)}, {"ta", opt_json(m.ta)}, {"bp", opt_json(m.bp)}};
}

}  // namespace

EvalReport eval_report(const std::vector<EvalRecord>& records,
                       const std::filesystem::path& manifest_path, const Embedder& embedder,
                       const Scorer& scorer, int fps_factor, unsigned workers) {
  if (fps_factor < 1) {
    throw Error(ErrorCode::kInvalidArgument, "fps factor must be >= 1");
  }
  EvalReport report;
  report.fps_factor = fps_factor;
  report.rows.resize(records.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      report.rows[i] = evaluate_record(records[i], manifest_path, embedder, scorer, fps_factor);
    }
  };
  const unsigned n = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(records.size())));
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < n; ++t) {
    threads.emplace_back(work);
  }
  work();
  for (auto& t : threads) {
    t.join();
  }

  for (Task task : {Task::kAdditionModification, Task::kDeletion}) {
    TaskSummary s;
    s.task = task;
    TripleAccumulator native;
    TripleAccumulator down;
    bool present = false;
    for (const auto& row : report.rows) {
      if (row.task != task) {
        continue;
      }
      present = true;
      if (!row.error.empty()) {
        continue;
      }
      ++s.records;
      native.add(row.native);
      down.add(row.downsampled);
    }
    if (present) {
      s.native = native.mean();
      s.downsampled = down.mean();
      report.tasks.push_back(s);
    }
  }
  for (const auto& row : report.rows) {
    report.failures += !row.error.empty();
  }
  return report;
}

std::string format_report_table(const EvalReport& report) {
  std::string out;
  out += fmt::format("BP: {}\n", kBpScale);
  out += fmt::format("downsampled columns keep every {}th frame\n\n", report.fps_factor);
  out += fmt::format("{:<22} {:>7} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n", "task", "records", "TC",
                     "TA", "BP", "TC/ds", "TA/ds", "BP/ds");
  for (const auto& s : report.tasks) {
    out += fmt::format("{:<22} {:>7} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n", to_string(s.task),
                       s.records, cell(s.native.tc), cell(s.native.ta), cell(s.native.bp),
                       cell(s.downsampled.tc), cell(s.downsampled.ta), cell(s.downsampled.bp));
  }
  if (report.failures > 0) {
    out += fmt::format("\n{} record(s) failed:\n", report.failures);
    for (const auto& row : report.rows) {
      if (!row.error.empty()) {
        out += fmt::format("  {}: {}\n", row.id, row.error);
      }
    }
  }
  return out;
}

std::string report_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["bp_scale"] = kBpScale;
  j["fps_factor"] = report.fps_factor;
  j["failures"] = report.failures;
  auto tasks = nlohmann::ordered_json::array();
  for (const auto& s : report.tasks) {
    tasks.push_back({{"task", to_string(s.task)},
                     {"records", s.records},
                     {"native", triple_json(s.native)},
                     {"downsampled", triple_json(s.downsampled)}});
  }
  j["tasks"] = std::move(tasks);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row{{"id", r.id},
                               {"task", to_string(r.task)},
                               {"native", triple_json(r.native)},
                               {"downsampled", triple_json(r.downsampled)}};
    if (!r.error.empty()) {
      row["error"] = r.error;
    }
    rows.push_back(std::move(row));
  }
  j["records"] = std::move(rows);
  return j.dump(2);
}

void write_eval_report(const EvalReport& report, const std::filesystem::path& table_path) {
  if (table_path.has_parent_path()) {
    std::filesystem::create_directories(table_path.parent_path());
  }
  std::ofstream table(table_path, std::ios::trunc);
  std::ofstream side(table_path.string() + ".json", std::ios::trunc);
  if (!table || !side) {
    throw Error(ErrorCode::kIo, "cannot write report to " + table_path.string());
  }
  table << format_report_table(report);
  side << report_json(report) << '\n';
}

}  // namespace vforge
