#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vforge/metrics.hpp"
#include "vforge/sample.hpp"

namespace vforge {

struct MetricTriple {
  std::optional<double> tc;  // absent below two frames
  std::optional<double> ta;  // absent for deletion
  std::optional<double> bp;
};

struct EvalRow {
  std::string id;
  Task task = Task::kAdditionModification;
  MetricTriple native;
  MetricTriple downsampled;
  std::string error;  // non-empty when the record could not be evaluated
};

struct TaskSummary {
  Task task = Task::kAdditionModification;
  std::size_t records = 0;  // successfully evaluated
  MetricTriple native;
  MetricTriple downsampled;
};

struct EvalReport {
  int fps_factor = kDefaultFpsFactor;
  std::vector<EvalRow> rows;
  std::vector<TaskSummary> tasks;  // only tasks present in the input
  std::size_t failures = 0;
};

// Evaluates every record against its edited_ref; refs resolve against the
// manifest path. Failing records are reported in their row and skipped in the
// means.
EvalReport eval_report(const std::vector<EvalRecord>& records,
                       const std::filesystem::path& manifest_path, const Embedder& embedder,
                       const Scorer& scorer, int fps_factor = kDefaultFpsFactor,
                       unsigned workers = 1);

std::string format_report_table(const EvalReport& report);
std::string report_json(const EvalReport& report);

// Text table to `table_path`, JSON to table_path + ".json".
void write_eval_report(const EvalReport& report, const std::filesystem::path& table_path);

}  // namespace vforge
