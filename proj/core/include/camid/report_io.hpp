#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "camid/eval.hpp"

namespace camid {

// Flat key/value view of the effective run configuration; embedded into
// every report for auditability.
using ConfigEcho = std::map<std::string, std::string>;

// FNV-1a over the canonical "key=value\n" lines.
std::string config_hash(const ConfigEcho& config);

// Deterministic JSON document for one benchmark run (method reports,
// confusion matrices, counts, seed, effective config + hash).
std::string report_json_string(const BenchmarkResult& result, const std::string& dataset_root,
                               const ConfigEcho& config);
void write_report_json(const BenchmarkResult& result, const std::string& dataset_root,
                       const ConfigEcho& config, const std::filesystem::path& path);

// confusion_<method>.csv: header row of predicted names, one row per true
// class with row-normalized values.
void write_confusion_csv(const EvaluationReport& report, const std::vector<DeviceLabel>& labels,
                         const std::filesystem::path& path);

// Text accuracy table plus per-method confusion tables.
std::string render_summary(const BenchmarkResult& result, const std::string& dataset_root);

// Re-renders the summary from an existing report.json.
std::string summarize_report_file(const std::filesystem::path& report_json);

}  // namespace camid
