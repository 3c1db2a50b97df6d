#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "forkent/analysis/table.hpp"
#include "forkent/data/dataset.hpp"
#include "forkent/metrics/metrics.hpp"
#include "forkent/population/cache.hpp"

namespace forkent::pipeline {

// Every knob defaults to the published choice: gamma 1, calendar months,
// 90-day hot window, 1% outlier trim, 100/100 lint thresholds.
struct RunConfig {
    std::filesystem::path dataset_dir;
    std::filesystem::path out_dir = "out";
    double gamma = 1.0;
    int hot_window_days = 90;
    double outlier_fraction = 0.01;
    int jobs = 1;
    std::string kernel = "auto";               // auto | scalar | avx2
    std::string role_cutoff = "interval_end";  // interval_end | interval_start
    std::string hot_ref = "interval_start";    // interval_start | pr_created
    std::size_t lint_min_active_forks = 100;
    std::size_t lint_min_issues = 100;
    std::optional<std::filesystem::path> snapshot_cache;
};

std::string config_to_json(const RunConfig& config);
RunConfig config_from_json_file(const std::filesystem::path& path);

metrics::MetricsConfig metrics_config(const RunConfig& config);

// Per-snapshot metrics, parallel across snapshots when jobs > 1, output
// ordered by month regardless of scheduling.
std::vector<metrics::SnapshotMetrics> compute_project_metrics(
    const data::EventDataset& ds, const std::vector<population::Snapshot>& snapshots,
    const metrics::MetricsConfig& cfg, int jobs);

struct PipelineResult {
    std::vector<metrics::SnapshotMetrics> rows;
    std::vector<data::LintFinding> lint;
    analysis::ExportPaths exports;
    std::filesystem::path lint_path;
    std::vector<std::filesystem::path> charts;
};

// load -> snapshots (or cache) -> metrics -> raw metrics.csv/.ndjson +
// lint.json + one SVG chart per project.
PipelineResult run_pipeline(const RunConfig& config);

}  // namespace forkent::pipeline
