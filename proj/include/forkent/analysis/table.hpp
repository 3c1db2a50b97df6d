#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "forkent/metrics/metrics.hpp"

namespace forkent::analysis {

// Numeric columns in fixed export order (project_id and month precede them
// in the CSV).
enum class Col : std::size_t {
    fork_entropy = 0,
    fork_entropy_pr_variant,
    external_productivity,
    prs_merged,
    prs_closed,
    acceptance_rate,
    bug_reports,
    num_forks,
    num_files,
    project_age_days,
    num_stars,
    ratio_old_contributors,
    ratio_prs_with_tests,
    ratio_prs_touch_hot_files,
};

inline constexpr std::size_t kNumericColumns = 14;

std::string_view column_name(Col col);
std::optional<Col> column_by_name(std::string_view name);

// The three outcome variables (never standardized, upper-tail trimmed).
inline constexpr std::array<Col, 3> kOutcomeColumns{
    Col::external_productivity, Col::acceptance_rate, Col::bug_reports};

struct TableRow {
    std::string project_id;
    std::string month;
    std::array<std::optional<double>, kNumericColumns> cells;

    std::optional<double>& cell(Col col) { return cells[std::size_t(col)]; }
    const std::optional<double>& cell(Col col) const { return cells[std::size_t(col)]; }
};

TableRow to_table_row(const metrics::SnapshotMetrics& m);

struct ColumnTransform {
    std::string column;
    bool log1p_applied = false;
    bool standardized = false;
    double mean = 0.0;
    double stddev = 1.0;
};

struct OutcomeTrim {
    std::string column;
    std::size_t rows_removed = 0;
    std::optional<double> threshold;  // smallest removed value
};

struct TransformLog {
    double outlier_fraction = 0.01;
    std::vector<ColumnTransform> columns;
    std::vector<OutcomeTrim> trims;
};

struct RegressionTable {
    std::vector<TableRow> rows;
    std::optional<TransformLog> transform_log;  // set once prepared
};

// Variable preparation: drop empty-population units, log1p the skewed
// controls, trim the top `outlier_fraction` of each outcome, z-score fork
// entropy and all controls (pooled, sample stddev). Throws
// InsufficientData (< 2 retained rows) and DegenerateColumn (zero
// variance).
RegressionTable prepare_table(std::vector<TableRow> rows, double outlier_fraction = 0.01);

// Undoes standardization (and log1p) using the transform log; round-trips
// to 1e-9.
RegressionTable invert_preparation(const RegressionTable& prepared);

// Spearman rank correlation with average ranks. Throws InsufficientData
// when fewer than 3 pairs; returns nullopt when either side has no rank
// variance.
std::optional<double> spearman(const std::vector<double>& xs, const std::vector<double>& ys);

struct CorrelationEntry {
    std::string outcome;
    std::string project;  // empty for the pooled estimate
    std::optional<double> rho;
    std::size_t n = 0;
};

// Fork entropy vs each outcome, pooled and per project. Undefined pairs
// (insufficient data, constant columns) carry an empty rho.
std::vector<CorrelationEntry> correlation_summary(const RegressionTable& table);

// Deterministic exports, rows sorted by (project_id, month). The NDJSON
// starts with a manifest line; the CSV gets a sidecar
// `<basename>.manifest.json` with the same content.
struct ExportPaths {
    std::filesystem::path csv;
    std::filesystem::path ndjson;
    std::filesystem::path manifest;
};

ExportPaths export_table(const RegressionTable& table, const std::filesystem::path& dir,
                         const std::string& basename);

// Reads rows (and the manifest, if present) back from an exported NDJSON.
RegressionTable read_table_ndjson(const std::filesystem::path& path);

// "%.10g" with "-0" folded to "0"; the single formatting used everywhere a
// metric value is printed.
std::string format_value(double value);

}  // namespace forkent::analysis
