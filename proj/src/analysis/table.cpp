#include "forkent/analysis/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <tuple>

#include <json.hpp>

#include "forkent/errors.hpp"

namespace forkent::analysis {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kNumericColumns> kColumnNames{
    "fork_entropy",
    "fork_entropy_pr_variant",
    "external_productivity",
    "prs_merged",
    "prs_closed",
    "acceptance_rate",
    "bug_reports",
    "num_forks",
    "num_files",
    "project_age_days",
    "num_stars",
    "ratio_old_contributors",
    "ratio_prs_with_tests",
    "ratio_prs_touch_hot_files",
};

constexpr std::array<Col, 4> kLog1pColumns{Col::num_forks, Col::num_files, Col::num_stars,
                                           Col::ratio_old_contributors};

constexpr std::array<Col, 9> kStandardizedColumns{
    Col::fork_entropy,        Col::fork_entropy_pr_variant, Col::num_forks,
    Col::num_files,           Col::project_age_days,        Col::num_stars,
    Col::ratio_old_contributors, Col::ratio_prs_with_tests, Col::ratio_prs_touch_hot_files,
};

bool is_log1p_column(Col col) {
    return std::find(kLog1pColumns.begin(), kLog1pColumns.end(), col) != kLog1pColumns.end();
}

void sort_rows(std::vector<TableRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const TableRow& a, const TableRow& b) {
        return std::tie(a.project_id, a.month) < std::tie(b.project_id, b.month);
    });
}

std::vector<double> ranks_with_ties(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&values](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        double avg = (double(i) + double(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = avg;
        }
        i = j + 1;
    }
    return ranks;
}

}  // namespace

std::string_view column_name(Col col) {
    return kColumnNames[std::size_t(col)];
}

std::optional<Col> column_by_name(std::string_view name) {
    for (std::size_t i = 0; i < kNumericColumns; ++i) {
        if (kColumnNames[i] == name) {
            return Col(i);
        }
    }
    return std::nullopt;
}

TableRow to_table_row(const metrics::SnapshotMetrics& m) {
    TableRow row;
    row.project_id = m.project_id;
    row.month = m.month;
    row.cell(Col::fork_entropy) = m.fork_entropy;
    row.cell(Col::fork_entropy_pr_variant) = m.fork_entropy_pr_variant;
    row.cell(Col::external_productivity) = double(m.external_productivity);
    row.cell(Col::prs_merged) = double(m.prs_merged);
    row.cell(Col::prs_closed) = double(m.prs_closed);
    row.cell(Col::acceptance_rate) = m.acceptance_rate;
    row.cell(Col::bug_reports) = double(m.bug_reports);
    row.cell(Col::num_forks) = double(m.num_forks);
    row.cell(Col::num_files) = double(m.num_files);
    row.cell(Col::project_age_days) = double(m.project_age_days);
    row.cell(Col::num_stars) = double(m.num_stars);
    row.cell(Col::ratio_old_contributors) = m.ratio_old_contributors;
    row.cell(Col::ratio_prs_with_tests) = m.ratio_prs_with_tests;
    row.cell(Col::ratio_prs_touch_hot_files) = m.ratio_prs_touch_hot_files;
    return row;
}

RegressionTable prepare_table(std::vector<TableRow> rows, double outlier_fraction) {
    if (!(outlier_fraction >= 0.0) || outlier_fraction >= 1.0) {
        throw std::invalid_argument("outlier_fraction must be in [0, 1)");
    }

    // Units with empty fork populations carry no entropy and leave the
    // table here.
    std::erase_if(rows, [](const TableRow& r) { return !r.cell(Col::fork_entropy).has_value(); });
    sort_rows(rows);
    if (rows.size() < 2) {
        throw InsufficientData("prepare_table needs at least 2 non-empty units, got " +
                               std::to_string(rows.size()));
    }

    TransformLog log;
    log.outlier_fraction = outlier_fraction;

    for (Col col : kLog1pColumns) {
        for (TableRow& row : rows) {
            if (auto& cell = row.cell(col)) {
                cell = std::log1p(*cell);
            }
        }
    }

    // Upper-tail trim, k largest per outcome, sets unioned before removal.
    const std::size_t k = std::size_t(outlier_fraction * double(rows.size()));
    std::vector<bool> drop(rows.size(), false);
    for (Col outcome : kOutcomeColumns) {
        OutcomeTrim trim;
        trim.column = std::string(column_name(outcome));
        if (k > 0) {
            std::vector<std::size_t> defined;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].cell(outcome).has_value()) {
                    defined.push_back(i);
                }
            }
            std::sort(defined.begin(), defined.end(), [&](std::size_t a, std::size_t b) {
                double va = *rows[a].cell(outcome), vb = *rows[b].cell(outcome);
                if (va != vb) {
                    return va > vb;  // largest first
                }
                return std::tie(rows[a].project_id, rows[a].month) <
                       std::tie(rows[b].project_id, rows[b].month);
            });
            std::size_t removed = std::min(k, defined.size());
            for (std::size_t i = 0; i < removed; ++i) {
                drop[defined[i]] = true;
                double value = *rows[defined[i]].cell(outcome);
                trim.threshold = trim.threshold ? std::min(*trim.threshold, value) : value;
            }
            trim.rows_removed = removed;
        }
        log.trims.push_back(std::move(trim));
    }
    std::vector<TableRow> kept;
    kept.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!drop[i]) {
            kept.push_back(std::move(rows[i]));
        }
    }
    rows = std::move(kept);
    if (rows.size() < 2) {
        throw InsufficientData("fewer than 2 units remain after outlier trimming");
    }

    for (std::size_t i = 0; i < kNumericColumns; ++i) {
        Col col = Col(i);
        ColumnTransform transform;
        transform.column = std::string(column_name(col));
        transform.log1p_applied = is_log1p_column(col);
        bool standardize = std::find(kStandardizedColumns.begin(), kStandardizedColumns.end(),
                                     col) != kStandardizedColumns.end();
        if (standardize) {
            std::vector<double> values;
            for (const TableRow& row : rows) {
                if (auto cell = row.cell(col)) {
                    values.push_back(*cell);
                }
            }
            if (values.size() < 2) {
                throw DegenerateColumn(transform.column);
            }
            double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                          double(values.size());
            double ss = 0.0;
            for (double v : values) {
                ss += (v - mean) * (v - mean);
            }
            double stddev = std::sqrt(ss / double(values.size() - 1));
            if (stddev == 0.0) {
                throw DegenerateColumn(transform.column);
            }
            for (TableRow& row : rows) {
                if (auto& cell = row.cell(col)) {
                    cell = (*cell - mean) / stddev;
                }
            }
            transform.standardized = true;
            transform.mean = mean;
            transform.stddev = stddev;
        }
        log.columns.push_back(std::move(transform));
    }

    RegressionTable table;
    table.rows = std::move(rows);
    table.transform_log = std::move(log);
    return table;
}

RegressionTable invert_preparation(const RegressionTable& prepared) {
    if (!prepared.transform_log) {
        throw std::invalid_argument("invert_preparation: table carries no transform log");
    }
    RegressionTable out;
    out.rows = prepared.rows;
    for (const ColumnTransform& t : prepared.transform_log->columns) {
        auto col = column_by_name(t.column);
        if (!col) {
            continue;
        }
        for (TableRow& row : out.rows) {
            auto& cell = row.cell(*col);
            if (!cell) {
                continue;
            }
            double v = *cell;
            if (t.standardized) {
                v = v * t.stddev + t.mean;
            }
            if (t.log1p_applied) {
                v = std::expm1(v);
            }
            cell = v;
        }
    }
    return out;
}

std::optional<double> spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) {
        throw std::invalid_argument("spearman: length mismatch");
    }
    if (xs.size() < 3) {
        throw InsufficientData("spearman needs at least 3 pairs, got " +
                               std::to_string(xs.size()));
    }
    std::vector<double> rx = ranks_with_ties(xs);
    std::vector<double> ry = ranks_with_ties(ys);
    double n = double(rx.size());
    double mean = (n + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        double dx = rx[i] - mean, dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        return std::nullopt;
    }
    return sxy / std::sqrt(sxx * syy);
}

std::vector<CorrelationEntry> correlation_summary(const RegressionTable& table) {
    std::vector<CorrelationEntry> entries;
    std::vector<std::string> projects;
    for (const TableRow& row : table.rows) {
        if (projects.empty() || projects.back() != row.project_id) {
            if (std::find(projects.begin(), projects.end(), row.project_id) == projects.end()) {
                projects.push_back(row.project_id);
            }
        }
    }
    std::sort(projects.begin(), projects.end());

    auto collect = [&table](Col outcome, const std::string& project, std::vector<double>& xs,
                            std::vector<double>& ys) {
        for (const TableRow& row : table.rows) {
            if (!project.empty() && row.project_id != project) {
                continue;
            }
            const auto& x = row.cell(Col::fork_entropy);
            const auto& y = row.cell(outcome);
            if (x && y) {
                xs.push_back(*x);
                ys.push_back(*y);
            }
        }
    };

    auto add_entry = [&entries](Col outcome, const std::string& project,
                                const std::vector<double>& xs, const std::vector<double>& ys) {
        CorrelationEntry entry;
        entry.outcome = std::string(column_name(outcome));
        entry.project = project;
        entry.n = xs.size();
        try {
            entry.rho = spearman(xs, ys);
        } catch (const InsufficientData&) {
            entry.rho = std::nullopt;
        }
        entries.push_back(std::move(entry));
    };

    for (Col outcome : kOutcomeColumns) {
        std::vector<double> xs, ys;
        collect(outcome, "", xs, ys);
        add_entry(outcome, "", xs, ys);
        for (const std::string& project : projects) {
            std::vector<double> pxs, pys;
            collect(outcome, project, pxs, pys);
            add_entry(outcome, project, pxs, pys);
        }
    }
    return entries;
}

std::string format_value(double value) {
    if (value == 0.0) {
        return "0";  // folds -0
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

namespace {

json transform_log_json(const TransformLog& log) {
    json columns = json::array();
    for (const ColumnTransform& t : log.columns) {
        json obj{{"column", t.column},
                 {"log1p", t.log1p_applied},
                 {"standardized", t.standardized}};
        if (t.standardized) {
            obj["mean"] = t.mean;
            obj["stddev"] = t.stddev;
        }
        columns.push_back(std::move(obj));
    }
    json trims = json::array();
    for (const OutcomeTrim& t : log.trims) {
        json obj{{"column", t.column}, {"rows_removed", t.rows_removed}};
        if (t.threshold) {
            obj["threshold"] = *t.threshold;
        }
        trims.push_back(std::move(obj));
    }
    return json{{"outlier_fraction", log.outlier_fraction},
                {"columns", std::move(columns)},
                {"trims", std::move(trims)}};
}

TransformLog transform_log_from_json(const json& j) {
    TransformLog log;
    log.outlier_fraction = j.value("outlier_fraction", 0.01);
    for (const json& c : j.value("columns", json::array())) {
        ColumnTransform t;
        t.column = c.value("column", "");
        t.log1p_applied = c.value("log1p", false);
        t.standardized = c.value("standardized", false);
        t.mean = c.value("mean", 0.0);
        t.stddev = c.value("stddev", 1.0);
        log.columns.push_back(std::move(t));
    }
    for (const json& c : j.value("trims", json::array())) {
        OutcomeTrim t;
        t.column = c.value("column", "");
        t.rows_removed = c.value("rows_removed", std::size_t{0});
        if (c.contains("threshold") && !c["threshold"].is_null()) {
            t.threshold = c["threshold"].get<double>();
        }
        log.trims.push_back(std::move(t));
    }
    return log;
}

json manifest_json(const RegressionTable& table) {
    json manifest{{"kind", "manifest"}, {"schema_version", 1}};
    manifest["transform_log"] =
        table.transform_log ? transform_log_json(*table.transform_log) : json(nullptr);
    return manifest;
}

}  // namespace

ExportPaths export_table(const RegressionTable& table, const std::filesystem::path& dir,
                         const std::string& basename) {
    std::filesystem::create_directories(dir);
    ExportPaths paths{dir / (basename + ".csv"), dir / (basename + ".ndjson"),
                      dir / (basename + ".manifest.json")};

    std::vector<TableRow> rows = table.rows;
    sort_rows(rows);

    {
        std::ofstream csv(paths.csv, std::ios::binary | std::ios::trunc);
        if (!csv) {
            throw IoFailure("cannot open " + paths.csv.string() + " for writing");
        }
        csv << "project_id,month";
        for (std::size_t i = 0; i < kNumericColumns; ++i) {
            csv << ',' << kColumnNames[i];
        }
        csv << '\n';
        for (const TableRow& row : rows) {
            csv << row.project_id << ',' << row.month;
            for (std::size_t i = 0; i < kNumericColumns; ++i) {
                csv << ',';
                if (row.cells[i]) {
                    csv << format_value(*row.cells[i]);
                }
            }
            csv << '\n';
        }
    }

    {
        std::ofstream ndjson(paths.ndjson, std::ios::binary | std::ios::trunc);
        if (!ndjson) {
            throw IoFailure("cannot open " + paths.ndjson.string() + " for writing");
        }
        ndjson << manifest_json(table).dump() << '\n';
        for (const TableRow& row : rows) {
            json obj{{"project_id", row.project_id}, {"month", row.month}};
            for (std::size_t i = 0; i < kNumericColumns; ++i) {
                obj[std::string(kColumnNames[i])] =
                    row.cells[i] ? json(*row.cells[i]) : json(nullptr);
            }
            ndjson << obj.dump() << '\n';
        }
    }

    {
        std::ofstream manifest(paths.manifest, std::ios::binary | std::ios::trunc);
        if (!manifest) {
            throw IoFailure("cannot open " + paths.manifest.string() + " for writing");
        }
        manifest << manifest_json(table).dump(2) << '\n';
    }
    return paths;
}

RegressionTable read_table_ndjson(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoFailure("cannot open " + path.string());
    }
    RegressionTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw MalformedRecord(path.filename().string(), line_no,
                                  std::string("invalid JSON: ") + e.what());
        }
        if (obj.is_object() && obj.value("kind", "") == "manifest") {
            if (obj.contains("transform_log") && !obj["transform_log"].is_null()) {
                table.transform_log = transform_log_from_json(obj["transform_log"]);
            }
            continue;
        }
        TableRow row;
        row.project_id = obj.value("project_id", "");
        row.month = obj.value("month", "");
        if (row.project_id.empty() || row.month.empty()) {
            throw MalformedRecord(path.filename().string(), line_no,
                                  "row needs project_id and month");
        }
        for (std::size_t i = 0; i < kNumericColumns; ++i) {
            std::string key(kColumnNames[i]);
            if (obj.contains(key) && !obj[key].is_null()) {
                row.cells[i] = obj[key].get<double>();
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace forkent::analysis
