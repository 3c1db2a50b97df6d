#include <doctest.h>
#include <algorithm>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "forkent/analysis/table.hpp"
#include "forkent/errors.hpp"
#include "support/oracles.hpp"

using namespace forkent;
using analysis::Col;
using analysis::TableRow;

namespace {

TableRow make_row(const std::string& project, const std::string& month, double entropy,
                  double productivity, double acceptance, double bugs, double forks,
                  double files, double age, double stars, double old_ratio, double tests,
                  double hot) {
    TableRow row;
    row.project_id = project;
    row.month = month;
    row.cell(Col::fork_entropy) = entropy;
    row.cell(Col::fork_entropy_pr_variant) = entropy / 2.0;
    row.cell(Col::external_productivity) = productivity;
    row.cell(Col::prs_merged) = productivity;
    row.cell(Col::prs_closed) = productivity + 1;
    row.cell(Col::acceptance_rate) = acceptance;
    row.cell(Col::bug_reports) = bugs;
    row.cell(Col::num_forks) = forks;
    row.cell(Col::num_files) = files;
    row.cell(Col::project_age_days) = age;
    row.cell(Col::num_stars) = stars;
    row.cell(Col::ratio_old_contributors) = old_ratio;
    row.cell(Col::ratio_prs_with_tests) = tests;
    row.cell(Col::ratio_prs_touch_hot_files) = hot;
    return row;
}

std::vector<TableRow> synthetic_rows(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<TableRow> rows;
    for (std::size_t i = 0; i < n; ++i) {
        double entropy = u(rng) * 0.9;
        rows.push_back(make_row("p" + std::to_string(i % 3),
                                "2021-" + std::string(i % 12 < 9 ? "0" : "") +
                                    std::to_string(i % 12 + 1) + "-" + std::to_string(i),
                                entropy, std::floor(u(rng) * 40), u(rng),
                                std::floor(u(rng) * 15), std::floor(u(rng) * 200),
                                std::floor(u(rng) * 50), 100 + double(i), u(rng) * 5000,
                                u(rng), u(rng), u(rng)));
    }
    return rows;
}

}  // namespace

TEST_CASE("prepare_table: z-scores, log1p, empty-unit dropping") {
    // control column [1,2,3] standardizes to [-1,0,1] (sample stddev)
    std::vector<TableRow> rows;
    for (int i = 0; i < 3; ++i) {
        rows.push_back(make_row("p", "2021-0" + std::to_string(i + 1), 0.1 * (i + 1), i, 0.5,
                                i, double(i), double(i + 1), double(i + 1), double(2 * i),
                                0.5 * i, 0.1 * (i + 1), 0.3 * i));
    }
    // project_age_days is standardized but not log1p'd
    auto table = analysis::prepare_table(rows, 0.0);
    REQUIRE(table.rows.size() == 3);
    CHECK(*table.rows[0].cell(Col::project_age_days) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(*table.rows[1].cell(Col::project_age_days) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(*table.rows[2].cell(Col::project_age_days) == doctest::Approx(1.0).epsilon(1e-12));

    // outcomes stay raw
    CHECK(*table.rows[2].cell(Col::external_productivity) == 2.0);

    // empty-population rows are dropped before anything else
    std::vector<TableRow> with_empty = rows;
    TableRow empty;
    empty.project_id = "p";
    empty.month = "2021-09";
    empty.cell(Col::external_productivity) = 5.0;
    with_empty.push_back(empty);  // no fork_entropy -> empty population
    auto table2 = analysis::prepare_table(with_empty, 0.0);
    CHECK(table2.rows.size() == 3);
}

TEST_CASE("prepare_table rejects degenerate and tiny inputs") {
    std::vector<TableRow> rows;
    rows.push_back(make_row("p", "2021-01", 0.1, 1, 0.5, 1, 1, 1, 10, 1, 0, 0, 0));
    CHECK_THROWS_AS(analysis::prepare_table(rows, 0.01), InsufficientData);

    rows.push_back(make_row("p", "2021-02", 0.2, 2, 0.6, 2, 2, 2, 11, 2, 0.5, 0.5, 0.5));
    // ratio_old_contributors differs, every standardized column varies... except
    // make one constant:
    rows[0].cell(Col::num_stars) = 7.0;
    rows[1].cell(Col::num_stars) = 7.0;
    CHECK_THROWS_AS(analysis::prepare_table(rows, 0.01), DegenerateColumn);
}

TEST_CASE("log1p applied to the skewed controls, 0 maps to 0 before scaling") {
    std::vector<TableRow> rows;
    rows.push_back(make_row("p", "2021-01", 0.1, 1, 0.5, 1, 0, 3, 10, 0, 0.0, 0.1, 0.2));
    rows.push_back(make_row("p", "2021-02", 0.2, 2, 0.6, 2, 9, 7, 11, 99, 0.5, 0.6, 0.7));
    auto table = analysis::prepare_table(rows, 0.0);
    const auto& log = *table.transform_log;

    // transform log records the parameters to invert: NumForks was {0, 9}
    // -> log1p {0, log(10)}
    auto forks_transform = std::find_if(log.columns.begin(), log.columns.end(),
                                        [](const auto& t) { return t.column == "num_forks"; });
    REQUIRE(forks_transform != log.columns.end());
    CHECK(forks_transform->log1p_applied);
    CHECK(forks_transform->standardized);
    CHECK(forks_transform->mean == doctest::Approx(std::log1p(9.0) / 2.0).epsilon(1e-12));

    auto age_transform = std::find_if(log.columns.begin(), log.columns.end(),
                                      [](const auto& t) { return t.column == "project_age_days"; });
    REQUIRE(age_transform != log.columns.end());
    CHECK_FALSE(age_transform->log1p_applied);
}

TEST_CASE("standardized columns have mean 0 and sample stddev 1; round trip inverts") {
    auto rows = synthetic_rows(300, 91);
    auto raw_copy = rows;
    auto table = analysis::prepare_table(rows, 0.01);

    for (const char* name :
         {"fork_entropy", "num_forks", "num_files", "project_age_days", "num_stars",
          "ratio_old_contributors", "ratio_prs_with_tests", "ratio_prs_touch_hot_files"}) {
        auto col = analysis::column_by_name(name);
        REQUIRE(col.has_value());
        double sum = 0;
        std::size_t n = 0;
        for (const auto& row : table.rows) {
            if (auto v = row.cell(*col)) {
                sum += *v;
                ++n;
            }
        }
        double mean = sum / double(n);
        double ss = 0;
        for (const auto& row : table.rows) {
            if (auto v = row.cell(*col)) {
                ss += (*v - mean) * (*v - mean);
            }
        }
        double stddev = std::sqrt(ss / double(n - 1));
        CAPTURE(name);
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(stddev - 1.0) < 1e-9);
    }

    // invert and compare against the original raw values
    auto inverted = analysis::invert_preparation(table);
    std::size_t compared = 0;
    for (const auto& row : inverted.rows) {
        auto original = std::find_if(raw_copy.begin(), raw_copy.end(), [&](const TableRow& r) {
            return r.project_id == row.project_id && r.month == row.month;
        });
        REQUIRE(original != raw_copy.end());
        for (std::size_t i = 0; i < analysis::kNumericColumns; ++i) {
            if (row.cells[i] && original->cells[i]) {
                CHECK(std::abs(*row.cells[i] - *original->cells[i]) < 1e-9);
                ++compared;
            }
        }
    }
    CHECK(compared > 1000);
}

TEST_CASE("outlier trim: floor(frac*n) per outcome, never more than ceil") {
    auto rows = synthetic_rows(300, 17);
    // plant 3 extreme productivity values
    rows[10].cell(Col::external_productivity) = 1e6;
    rows[20].cell(Col::external_productivity) = 2e6;
    rows[30].cell(Col::external_productivity) = 3e6;
    auto table = analysis::prepare_table(rows, 0.01);

    // 300 rows; 3 trimmed per outcome; overlaps possible across outcomes but
    // productivity definitely lost its 3 extremes
    const auto& trims = table.transform_log->trims;
    auto productivity_trim =
        std::find_if(trims.begin(), trims.end(),
                     [](const auto& t) { return t.column == "external_productivity"; });
    REQUIRE(productivity_trim != trims.end());
    CHECK(productivity_trim->rows_removed == 3);
    CHECK(*productivity_trim->threshold == 1e6);
    for (const auto& trim : trims) {
        CHECK(trim.rows_removed <= std::size_t(std::ceil(0.01 * 300)));
    }
    for (const auto& row : table.rows) {
        if (auto v = row.cell(Col::external_productivity)) {
            CHECK(*v < 1e6);
        }
    }
    CHECK(table.rows.size() >= 291);  // at most 3 per outcome removed
}

TEST_CASE("spearman matches the rank-counting oracle; rank order is transform-invariant") {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 3 + rng() % 40;
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            // integer-ish values produce plenty of ties
            xs[i] = std::floor(u(rng));
            ys[i] = std::floor(u(rng));
        }
        auto rho = analysis::spearman(xs, ys);
        bool x_const = std::all_of(xs.begin(), xs.end(), [&](double v) { return v == xs[0]; });
        bool y_const = std::all_of(ys.begin(), ys.end(), [&](double v) { return v == ys[0]; });
        if (x_const || y_const) {
            CHECK_FALSE(rho.has_value());
            continue;
        }
        REQUIRE(rho.has_value());
        CHECK(std::abs(*rho - testsupport::spearman_oracle(xs, ys)) < 1e-12);

        // log1p + z-score are strictly monotone: ranks unchanged
        std::vector<double> tx(n);
        for (std::size_t i = 0; i < n; ++i) {
            tx[i] = (std::log1p(xs[i]) - 2.0) / 3.0;
        }
        auto rho2 = analysis::spearman(tx, ys);
        CHECK(std::abs(*rho - *rho2) < 1e-12);
    }

    // strictly increasing outcome -> rho = 1
    std::vector<double> xs{0.1, 0.2, 0.5, 0.9};
    std::vector<double> ys{1, 2, 3, 4};
    CHECK(*analysis::spearman(xs, ys) == doctest::Approx(1.0));
    std::vector<double> yrev{4, 3, 2, 1};
    CHECK(*analysis::spearman(xs, yrev) == doctest::Approx(-1.0));

    CHECK_THROWS_AS(analysis::spearman({1.0, 2.0}, {1.0, 2.0}), InsufficientData);
}

TEST_CASE("correlation summary: pooled and per project with sample sizes") {
    auto rows = synthetic_rows(60, 7);
    analysis::RegressionTable table;
    table.rows = rows;
    auto entries = analysis::correlation_summary(table);
    // 3 outcomes x (pooled + 3 projects)
    CHECK(entries.size() == 12);
    std::size_t pooled = 0;
    for (const auto& e : entries) {
        if (e.project.empty()) {
            ++pooled;
            CHECK(e.n == 60);
            CHECK(e.rho.has_value());
        }
    }
    CHECK(pooled == 3);
}

TEST_CASE("export is deterministic and sorted; empty table yields header-only CSV") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "forkent-test-export";
    fs::remove_all(dir);

    analysis::RegressionTable empty;
    auto paths = analysis::export_table(empty, dir, "empty");
    std::ifstream csv(paths.csv);
    std::string header;
    std::getline(csv, header);
    CHECK(header ==
          "project_id,month,fork_entropy,fork_entropy_pr_variant,external_productivity,"
          "prs_merged,prs_closed,acceptance_rate,bug_reports,num_forks,num_files,"
          "project_age_days,num_stars,ratio_old_contributors,ratio_prs_with_tests,"
          "ratio_prs_touch_hot_files");
    std::string rest;
    CHECK_FALSE(std::getline(csv, rest));

    // shuffled rows export identically
    auto rows = synthetic_rows(40, 3);
    analysis::RegressionTable a, b;
    a.rows = rows;
    std::reverse(rows.begin(), rows.end());
    b.rows = rows;
    auto pa = analysis::export_table(a, dir, "a");
    auto pb = analysis::export_table(b, dir, "b");
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    CHECK(slurp(pa.csv) == slurp(pb.csv));
    CHECK(slurp(pa.ndjson) == slurp(pb.ndjson));

    // ndjson round trip preserves rows and undefined cells
    auto reread = analysis::read_table_ndjson(pa.ndjson);
    CHECK(reread.rows.size() == 40);
    CHECK_FALSE(reread.transform_log.has_value());

    auto prepared = analysis::prepare_table(a.rows, 0.01);
    auto pp = analysis::export_table(prepared, dir, "prepared");
    auto reread_prepared = analysis::read_table_ndjson(pp.ndjson);
    REQUIRE(reread_prepared.transform_log.has_value());
    CHECK(reread_prepared.transform_log->columns.size() == analysis::kNumericColumns);
}

TEST_CASE("format_value") {
    CHECK(analysis::format_value(0.0) == "0");
    CHECK(analysis::format_value(-0.0) == "0");
    CHECK(analysis::format_value(1.0) == "1");
    CHECK(analysis::format_value(2.0 / 3.0) == "0.6666666667");
    CHECK(analysis::format_value(0.31606027941427883) == "0.3160602794");
    CHECK(analysis::format_value(5.0) == "5");
    CHECK(analysis::format_value(-1.5) == "-1.5");
}
