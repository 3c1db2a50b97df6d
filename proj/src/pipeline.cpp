#include "forkent/pipeline.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "forkent/entropy/kernels.hpp"
#include "forkent/errors.hpp"
#include "forkent/population/builder.hpp"
#include "forkent/report/svg.hpp"

namespace forkent::pipeline {

namespace {

using nlohmann::json;

population::RoleCutoff parse_role_cutoff(const std::string& name) {
    if (name == "interval_end") {
        return population::RoleCutoff::interval_end;
    }
    if (name == "interval_start") {
        return population::RoleCutoff::interval_start;
    }
    throw std::invalid_argument("role_cutoff must be interval_end or interval_start, got \"" +
                                name + "\"");
}

metrics::HotFileRef parse_hot_ref(const std::string& name) {
    if (name == "interval_start") {
        return metrics::HotFileRef::interval_start;
    }
    if (name == "pr_created") {
        return metrics::HotFileRef::pr_created;
    }
    throw std::invalid_argument("hot_ref must be interval_start or pr_created, got \"" + name +
                                "\"");
}

void validate(const RunConfig& config) {
    if (!(config.gamma > 0.0)) {
        throw std::invalid_argument("gamma must be positive");
    }
    if (config.hot_window_days <= 0) {
        throw std::invalid_argument("hot-window-days must be positive");
    }
    if (!(config.outlier_fraction >= 0.0) || config.outlier_fraction >= 1.0) {
        throw std::invalid_argument("outlier-fraction must be in [0, 1)");
    }
    if (config.jobs < 1) {
        throw std::invalid_argument("jobs must be >= 1");
    }
    parse_role_cutoff(config.role_cutoff);
    parse_hot_ref(config.hot_ref);
}

}  // namespace

std::string config_to_json(const RunConfig& config) {
    json j{{"dataset", config.dataset_dir.string()},
           {"out", config.out_dir.string()},
           {"gamma", config.gamma},
           {"hot_window_days", config.hot_window_days},
           {"outlier_fraction", config.outlier_fraction},
           {"jobs", config.jobs},
           {"kernel", config.kernel},
           {"role_cutoff", config.role_cutoff},
           {"hot_ref", config.hot_ref},
           {"lint_min_active_forks", config.lint_min_active_forks},
           {"lint_min_issues", config.lint_min_issues},
           {"snapshot_cache",
            config.snapshot_cache ? json(config.snapshot_cache->string()) : json(nullptr)},
           {"interval", "calendar_month"}};
    return j.dump(2);
}

RunConfig config_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoFailure("cannot open config file " + path.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw MalformedRecord(path.filename().string(), 0,
                              std::string("invalid JSON: ") + e.what());
    }
    RunConfig config;
    config.dataset_dir = j.value("dataset", "");
    config.out_dir = j.value("out", "out");
    config.gamma = j.value("gamma", 1.0);
    config.hot_window_days = j.value("hot_window_days", 90);
    config.outlier_fraction = j.value("outlier_fraction", 0.01);
    config.jobs = j.value("jobs", 1);
    config.kernel = j.value("kernel", "auto");
    config.role_cutoff = j.value("role_cutoff", "interval_end");
    config.hot_ref = j.value("hot_ref", "interval_start");
    config.lint_min_active_forks = j.value("lint_min_active_forks", std::size_t{100});
    config.lint_min_issues = j.value("lint_min_issues", std::size_t{100});
    if (j.contains("snapshot_cache") && !j["snapshot_cache"].is_null()) {
        config.snapshot_cache = std::filesystem::path(j["snapshot_cache"].get<std::string>());
    }
    return config;
}

metrics::MetricsConfig metrics_config(const RunConfig& config) {
    metrics::MetricsConfig cfg;
    cfg.gamma = config.gamma;
    cfg.hot_window_days = config.hot_window_days;
    cfg.hot_ref = parse_hot_ref(config.hot_ref);
    cfg.role_cutoff = parse_role_cutoff(config.role_cutoff);
    return cfg;
}

std::vector<metrics::SnapshotMetrics> compute_project_metrics(
    const data::EventDataset& ds, const std::vector<population::Snapshot>& snapshots,
    const metrics::MetricsConfig& cfg, int jobs) {
    metrics::MetricsContext context(ds, cfg);
    std::vector<metrics::SnapshotMetrics> rows(snapshots.size());

    int workers = std::min<int>(jobs, int(snapshots.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < snapshots.size(); ++i) {
            rows[i] = context.compute(snapshots[i]);
        }
        return rows;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= snapshots.size()) {
                    return;
                }
                try {
                    rows[i] = context.compute(snapshots[i]);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) {
                        first_error = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
    return rows;
}

PipelineResult run_pipeline(const RunConfig& config) {
    validate(config);
    if (!entropy::kernels::select(config.kernel)) {
        throw std::invalid_argument("kernel \"" + config.kernel +
                                    "\" is not available on this machine");
    }

    data::EventDataset ds = data::load_dataset(config.dataset_dir);

    data::LintThresholds lint_thresholds;
    lint_thresholds.min_active_forks = config.lint_min_active_forks;
    lint_thresholds.min_issues = config.lint_min_issues;

    PipelineResult result;
    result.lint = data::lint_dataset(ds, lint_thresholds);

    std::vector<population::Snapshot> snapshots;
    bool cache_hit = false;
    if (config.snapshot_cache && std::filesystem::exists(*config.snapshot_cache)) {
        for (auto& cached : population::read_snapshot_cache(*config.snapshot_cache)) {
            snapshots.push_back(std::move(cached.snapshot));
        }
        cache_hit = true;
    } else {
        snapshots = population::build_snapshots(ds, parse_role_cutoff(config.role_cutoff));
    }
    if (config.snapshot_cache && !cache_hit) {
        std::vector<population::CachedSnapshot> cached;
        cached.reserve(snapshots.size());
        for (const auto& snapshot : snapshots) {
            cached.push_back(population::build_cached(ds, snapshot));
        }
        population::write_snapshot_cache(*config.snapshot_cache, cached);
    }

    result.rows = compute_project_metrics(ds, snapshots, metrics_config(config), config.jobs);

    analysis::RegressionTable raw;
    for (const auto& row : result.rows) {
        raw.rows.push_back(analysis::to_table_row(row));
    }
    result.exports = analysis::export_table(raw, config.out_dir, "metrics");

    result.lint_path = config.out_dir / "lint.json";
    {
        json findings = json::array();
        for (const auto& finding : result.lint) {
            findings.push_back(json{{"rule", finding.rule}, {"message", finding.message}});
        }
        std::ofstream out(result.lint_path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoFailure("cannot open " + result.lint_path.string() + " for writing");
        }
        out << findings.dump(2) << '\n';
    }

    result.charts = report::write_project_charts(raw, config.out_dir);
    return result;
}

}  // namespace forkent::pipeline
