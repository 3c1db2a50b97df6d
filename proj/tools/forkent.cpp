// forkent: command-line front end: fetch -> validate -> compute -> export,
// plus ad-hoc entropy queries, what-if analysis, and report rendering.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "forkent/analysis/table.hpp"
#include "forkent/entropy/entropy.hpp"
#include "forkent/entropy/kernels.hpp"
#include "forkent/errors.hpp"
#include "forkent/forge/client.hpp"
#include "forkent/io/matrix_io.hpp"
#include "forkent/pipeline.hpp"
#include "forkent/report/svg.hpp"

namespace {

using forkent::Error;
using nlohmann::json;

void print_error(const std::string& kind, const std::string& message,
                 const std::string& command) {
    json err{{"kind", kind}, {"message", message}, {"context", {{"command", command}}}};
    std::cerr << err.dump() << '\n';
}

int map_error_exit(const Error& e) {
    const std::string& kind = e.kind();
    if (kind == "rate_limited" || kind == "partial_fetch") {
        return 3;
    }
    if (kind == "dataset_not_found" || kind == "malformed_record" ||
        kind == "dangling_reference" || kind == "duplicate_key" || kind == "cycle_detected" ||
        kind == "empty_population" || kind == "degenerate_column" ||
        kind == "insufficient_data") {
        return 2;
    }
    return 1;
}

template <typename Fn>
int guarded(const std::string& command, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        print_error(e.kind(), e.what(), command);
        return map_error_exit(e);
    } catch (const std::exception& e) {
        print_error("error", e.what(), command);
        return 1;
    }
}

std::string pretty(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10f", v);
    return buf;
}

json correlations_json(const std::vector<forkent::analysis::CorrelationEntry>& entries) {
    json list = json::array();
    for (const auto& entry : entries) {
        json obj{{"outcome", entry.outcome}, {"n", entry.n}};
        obj["project"] = entry.project.empty() ? json(nullptr) : json(entry.project);
        obj["rho"] = entry.rho ? json(*entry.rho) : json(nullptr);
        list.push_back(std::move(obj));
    }
    return json{{"schema_version", 1}, {"correlations", std::move(list)}};
}

void write_correlations(const forkent::analysis::RegressionTable& table,
                        const std::filesystem::path& out_dir) {
    auto entries = forkent::analysis::correlation_summary(table);
    std::ofstream out(out_dir / "correlations.json", std::ios::binary | std::ios::trunc);
    if (!out) {
        throw forkent::IoFailure("cannot write correlations.json");
    }
    out << correlations_json(entries).dump(2) << '\n';
    for (const auto& entry : entries) {
        if (entry.project.empty()) {
            std::cout << "spearman " << entry.outcome << " vs fork_entropy: "
                      << (entry.rho ? forkent::analysis::format_value(*entry.rho)
                                    : std::string("undefined"))
                      << " (n=" << entry.n << ")\n";
        }
    }
}

// --config is applied before flag binding so explicit flags override it.
forkent::pipeline::RunConfig preload_config(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string_view(argv[i]) == "--config") {
            return forkent::pipeline::config_from_json_file(argv[i + 1]);
        }
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    forkent::pipeline::RunConfig cfg;
    try {
        cfg = preload_config(argc, argv);
    } catch (const Error& e) {
        print_error(e.kind(), e.what(), "config");
        return 2;
    } catch (const std::exception& e) {
        print_error("error", e.what(), "config");
        return 2;
    }

    CLI::App app{"fork-entropy mining toolkit"};
    app.require_subcommand(0, 1);

    bool print_config = false;
    std::string config_path;
    app.add_flag("--print-config", print_config, "Print the effective configuration and exit");
    app.add_option("--config", config_path, "JSON config file (flags override it)");
    app.add_option("--gamma", cfg.gamma, "Laplacian kernel sensitivity (> 0)");
    app.add_option("--hot-window-days", cfg.hot_window_days, "Hot-file trailing window in days");
    app.add_option("--outlier-fraction", cfg.outlier_fraction,
                   "Upper-tail outcome trim fraction");
    app.add_option("--jobs", cfg.jobs, "Parallel snapshot workers");
    app.add_option("--out", cfg.out_dir, "Output directory");
    app.add_option("--kernel", cfg.kernel, "Entropy kernel: auto|scalar|avx2");
    app.add_option("--role-cutoff", cfg.role_cutoff,
                   "Contributor role cutoff: interval_end|interval_start");
    app.add_option("--hot-ref", cfg.hot_ref,
                   "Hot-file reference point: interval_start|pr_created");

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "Load and lint a dataset directory");
    validate_cmd->fallthrough();
    std::string dataset_dir;
    validate_cmd->add_option("--dataset", dataset_dir, "Dataset directory")->required();
    validate_cmd->add_option("--lint-min-active-forks", cfg.lint_min_active_forks,
                             "Active-fork lint threshold");
    validate_cmd->add_option("--lint-min-issues", cfg.lint_min_issues, "Issue lint threshold");

    // compute
    auto* compute_cmd =
        app.add_subcommand("compute", "Snapshots, entropy, outcomes and controls -> metrics");
    compute_cmd->fallthrough();
    compute_cmd->add_option("--dataset", dataset_dir, "Dataset directory")->required();
    std::string cache_path;
    compute_cmd->add_option("--cache", cache_path,
                            "Snapshot cache NDJSON (reused when present, written otherwise)");
    compute_cmd->add_option("--lint-min-active-forks", cfg.lint_min_active_forks,
                            "Active-fork lint threshold");
    compute_cmd->add_option("--lint-min-issues", cfg.lint_min_issues, "Issue lint threshold");

    // entropy
    auto* entropy_cmd = app.add_subcommand("entropy", "Fork entropy of a matrix NDJSON file");
    entropy_cmd->fallthrough();
    std::string matrix_path;
    entropy_cmd->add_option("--matrix", matrix_path, "Matrix NDJSON file")->required();

    // what-if
    auto* whatif_cmd =
        app.add_subcommand("what-if", "Assess adding a new fork row to a matrix");
    whatif_cmd->fallthrough();
    whatif_cmd->add_option("--matrix", matrix_path, "Matrix NDJSON file")->required();
    std::string row_spec;
    whatif_cmd
        ->add_option("--row", row_spec,
                     "New row as JSON {\"fork_id\":...,\"cells\":{path:lines}} or @file")
        ->required();

    // export
    auto* export_cmd = app.add_subcommand(
        "export", "Prepare a raw metrics NDJSON into a regression-ready table");
    export_cmd->fallthrough();
    std::string metrics_path;
    export_cmd->add_option("--metrics", metrics_path, "Raw metrics NDJSON (from compute)")
        ->required();

    // report
    auto* report_cmd =
        app.add_subcommand("report", "Render per-project SVG charts and correlations");
    report_cmd->fallthrough();
    report_cmd->add_option("--metrics", metrics_path, "Metrics NDJSON (from compute)")
        ->required();

    // fetch
    auto* fetch_cmd = app.add_subcommand("fetch", "Populate a dataset directory from a forge API");
    fetch_cmd->fallthrough();
    forkent::forge::FetchPlan plan;
    std::string resources_csv = "forks,commits,pulls,issues,events,stars";
    std::string since_text, replay_dir, token_env = "FORKENT_GITHUB_TOKEN";
    fetch_cmd->add_option("--repo", plan.full_name, "owner/repo full name")->required();
    fetch_cmd->add_option("--api", plan.api_base_url, "API base url");
    fetch_cmd->add_option("--resources", resources_csv, "Comma-separated resource list");
    fetch_cmd->add_option("--since", since_text, "Only commits after this RFC 3339 instant");
    fetch_cmd->add_option("--max-requests", plan.max_requests, "Request budget (-1 unlimited)");
    fetch_cmd->add_option("--depth", plan.fork_depth,
                          "Transitive fork discovery depth (-1 = full)");
    fetch_cmd->add_option("--workers", plan.workers, "Bounded in-flight detail requests");
    fetch_cmd->add_option("--replay", replay_dir,
                          "Replay canned responses from this directory instead of the network");
    fetch_cmd->add_option("--token-env", token_env, "Environment variable holding the API token");

    CLI11_PARSE(app, argc, argv);

    if (print_config) {
        std::cout << forkent::pipeline::config_to_json(cfg) << '\n';
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cout << app.help();
        return 0;
    }

    if (validate_cmd->parsed()) {
        return guarded("validate", [&] {
            cfg.dataset_dir = dataset_dir;
            forkent::data::EventDataset ds = forkent::data::load_dataset(cfg.dataset_dir);
            forkent::data::LintThresholds thresholds;
            thresholds.min_active_forks = cfg.lint_min_active_forks;
            thresholds.min_issues = cfg.lint_min_issues;
            auto findings = forkent::data::lint_dataset(ds, thresholds);
            std::cout << "dataset ok: " << ds.forks.size() << " forks, " << ds.commits.size()
                      << " commits, " << ds.pulls.size() << " pulls, " << ds.issues.size()
                      << " issues\n";
            for (const auto& finding : findings) {
                std::cout << "lint[" << finding.rule << "] " << finding.message << '\n';
            }
            return 0;
        });
    }

    if (compute_cmd->parsed()) {
        return guarded("compute", [&] {
            cfg.dataset_dir = dataset_dir;
            if (!cache_path.empty()) {
                cfg.snapshot_cache = cache_path;
            }
            forkent::pipeline::PipelineResult result = forkent::pipeline::run_pipeline(cfg);
            std::cout << "kernel: " << forkent::entropy::kernels::active_name() << '\n';
            std::cout << "rows: " << result.rows.size() << '\n';
            std::cout << "metrics: " << result.exports.csv.string() << '\n';
            std::cout << "lint findings: " << result.lint.size() << " -> "
                      << result.lint_path.string() << '\n';
            for (const auto& chart : result.charts) {
                std::cout << "chart: " << chart.string() << '\n';
            }
            return 0;
        });
    }

    if (entropy_cmd->parsed()) {
        return guarded("entropy", [&] {
            if (!forkent::entropy::kernels::select(cfg.kernel)) {
                throw std::invalid_argument("kernel \"" + cfg.kernel + "\" unavailable");
            }
            auto matrix = forkent::io::read_matrix_ndjson(matrix_path);
            auto result = forkent::entropy::quadratic_entropy(matrix, cfg.gamma);
            std::cout << pretty(result.value) << '\n';
            return 0;
        });
    }

    if (whatif_cmd->parsed()) {
        return guarded("what-if", [&] {
            if (!forkent::entropy::kernels::select(cfg.kernel)) {
                throw std::invalid_argument("kernel \"" + cfg.kernel + "\" unavailable");
            }
            auto matrix = forkent::io::read_matrix_ndjson(matrix_path);
            std::string spec = row_spec;
            if (!spec.empty() && spec.front() == '@') {
                std::ifstream in(spec.substr(1));
                if (!in) {
                    throw forkent::IoFailure("cannot open row spec file " + spec.substr(1));
                }
                spec.assign(std::istreambuf_iterator<char>(in), {});
            }
            auto row = forkent::io::parse_row_spec(spec, matrix);
            auto assessment = forkent::entropy::classify_new_fork(matrix, row, cfg.gamma);
            std::cout << "mean_distance:  " << pretty(assessment.mean_distance) << '\n'
                      << "entropy_before: " << pretty(assessment.entropy_before) << '\n'
                      << "entropy_after:  " << pretty(assessment.entropy_after) << '\n'
                      << "delta_exact:    " << pretty(assessment.delta) << '\n'
                      << "delta_approx:   " << pretty(assessment.delta_approx) << '\n'
                      << "label:          " << forkent::entropy::to_string(assessment.label)
                      << '\n';
            return 0;
        });
    }

    if (export_cmd->parsed()) {
        return guarded("export", [&] {
            auto raw = forkent::analysis::read_table_ndjson(metrics_path);
            auto prepared = forkent::analysis::prepare_table(raw.rows, cfg.outlier_fraction);
            auto paths =
                forkent::analysis::export_table(prepared, cfg.out_dir, "prepared_metrics");
            write_correlations(prepared, cfg.out_dir);
            std::cout << "prepared rows: " << prepared.rows.size() << '\n';
            std::cout << "csv: " << paths.csv.string() << '\n';
            std::cout << "ndjson: " << paths.ndjson.string() << '\n';
            std::cout << "manifest: " << paths.manifest.string() << '\n';
            return 0;
        });
    }

    if (report_cmd->parsed()) {
        return guarded("report", [&] {
            auto table = forkent::analysis::read_table_ndjson(metrics_path);
            auto charts = forkent::report::write_project_charts(table, cfg.out_dir);
            write_correlations(table, cfg.out_dir);
            for (const auto& chart : charts) {
                std::cout << "chart: " << chart.string() << '\n';
            }
            return 0;
        });
    }

    if (fetch_cmd->parsed()) {
        return guarded("fetch", [&] {
            plan.resources.clear();
            std::stringstream ss(resources_csv);
            std::string item;
            while (std::getline(ss, item, ',')) {
                auto parsed = forkent::forge::parse_resource(item);
                if (!parsed) {
                    throw std::invalid_argument("unknown resource \"" + item + "\"");
                }
                plan.resources.insert(*parsed);
            }
            if (!since_text.empty()) {
                plan.since = forkent::parse_rfc3339(since_text);
            }
            if (const char* token = std::getenv(token_env.c_str()); token != nullptr) {
                plan.token = token;
            }
            std::unique_ptr<forkent::forge::HttpTransport> transport =
                replay_dir.empty() ? forkent::forge::make_live_transport()
                                   : forkent::forge::make_recorded_transport(replay_dir);
            forkent::forge::FetchReport report =
                forkent::forge::fetch(plan, cfg.out_dir, *transport);
            std::cout << "forks: " << report.forks << '\n'
                      << "commits: " << report.commits << '\n'
                      << "pulls: " << report.pulls << '\n'
                      << "issues: " << report.issues << '\n'
                      << "privileged_actions: " << report.privileged_actions << '\n'
                      << "stars: " << report.stars << '\n'
                      << "requests: " << report.requests_used << '\n';
            auto cache = forkent::forge::verify_cache(cfg.out_dir);
            for (const auto& finding : cache.findings) {
                std::cout << "cache: " << finding << '\n';
            }
            return 0;
        });
    }

    std::cout << app.help();
    return 0;
}
