#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "forkent/data/dataset.hpp"
#include "forkent/metrics/merge.hpp"
#include "forkent/population/builder.hpp"

namespace forkent::metrics {

// Reference point for the hot-file window when computing the monthly
// RatioPRsTouchHotFiles: the snapshot start (default) or each pull
// request's own creation time.
enum class HotFileRef { interval_start, pr_created };

struct MetricsConfig {
    double gamma = 1.0;
    int hot_window_days = 90;
    HotFileRef hot_ref = HotFileRef::interval_start;
    population::RoleCutoff role_cutoff = population::RoleCutoff::interval_end;
};

// One project-month of outcomes and controls; the unit of the exported
// regression table. Undefined ratios stay empty, never zero-filled.
struct SnapshotMetrics {
    std::string project_id;
    std::string month;  // "YYYY-MM"
    std::optional<double> fork_entropy;
    std::optional<double> fork_entropy_pr_variant;
    std::int64_t external_productivity = 0;
    std::int64_t prs_merged = 0;
    std::int64_t prs_closed = 0;
    std::optional<double> acceptance_rate;
    std::int64_t bug_reports = 0;
    std::int64_t num_forks = 0;
    std::int64_t num_files = 0;
    std::int64_t project_age_days = 0;
    std::int64_t num_stars = 0;
    std::optional<double> ratio_old_contributors;
    std::optional<double> ratio_prs_with_tests;
    std::optional<double> ratio_prs_touch_hot_files;
};

struct AcceptanceRate {
    std::int64_t merged = 0;
    std::int64_t closed = 0;
    std::optional<double> rate;  // empty when closed == 0
};

// Immutable per-dataset indexes (verdicts, sha sets, merged-PR timeline)
// shared read-only by any number of snapshot computations.
class MetricsContext {
 public:
    explicit MetricsContext(const data::EventDataset& ds, MetricsConfig cfg = {});

    const data::EventDataset& dataset() const { return ds_; }
    const MetricsConfig& config() const { return cfg_; }
    const SourceHistory& source_history() const { return history_; }

    // Cached verdict; pr must be closed.
    MergeVerdict verdict_for(const data::PullRequestRecord& pr) const;

    bool external_at(const std::string& user_id, Timestamp as_of) const;

    // A pull request from an external contributor's fork into the source
    // repository, judged at `role_at`.
    bool is_external_pr(const data::PullRequestRecord& pr, Timestamp role_at) const;

    // Distinct commit shas carried by merged external PRs closed in-interval.
    std::int64_t external_productivity(const population::Snapshot& snapshot) const;

    AcceptanceRate acceptance_rate(const population::Snapshot& snapshot) const;

    std::int64_t count_bug_reports(const population::Snapshot& snapshot) const;

    // Paths modified by merged PRs closed within [at - window, at).
    std::set<std::string> hot_files(Timestamp at) const;

    // The full metrics row, including both entropy variants and controls.
    SnapshotMetrics compute(const population::Snapshot& snapshot) const;

 private:
    Timestamp role_cutoff_time(const population::Snapshot& snapshot) const;

    const data::EventDataset& ds_;
    MetricsConfig cfg_;
    SourceHistory history_;
    std::unordered_map<std::int64_t, MergeVerdict> verdicts_;
    std::unordered_map<std::string, Timestamp> privileged_since_;
    std::unordered_map<std::string, std::vector<Timestamp>> merged_closed_by_author_;
    std::vector<const data::PullRequestRecord*> merged_closed_;  // by closed_at
    std::set<std::string> fork_ids_;
};

}  // namespace forkent::metrics
