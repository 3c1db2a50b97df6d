#include "forkent/metrics/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "forkent/entropy/entropy.hpp"
#include "forkent/errors.hpp"
#include "forkent/metrics/bugs.hpp"

namespace forkent::metrics {

namespace {

bool in_interval(Timestamp t, const population::Snapshot& s) {
    return t >= s.interval_start && t < s.interval_end;
}

bool path_mentions_test(const std::string& path) {
    static constexpr std::string_view needle = "test";
    if (path.size() < needle.size()) {
        return false;
    }
    for (std::size_t i = 0; i + needle.size() <= path.size(); ++i) {
        bool hit = true;
        for (std::size_t j = 0; j < needle.size(); ++j) {
            if (std::tolower(static_cast<unsigned char>(path[i + j])) != needle[j]) {
                hit = false;
                break;
            }
        }
        if (hit) {
            return true;
        }
    }
    return false;
}

}  // namespace

MetricsContext::MetricsContext(const data::EventDataset& ds, MetricsConfig cfg)
    : ds_(ds), cfg_(cfg), history_(ds) {
    for (const auto& fork : ds.forks) {
        fork_ids_.insert(fork.repo_id);
    }

    auto note_privileged = [this](const std::string& user, Timestamp at) {
        auto [it, inserted] = privileged_since_.emplace(user, at);
        if (!inserted && at < it->second) {
            it->second = at;
        }
    };
    for (const auto& commit : ds.commits) {
        if (commit.repo_id == ds.source_repo_id) {
            note_privileged(commit.author_id, commit.committed_at);
        }
    }
    for (const auto& action : ds.privileged_actions) {
        if (action.repo_id == ds.source_repo_id) {
            note_privileged(action.user_id, action.occurred_at);
        }
    }

    for (const auto& pr : ds.pulls) {
        if (!pr.closed_at) {
            continue;
        }
        MergeVerdict verdict = detect_merged(pr, history_);
        verdicts_.emplace(pr.pr_id, verdict);
        if (verdict.merged) {
            merged_closed_.push_back(&pr);
            merged_closed_by_author_[pr.author_id].push_back(*pr.closed_at);
        }
    }
    std::sort(merged_closed_.begin(), merged_closed_.end(),
              [](const auto* a, const auto* b) { return *a->closed_at < *b->closed_at; });
    for (auto& [author, times] : merged_closed_by_author_) {
        std::sort(times.begin(), times.end());
    }
}

MergeVerdict MetricsContext::verdict_for(const data::PullRequestRecord& pr) const {
    auto it = verdicts_.find(pr.pr_id);
    if (it == verdicts_.end()) {
        throw OpenPullRequest(pr.pr_id);
    }
    return it->second;
}

bool MetricsContext::external_at(const std::string& user_id, Timestamp as_of) const {
    auto it = privileged_since_.find(user_id);
    return it == privileged_since_.end() || it->second >= as_of;
}

bool MetricsContext::is_external_pr(const data::PullRequestRecord& pr, Timestamp role_at) const {
    return pr.target_repo_id == ds_.source_repo_id && fork_ids_.count(pr.source_repo_id) > 0 &&
           external_at(pr.author_id, role_at);
}

Timestamp MetricsContext::role_cutoff_time(const population::Snapshot& snapshot) const {
    return cfg_.role_cutoff == population::RoleCutoff::interval_end ? snapshot.interval_end
                                                                    : snapshot.interval_start;
}

std::int64_t MetricsContext::external_productivity(const population::Snapshot& snapshot) const {
    Timestamp role_at = role_cutoff_time(snapshot);
    std::unordered_set<std::string> shas;
    for (const auto& pr : ds_.pulls) {
        if (!pr.closed_at || !in_interval(*pr.closed_at, snapshot) ||
            !is_external_pr(pr, role_at) || !verdict_for(pr).merged) {
            continue;
        }
        shas.insert(pr.commit_shas.begin(), pr.commit_shas.end());
    }
    return std::int64_t(shas.size());
}

AcceptanceRate MetricsContext::acceptance_rate(const population::Snapshot& snapshot) const {
    Timestamp role_at = role_cutoff_time(snapshot);
    AcceptanceRate result;
    for (const auto& pr : ds_.pulls) {
        if (!pr.closed_at || !in_interval(*pr.closed_at, snapshot) ||
            !is_external_pr(pr, role_at)) {
            continue;
        }
        ++result.closed;
        if (verdict_for(pr).merged) {
            ++result.merged;
        }
    }
    if (result.closed > 0) {
        result.rate = double(result.merged) / double(result.closed);
    }
    return result;
}

std::int64_t MetricsContext::count_bug_reports(const population::Snapshot& snapshot) const {
    std::int64_t count = 0;
    for (const auto& issue : ds_.issues) {
        if (in_interval(issue.created_at, snapshot) && is_bug_report(issue)) {
            ++count;
        }
    }
    return count;
}

std::set<std::string> MetricsContext::hot_files(Timestamp at) const {
    Timestamp window_start = at - Timestamp(cfg_.hot_window_days) * kSecondsPerDay;
    std::set<std::string> paths;
    for (const auto* pr : merged_closed_) {
        Timestamp closed = *pr->closed_at;
        if (closed < window_start) {
            continue;
        }
        if (closed >= at) {
            break;  // merged_closed_ is sorted by closed_at
        }
        for (const auto& f : pr->files) {
            paths.insert(f.path);
        }
    }
    return paths;
}

SnapshotMetrics MetricsContext::compute(const population::Snapshot& snapshot) const {
    SnapshotMetrics row;
    row.project_id = ds_.full_name;
    row.month = month_label(snapshot.month());

    if (!snapshot.population.empty()) {
        entropy::FileModificationMatrix full = population::build_matrix(ds_, snapshot);
        entropy::EntropyResult h = entropy::quadratic_entropy(full, cfg_.gamma);
        row.fork_entropy = h.value;
        row.num_forks = std::int64_t(full.fork_count());
        row.num_files = std::int64_t(full.file_count());
        try {
            entropy::FileModificationMatrix pr_matrix =
                population::build_pr_filtered_matrix(ds_, snapshot);
            row.fork_entropy_pr_variant = entropy::quadratic_entropy(pr_matrix, cfg_.gamma).value;
        } catch (const EmptyPopulation&) {
            // no PR-carried modifications this month
        }
    }

    row.external_productivity = external_productivity(snapshot);
    AcceptanceRate acceptance = acceptance_rate(snapshot);
    row.prs_merged = acceptance.merged;
    row.prs_closed = acceptance.closed;
    row.acceptance_rate = acceptance.rate;
    row.bug_reports = count_bug_reports(snapshot);

    row.project_age_days = (snapshot.interval_end - ds_.created_at) / kSecondsPerDay;
    row.num_stars = std::int64_t(std::count_if(
        ds_.stars.begin(), ds_.stars.end(),
        [&](const data::StarEvent& s) { return s.starred_at < snapshot.interval_end; }));

    // The month's external PRs (created in-interval) drive the three ratios.
    Timestamp role_at = role_cutoff_time(snapshot);
    std::vector<const data::PullRequestRecord*> month_prs;
    for (const auto& pr : ds_.pulls) {
        if (in_interval(pr.created_at, snapshot) && is_external_pr(pr, role_at)) {
            month_prs.push_back(&pr);
        }
    }

    if (!month_prs.empty()) {
        std::set<std::string> authors;
        for (const auto* pr : month_prs) {
            authors.insert(pr->author_id);
        }
        std::int64_t old_authors = 0;
        for (const std::string& author : authors) {
            auto it = merged_closed_by_author_.find(author);
            if (it != merged_closed_by_author_.end() && !it->second.empty() &&
                it->second.front() < snapshot.interval_start) {
                ++old_authors;
            }
        }
        row.ratio_old_contributors = double(old_authors) / double(authors.size());

        std::int64_t with_tests = 0;
        std::int64_t touch_hot = 0;
        std::set<std::string> hot = cfg_.hot_ref == HotFileRef::interval_start
                                        ? hot_files(snapshot.interval_start)
                                        : std::set<std::string>{};
        for (const auto* pr : month_prs) {
            bool has_test = false;
            for (const auto& f : pr->files) {
                if (path_mentions_test(f.path)) {
                    has_test = true;
                    break;
                }
            }
            with_tests += has_test ? 1 : 0;

            std::set<std::string> per_pr_hot;
            const std::set<std::string>* reference = &hot;
            if (cfg_.hot_ref == HotFileRef::pr_created) {
                per_pr_hot = hot_files(pr->created_at);
                reference = &per_pr_hot;
            }
            bool hits_hot = false;
            for (const auto& f : pr->files) {
                if (reference->count(f.path)) {
                    hits_hot = true;
                    break;
                }
            }
            touch_hot += hits_hot ? 1 : 0;
        }
        row.ratio_prs_with_tests = double(with_tests) / double(month_prs.size());
        row.ratio_prs_touch_hot_files = double(touch_hot) / double(month_prs.size());
    }

    return row;
}

}  // namespace forkent::metrics
