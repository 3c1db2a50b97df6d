#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "forkent/data/records.hpp"

namespace forkent::data {

// Normalized, referentially checked event data for one project: the source
// repository plus everything observed around it. Immutable once loaded;
// shareable across threads.
struct EventDataset {
    std::string source_repo_id;
    std::string full_name;
    Timestamp created_at = 0;

    std::vector<ForkRecord> forks;
    std::vector<CommitRecord> commits;
    std::vector<PullRequestRecord> pulls;
    std::vector<IssueRecord> issues;
    std::vector<PrivilegedActionRecord> privileged_actions;
    std::vector<StarEvent> stars;

    // Latest timestamp across every record, or created_at when the dataset
    // holds no events.
    Timestamp last_event_at() const;
};

// Record-set equality (order-insensitive).
bool same_records(const EventDataset& a, const EventDataset& b);

// Reads the dataset directory (project.json + the six NDJSON files).
// Streaming per line, order-independent. Throws MalformedRecord,
// DanglingReference, DuplicateKey.
EventDataset load_dataset(const std::filesystem::path& dir);

// Writes the canonical on-disk form: records sorted by key, stable JSON
// field order. load_dataset(serialize_dataset(ds)) == ds.
void serialize_dataset(const EventDataset& ds, const std::filesystem::path& dir);

// All direct and transitive forks of the source repository, breadth-first,
// source excluded. Children are visited in (created_at, repo_id) order so
// the result does not depend on input file ordering. Throws CycleDetected.
std::vector<ForkRecord> fork_network(const EventDataset& ds);

struct LintFinding {
    std::string rule;
    std::string message;
};

struct LintThresholds {
    std::size_t min_active_forks = 100;
    std::size_t min_issues = 100;
    std::vector<std::string> name_keywords{"awesome", "homework", "assignment",
                                           "course",  "note",     "document"};
};

// Advisory screening against the data-collection criteria. Never fails.
std::vector<LintFinding> lint_dataset(const EventDataset& ds,
                                      const LintThresholds& thresholds = {});

}  // namespace forkent::data
