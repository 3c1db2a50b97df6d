#pragma once

#include <optional>
#include <string>
#include <vector>

#include "forkent/data/dataset.hpp"
#include "forkent/entropy/matrix.hpp"
#include "forkent/time.hpp"

namespace forkent::population {

// When a fork owner's external/privileged role is evaluated.
enum class RoleCutoff { interval_end, interval_start };

struct PopulationEntry {
    std::string fork_id;
    std::vector<std::string> commit_shas;  // commits attributed to this fork in-interval
};

// One project calendar month [interval_start, interval_end) and the fork
// population active in it. Population may be empty; such months are kept
// here and dropped by the regression-table preparation.
struct Snapshot {
    std::string project_id;
    Timestamp interval_start = 0;
    Timestamp interval_end = 0;
    std::vector<PopulationEntry> population;

    MonthRef month() const { return month_of(interval_start); }
};

enum class Role { external, privileged };

struct ContributorRole {
    std::string user_id;
    std::string project_id;
    Timestamp as_of = 0;
    Role role = Role::external;
};

// `privileged` iff the user directly committed into the source repository
// or performed any recorded privileged action there strictly before as_of.
ContributorRole classify_contributor(const data::EventDataset& ds, const std::string& user_id,
                                     Timestamp as_of);

// One snapshot per calendar month from the source repository's creation
// month through the dataset's last event month. A fork joins a month's
// population when it has at least one attributed non-merge commit with
// file modifications in-interval and its owner is external at the cutoff.
// Commits shared between a fork and its descendants are attributed to the
// earliest-created fork carrying them.
std::vector<Snapshot> build_snapshots(const data::EventDataset& ds,
                                      RoleCutoff cutoff = RoleCutoff::interval_end);

// Full matrix: cell = sum of additions+deletions per file over the fork's
// attributed in-interval commits. Columns are the nonzero file paths,
// sorted. Throws EmptyPopulation.
entropy::FileModificationMatrix build_matrix(const data::EventDataset& ds,
                                             const Snapshot& snapshot);

// Pull-request-filtered variant: cells count only modifications carried by
// pull requests created in-interval from population forks; forks with no
// in-interval PR are dropped. Throws EmptyPopulation when nothing remains.
entropy::FileModificationMatrix build_pr_filtered_matrix(const data::EventDataset& ds,
                                                         const Snapshot& snapshot);

}  // namespace forkent::population
