#include "forkent/population/builder.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "forkent/errors.hpp"

namespace forkent::population {

namespace {

using data::CommitRecord;
using data::EventDataset;
using data::ForkRecord;

bool commit_has_modifications(const CommitRecord& c) {
    for (const auto& f : c.files) {
        if (f.additions + f.deletions > 0) {
            return true;
        }
    }
    return false;
}

bool is_merge(const CommitRecord& c) {
    return c.parent_count > 1;
}

// snapshot_ref "R0:2021-04"
std::string snapshot_ref(const Snapshot& s) {
    return s.project_id + ":" + month_label(s.month());
}

entropy::FileModificationMatrix assemble(const std::string& ref,
                                         const std::vector<std::pair<std::string, std::map<std::string, std::uint64_t>>>& fork_cells) {
    // Column ids follow the sorted distinct path set.
    std::map<std::string, std::uint32_t> column_of;
    for (const auto& [fork_id, cells] : fork_cells) {
        for (const auto& [path, lines] : cells) {
            column_of.emplace(path, 0);
        }
    }
    std::vector<std::string> paths;
    paths.reserve(column_of.size());
    for (auto& [path, col] : column_of) {
        col = static_cast<std::uint32_t>(paths.size());
        paths.push_back(path);
    }

    std::vector<entropy::FileModVector> rows;
    rows.reserve(fork_cells.size());
    for (const auto& [fork_id, cells] : fork_cells) {
        std::vector<entropy::Cell> entries;
        entries.reserve(cells.size());
        for (const auto& [path, lines] : cells) {
            entries.push_back({column_of.at(path), lines});
        }
        rows.emplace_back(fork_id, std::move(entries));
    }
    return entropy::FileModificationMatrix(ref, std::move(paths), std::move(rows));
}

}  // namespace

ContributorRole classify_contributor(const EventDataset& ds, const std::string& user_id,
                                     Timestamp as_of) {
    ContributorRole result{user_id, ds.source_repo_id, as_of, Role::external};
    for (const auto& commit : ds.commits) {
        if (commit.repo_id == ds.source_repo_id && commit.author_id == user_id &&
            commit.committed_at < as_of) {
            result.role = Role::privileged;
            return result;
        }
    }
    for (const auto& action : ds.privileged_actions) {
        if (action.repo_id == ds.source_repo_id && action.user_id == user_id &&
            action.occurred_at < as_of) {
            result.role = Role::privileged;
            return result;
        }
    }
    return result;
}

std::vector<Snapshot> build_snapshots(const EventDataset& ds, RoleCutoff cutoff) {
    const std::vector<ForkRecord> network = data::fork_network(ds);
    std::unordered_map<std::string, const ForkRecord*> fork_by_id;
    for (const ForkRecord& fork : network) {
        fork_by_id.emplace(fork.repo_id, &fork);
    }

    // Earliest time at which each user becomes privileged on the source
    // repository; one pass instead of per-user scans.
    std::unordered_map<std::string, Timestamp> privileged_since;
    auto note_privileged = [&privileged_since](const std::string& user, Timestamp at) {
        auto [it, inserted] = privileged_since.emplace(user, at);
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
    auto is_external = [&](const std::string& user, Timestamp as_of) {
        auto it = privileged_since.find(user);
        return it == privileged_since.end() || it->second >= as_of;
    };

    // Fork commits bucketed by month; only candidates that can enter a
    // matrix (non-merge, with actual line changes).
    std::unordered_map<std::string, std::vector<const CommitRecord*>> commits_by_fork;
    for (const auto& commit : ds.commits) {
        if (fork_by_id.count(commit.repo_id) && !is_merge(commit) &&
            commit_has_modifications(commit)) {
            commits_by_fork[commit.repo_id].push_back(&commit);
        }
    }

    std::vector<Snapshot> snapshots;
    MonthRef first = month_of(ds.created_at);
    MonthRef last = month_of(ds.last_event_at());
    for (MonthRef m = first;; m = next_month(m)) {
        Snapshot snap;
        snap.project_id = ds.source_repo_id;
        snap.interval_start = month_start(m);
        snap.interval_end = month_start(next_month(m));

        Timestamp role_at =
            cutoff == RoleCutoff::interval_end ? snap.interval_end : snap.interval_start;

        // Candidate forks: external owner, >= 1 qualifying in-interval commit.
        struct Candidate {
            const ForkRecord* fork;
            std::vector<const CommitRecord*> commits;
        };
        std::vector<Candidate> candidates;
        for (const ForkRecord& fork : network) {
            if (!is_external(fork.owner_id, role_at)) {
                continue;
            }
            auto it = commits_by_fork.find(fork.repo_id);
            if (it == commits_by_fork.end()) {
                continue;
            }
            Candidate cand{&fork, {}};
            for (const CommitRecord* commit : it->second) {
                if (commit->committed_at >= snap.interval_start &&
                    commit->committed_at < snap.interval_end) {
                    cand.commits.push_back(commit);
                }
            }
            if (!cand.commits.empty()) {
                candidates.push_back(std::move(cand));
            }
        }

        // A sha shared across forks (fork-of-fork history) counts once, for
        // the earliest-created fork carrying it.
        std::unordered_map<std::string, const ForkRecord*> sha_owner;
        for (const Candidate& cand : candidates) {
            for (const CommitRecord* commit : cand.commits) {
                auto [it, inserted] = sha_owner.emplace(commit->sha, cand.fork);
                if (!inserted) {
                    const ForkRecord* prev = it->second;
                    if (std::tie(cand.fork->created_at, cand.fork->repo_id) <
                        std::tie(prev->created_at, prev->repo_id)) {
                        it->second = cand.fork;
                    }
                }
            }
        }

        for (const Candidate& cand : candidates) {
            PopulationEntry entry;
            entry.fork_id = cand.fork->repo_id;
            for (const CommitRecord* commit : cand.commits) {
                if (sha_owner.at(commit->sha) == cand.fork) {
                    entry.commit_shas.push_back(commit->sha);
                }
            }
            if (!entry.commit_shas.empty()) {
                std::sort(entry.commit_shas.begin(), entry.commit_shas.end());
                snap.population.push_back(std::move(entry));
            }
        }
        std::sort(snap.population.begin(), snap.population.end(),
                  [](const PopulationEntry& a, const PopulationEntry& b) {
                      return a.fork_id < b.fork_id;
                  });

        snapshots.push_back(std::move(snap));
        if (m == last) {
            break;
        }
    }
    return snapshots;
}

entropy::FileModificationMatrix build_matrix(const EventDataset& ds, const Snapshot& snapshot) {
    if (snapshot.population.empty()) {
        throw EmptyPopulation("snapshot " + snapshot_ref(snapshot) + " has no fork population");
    }

    std::unordered_map<std::string, const CommitRecord*> commit_by_key;
    for (const auto& commit : ds.commits) {
        commit_by_key.emplace(commit.repo_id + "\n" + commit.sha, &commit);
    }

    std::vector<std::pair<std::string, std::map<std::string, std::uint64_t>>> fork_cells;
    for (const PopulationEntry& entry : snapshot.population) {
        std::map<std::string, std::uint64_t> cells;
        for (const std::string& sha : entry.commit_shas) {
            auto it = commit_by_key.find(entry.fork_id + "\n" + sha);
            if (it == commit_by_key.end()) {
                throw DanglingReference("snapshot commit", sha);
            }
            for (const auto& f : it->second->files) {
                std::uint64_t lines = std::uint64_t(f.additions) + f.deletions;
                if (lines > 0) {
                    cells[f.path] += lines;
                }
            }
        }
        fork_cells.emplace_back(entry.fork_id, std::move(cells));
    }
    return assemble(snapshot_ref(snapshot), fork_cells);
}

entropy::FileModificationMatrix build_pr_filtered_matrix(const EventDataset& ds,
                                                         const Snapshot& snapshot) {
    if (snapshot.population.empty()) {
        throw EmptyPopulation("snapshot " + snapshot_ref(snapshot) + " has no fork population");
    }

    std::unordered_set<std::string> population_forks;
    for (const PopulationEntry& entry : snapshot.population) {
        population_forks.insert(entry.fork_id);
    }

    std::map<std::string, std::map<std::string, std::uint64_t>> cells_by_fork;
    for (const auto& pr : ds.pulls) {
        if (pr.target_repo_id != ds.source_repo_id || !population_forks.count(pr.source_repo_id)) {
            continue;
        }
        if (pr.created_at < snapshot.interval_start || pr.created_at >= snapshot.interval_end) {
            continue;
        }
        auto& cells = cells_by_fork[pr.source_repo_id];
        for (const auto& f : pr.files) {
            std::uint64_t lines = std::uint64_t(f.additions) + f.deletions;
            if (lines > 0) {
                cells[f.path] += lines;
            }
        }
    }

    std::vector<std::pair<std::string, std::map<std::string, std::uint64_t>>> fork_cells;
    for (const PopulationEntry& entry : snapshot.population) {
        auto it = cells_by_fork.find(entry.fork_id);
        if (it != cells_by_fork.end() && !it->second.empty()) {
            fork_cells.emplace_back(entry.fork_id, std::move(it->second));
        }
    }
    if (fork_cells.empty()) {
        throw EmptyPopulation("snapshot " + snapshot_ref(snapshot) +
                              " has no pull-request-backed rows");
    }
    return assemble(snapshot_ref(snapshot) + ":pr", fork_cells);
}

}  // namespace forkent::population
