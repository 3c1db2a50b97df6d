#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forkent/data/dataset.hpp"

namespace forkent::metrics {

enum class MergeReason { forge_merged_action, closing_commit_phrase, comment_commit_reference,
                         not_merged };

std::string_view to_string(MergeReason reason);

struct MergeVerdict {
    std::int64_t pr_id = 0;
    bool merged = false;
    MergeReason reason = MergeReason::not_merged;
};

// Source-repository commit history prepared for the merge heuristics:
// the sha set (sorted, for abbreviated-sha prefix lookups) and the PR
// numbers referenced by closing phrases in commit messages.
class SourceHistory {
 public:
    explicit SourceHistory(const data::EventDataset& ds);

    // True when `abbrev` (7..40 lowercase hex chars) is a prefix of some
    // commit sha in the source repository.
    bool contains_sha_prefix(const std::string& abbrev) const;

    bool has_closing_commit_for(std::int64_t pr_number) const;

 private:
    std::vector<std::string> shas_;                 // sorted
    std::vector<std::int64_t> closed_pr_numbers_;   // sorted
};

// The heuristic chain, in priority order: forge merged action, closing
// commit phrase ("fixes #N" family), merge-indicating comment naming a
// commit that exists in source history. Throws OpenPullRequest when the
// pull request has no closed_at.
MergeVerdict detect_merged(const data::PullRequestRecord& pr, const SourceHistory& history);

}  // namespace forkent::metrics
