#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forkent/time.hpp"

namespace forkent::data {

struct ForkRecord {
    std::string repo_id;
    std::string full_name;
    std::string owner_id;
    std::string parent_repo_id;  // the forked_from repo (source or another fork)
    Timestamp created_at = 0;

    friend bool operator==(const ForkRecord&, const ForkRecord&) = default;
};

struct FileChange {
    std::string path;
    std::uint32_t additions = 0;
    std::uint32_t deletions = 0;

    friend bool operator==(const FileChange&, const FileChange&) = default;
};

struct CommitRecord {
    std::string sha;  // 40-hex
    std::string repo_id;
    std::string author_id;
    Timestamp committed_at = 0;
    std::uint32_t parent_count = 0;
    std::vector<FileChange> files;  // may be empty (e.g. empty merges)
    std::string message;

    friend bool operator==(const CommitRecord&, const CommitRecord&) = default;
};

struct PullRequestRecord {
    std::int64_t pr_id = 0;
    std::string source_repo_id;  // the fork the PR comes from
    std::string target_repo_id;  // the source repository
    std::string author_id;
    Timestamp created_at = 0;
    std::optional<Timestamp> closed_at;
    bool merged_action = false;  // forge-reported merge event
    std::vector<std::string> commit_shas;
    std::vector<FileChange> files;
    std::vector<std::string> last_comments;  // up to 3, newest last

    friend bool operator==(const PullRequestRecord&, const PullRequestRecord&) = default;
};

struct IssueRecord {
    std::string issue_id;
    std::string title;
    std::vector<std::string> labels;
    Timestamp created_at = 0;
    std::string author_id;

    friend bool operator==(const IssueRecord&, const IssueRecord&) = default;
};

enum class PrivilegedKind { direct_commit, close_issue_of_other, close_pr_of_other, merge_pr };

std::string_view to_string(PrivilegedKind kind);
std::optional<PrivilegedKind> parse_privileged_kind(std::string_view text);

struct PrivilegedActionRecord {
    std::string user_id;
    std::string repo_id;
    PrivilegedKind action_kind = PrivilegedKind::direct_commit;
    Timestamp occurred_at = 0;

    friend bool operator==(const PrivilegedActionRecord&, const PrivilegedActionRecord&) = default;
};

struct StarEvent {
    Timestamp starred_at = 0;

    friend bool operator==(const StarEvent&, const StarEvent&) = default;
};

}  // namespace forkent::data
