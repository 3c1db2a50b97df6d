#include "forkent/metrics/merge.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "forkent/errors.hpp"

namespace forkent::metrics {

namespace {

// Both patterns run case-insensitively. The comment pattern is the
// footnoted merge-indication regex verbatim.
const std::regex& closing_phrase_re() {
    static const std::regex re(
        R"(\b(clos(e|es|ed)|fix(es|ed)?|resolv(e|es|ed))\b[[:space:]:]*#([0-9]+))",
        std::regex::ECMAScript | std::regex::icase);
    return re;
}

const std::regex& merge_comment_re() {
    static const std::regex re(
        R"((merg|apply|appl|pull|push|integrat|land|cherry(-|\s+)pick|squash)(ing|i?ed))",
        std::regex::ECMAScript | std::regex::icase);
    return re;
}

const std::regex& sha_ref_re() {
    static const std::regex re(R"(\b[0-9a-f]{7,40}\b)",
                               std::regex::ECMAScript | std::regex::icase);
    return re;
}

std::string lowercase(std::string s) {
    for (char& c : s) {
        c = char(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

}  // namespace

std::string_view to_string(MergeReason reason) {
    switch (reason) {
        case MergeReason::forge_merged_action:
            return "forge_merged_action";
        case MergeReason::closing_commit_phrase:
            return "closing_commit_phrase";
        case MergeReason::comment_commit_reference:
            return "comment_commit_reference";
        case MergeReason::not_merged:
            return "not_merged";
    }
    return "not_merged";
}

SourceHistory::SourceHistory(const data::EventDataset& ds) {
    for (const auto& commit : ds.commits) {
        if (commit.repo_id != ds.source_repo_id) {
            continue;
        }
        shas_.push_back(commit.sha);
        auto begin = std::sregex_iterator(commit.message.begin(), commit.message.end(),
                                          closing_phrase_re());
        for (auto it = begin; it != std::sregex_iterator(); ++it) {
            try {
                closed_pr_numbers_.push_back(std::stoll((*it)[5].str()));
            } catch (const std::out_of_range&) {
                // absurdly long number; not a PR reference
            }
        }
    }
    std::sort(shas_.begin(), shas_.end());
    std::sort(closed_pr_numbers_.begin(), closed_pr_numbers_.end());
}

bool SourceHistory::contains_sha_prefix(const std::string& abbrev) const {
    auto it = std::lower_bound(shas_.begin(), shas_.end(), abbrev);
    if (it != shas_.end() && it->compare(0, abbrev.size(), abbrev) == 0) {
        return true;
    }
    return false;
}

bool SourceHistory::has_closing_commit_for(std::int64_t pr_number) const {
    return std::binary_search(closed_pr_numbers_.begin(), closed_pr_numbers_.end(), pr_number);
}

MergeVerdict detect_merged(const data::PullRequestRecord& pr, const SourceHistory& history) {
    if (!pr.closed_at) {
        throw OpenPullRequest(pr.pr_id);
    }

    MergeVerdict verdict;
    verdict.pr_id = pr.pr_id;

    if (pr.merged_action) {
        verdict.merged = true;
        verdict.reason = MergeReason::forge_merged_action;
        return verdict;
    }

    if (history.has_closing_commit_for(pr.pr_id)) {
        verdict.merged = true;
        verdict.reason = MergeReason::closing_commit_phrase;
        return verdict;
    }

    for (const std::string& comment : pr.last_comments) {
        if (!std::regex_search(comment, merge_comment_re())) {
            continue;
        }
        auto begin = std::sregex_iterator(comment.begin(), comment.end(), sha_ref_re());
        for (auto it = begin; it != std::sregex_iterator(); ++it) {
            if (history.contains_sha_prefix(lowercase(it->str()))) {
                verdict.merged = true;
                verdict.reason = MergeReason::comment_commit_reference;
                return verdict;
            }
        }
    }
    return verdict;
}

}  // namespace forkent::metrics
