#include "forkent/metrics/bugs.hpp"

#include <unordered_set>

#include "forkent/metrics/stemmer.hpp"

namespace forkent::metrics {

namespace {

const std::unordered_set<std::string>& keyword_stems() {
    static const std::unordered_set<std::string> stems = [] {
        std::unordered_set<std::string> s;
        for (const char* keyword : kBugKeywords) {
            s.insert(porter_stem(keyword));
        }
        return s;
    }();
    return stems;
}

bool any_token_matches(std::string_view text) {
    for (const std::string& token : tokenize_lower(text)) {
        if (keyword_stems().count(porter_stem(token))) {
            return true;
        }
    }
    return false;
}

}  // namespace

bool is_bug_report(const data::IssueRecord& issue) {
    if (any_token_matches(issue.title)) {
        return true;
    }
    for (const std::string& label : issue.labels) {
        if (any_token_matches(label)) {
            return true;
        }
    }
    return false;
}

}  // namespace forkent::metrics
