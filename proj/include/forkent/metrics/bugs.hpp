#pragma once

#include "forkent/data/records.hpp"

namespace forkent::metrics {

// The bug-report keyword list, matched against Porter stems of title and
// label tokens.
inline constexpr const char* kBugKeywords[] = {"defect", "error",     "bug",   "issue",
                                               "mistake", "incorrect", "fault", "flaw"};

// Tokenize title and labels on non-alphanumeric boundaries, lowercase,
// Porter-stem; true iff any stemmed token equals a stemmed keyword.
bool is_bug_report(const data::IssueRecord& issue);

}  // namespace forkent::metrics
