#pragma once

#include <stdexcept>
#include <string>

namespace forkent {

// Base class for all toolkit errors. `kind()` is a stable machine-readable
// tag used by the CLI's JSON error output and exit-code mapping.
class Error : public std::runtime_error {
 public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const { return kind_; }

 private:
    std::string kind_;
};

// Dataset validation failures (exit code 2 in the CLI).
class DatasetError : public Error {
 public:
    using Error::Error;
};

class MalformedRecord : public DatasetError {
 public:
    MalformedRecord(const std::string& file, std::size_t line, const std::string& reason)
        : DatasetError("malformed_record",
                       file + ":" + std::to_string(line) + ": " + reason),
          line_(line) {}

    std::size_t line() const { return line_; }

 private:
    std::size_t line_;
};

class DanglingReference : public DatasetError {
 public:
    DanglingReference(const std::string& kind, const std::string& id)
        : DatasetError("dangling_reference", kind + " references unknown id \"" + id + "\"") {}
};

class DuplicateKey : public DatasetError {
 public:
    DuplicateKey(const std::string& kind, const std::string& id)
        : DatasetError("duplicate_key", "duplicate " + kind + " key \"" + id + "\"") {}
};

class CycleDetected : public DatasetError {
 public:
    explicit CycleDetected(const std::string& repo_id)
        : DatasetError("cycle_detected", "fork parent links cycle through \"" + repo_id + "\"") {}
};

class EmptyPopulation : public Error {
 public:
    explicit EmptyPopulation(const std::string& what)
        : Error("empty_population", what) {}
};

class OpenPullRequest : public Error {
 public:
    explicit OpenPullRequest(std::int64_t pr_id)
        : Error("open_pull_request",
                "pull request #" + std::to_string(pr_id) + " has no closed_at; only closed "
                "pull requests can be judged") {}
};

class DegenerateColumn : public Error {
 public:
    explicit DegenerateColumn(const std::string& column)
        : Error("degenerate_column", "column \"" + column + "\" has zero variance") {}
};

class InsufficientData : public Error {
 public:
    explicit InsufficientData(const std::string& what) : Error("insufficient_data", what) {}
};

class IoFailure : public Error {
 public:
    explicit IoFailure(const std::string& what) : Error("io_failure", what) {}
};

// Forge client errors (exit code 3 when a fetch is interrupted part-way).
class RateLimited : public Error {
 public:
    explicit RateLimited(long retry_after_seconds)
        : Error("rate_limited", "rate limited; retry after " +
                                    std::to_string(retry_after_seconds) + "s"),
          retry_after_(retry_after_seconds) {}

    long retry_after() const { return retry_after_; }

 private:
    long retry_after_;
};

class AuthFailure : public Error {
 public:
    explicit AuthFailure(const std::string& what) : Error("auth_failure", what) {}
};

class UpstreamSchemaChange : public Error {
 public:
    explicit UpstreamSchemaChange(const std::string& field)
        : Error("upstream_schema_change", "unexpected upstream payload, missing \"" + field + "\"") {}
};

class PartialFetch : public Error {
 public:
    PartialFetch(const std::string& resource, const std::string& cursor)
        : Error("partial_fetch", "fetch of " + resource + " interrupted at cursor " + cursor) {}
};

}  // namespace forkent
