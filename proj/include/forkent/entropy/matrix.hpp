#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace forkent::entropy {

// One matrix cell: (column id, changed-line count). Counts are always >= 1;
// zero cells are simply absent.
struct Cell {
    std::uint32_t column = 0;
    std::uint64_t changed_lines = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
};

// A fork's sparse row of per-file changed-line counts within one snapshot.
// Entries are strictly sorted by column with no duplicates and no zeros;
// an empty row is invalid (a fork enters the population only by modifying
// at least one file).
class FileModVector {
 public:
    FileModVector(std::string fork_id, std::vector<Cell> entries);

    const std::string& fork_id() const { return fork_id_; }
    std::span<const Cell> entries() const { return entries_; }
    std::size_t nnz() const { return entries_.size(); }

    friend bool operator==(const FileModVector& a, const FileModVector& b) {
        return a.fork_id_ == b.fork_id_ && a.entries_ == b.entries_;
    }

 private:
    std::string fork_id_;
    std::vector<Cell> entries_;
};

// L1 distance over the union of both supports; absent entries read as 0.
// Exact (integer) by construction.
std::uint64_t l1_distance(const FileModVector& a, const FileModVector& b);

// The fork population's stacked rows for one snapshot plus the file-path
// index (column j <-> file_paths()[j]). Every column is touched by at least
// one row and every row references only known columns.
class FileModificationMatrix {
 public:
    FileModificationMatrix(std::string snapshot_ref, std::vector<std::string> file_paths,
                           std::vector<FileModVector> rows);

    const std::string& snapshot_ref() const { return snapshot_ref_; }
    std::span<const FileModVector> rows() const { return rows_; }
    std::span<const std::string> file_paths() const { return file_paths_; }
    std::size_t fork_count() const { return rows_.size(); }
    std::size_t file_count() const { return file_paths_.size(); }

 private:
    std::string snapshot_ref_;
    std::vector<std::string> file_paths_;
    std::vector<FileModVector> rows_;
};

}  // namespace forkent::entropy
