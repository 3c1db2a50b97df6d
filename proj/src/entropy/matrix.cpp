#include "forkent/entropy/matrix.hpp"

#include <stdexcept>

namespace forkent::entropy {

FileModVector::FileModVector(std::string fork_id, std::vector<Cell> entries)
    : fork_id_(std::move(fork_id)), entries_(std::move(entries)) {
    if (entries_.empty()) {
        throw std::invalid_argument("FileModVector \"" + fork_id_ + "\": no entries");
    }
    std::uint32_t prev = 0;
    bool first = true;
    for (const Cell& cell : entries_) {
        if (cell.changed_lines == 0) {
            throw std::invalid_argument("FileModVector \"" + fork_id_ +
                                        "\": zero changed_lines at column " +
                                        std::to_string(cell.column));
        }
        if (!first && cell.column <= prev) {
            throw std::invalid_argument("FileModVector \"" + fork_id_ +
                                        "\": entries not strictly sorted by column");
        }
        prev = cell.column;
        first = false;
    }
}

std::uint64_t l1_distance(const FileModVector& a, const FileModVector& b) {
    std::span<const Cell> lhs = a.entries(), rhs = b.entries();
    std::size_t i = 0, j = 0;
    std::uint64_t total = 0;
    while (i < lhs.size() && j < rhs.size()) {
        if (lhs[i].column == rhs[j].column) {
            std::uint64_t x = lhs[i].changed_lines, y = rhs[j].changed_lines;
            total += x > y ? x - y : y - x;
            ++i;
            ++j;
        } else if (lhs[i].column < rhs[j].column) {
            total += lhs[i].changed_lines;
            ++i;
        } else {
            total += rhs[j].changed_lines;
            ++j;
        }
    }
    for (; i < lhs.size(); ++i) {
        total += lhs[i].changed_lines;
    }
    for (; j < rhs.size(); ++j) {
        total += rhs[j].changed_lines;
    }
    return total;
}

FileModificationMatrix::FileModificationMatrix(std::string snapshot_ref,
                                               std::vector<std::string> file_paths,
                                               std::vector<FileModVector> rows)
    : snapshot_ref_(std::move(snapshot_ref)),
      file_paths_(std::move(file_paths)),
      rows_(std::move(rows)) {
    if (rows_.empty()) {
        throw std::invalid_argument("FileModificationMatrix \"" + snapshot_ref_ + "\": no rows");
    }
    std::vector<bool> touched(file_paths_.size(), false);
    for (const FileModVector& row : rows_) {
        for (const Cell& cell : row.entries()) {
            if (cell.column >= file_paths_.size()) {
                throw std::invalid_argument("FileModificationMatrix \"" + snapshot_ref_ +
                                            "\": row \"" + row.fork_id() +
                                            "\" references column " +
                                            std::to_string(cell.column) +
                                            " outside the file index");
            }
            touched[cell.column] = true;
        }
    }
    for (std::size_t col = 0; col < touched.size(); ++col) {
        if (!touched[col]) {
            throw std::invalid_argument("FileModificationMatrix \"" + snapshot_ref_ +
                                        "\": all-zero column \"" + file_paths_[col] + "\"");
        }
    }
}

}  // namespace forkent::entropy
