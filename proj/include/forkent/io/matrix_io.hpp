#pragma once

#include <filesystem>
#include <string>

#include "forkent/entropy/matrix.hpp"

namespace forkent::io {

// Ad-hoc matrix NDJSON: one row per line, cells keyed by file path.
//   {"fork_id":"a","cells":{"src/a.txt":1}}
// Columns are the sorted union of the paths.
entropy::FileModificationMatrix read_matrix_ndjson(const std::filesystem::path& path);

// Parses a row spec in the same shape against an existing matrix's file
// index; paths the matrix has not seen get fresh columns (appended in
// sorted order).
entropy::FileModVector parse_row_spec(const std::string& json_text,
                                      const entropy::FileModificationMatrix& matrix);

}  // namespace forkent::io
