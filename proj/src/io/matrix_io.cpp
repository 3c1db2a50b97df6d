#include "forkent/io/matrix_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <vector>

#include <json.hpp>

#include "forkent/errors.hpp"

namespace forkent::io {

namespace {

using nlohmann::json;

std::map<std::string, std::uint64_t> parse_cells(const json& obj, const std::string& where) {
    auto it = obj.find("cells");
    if (it == obj.end() || !it->is_object()) {
        throw MalformedRecord(where, 0, "row needs a \"cells\" object");
    }
    std::map<std::string, std::uint64_t> cells;
    for (const auto& [path, value] : it->items()) {
        if (!value.is_number_integer() || value.get<std::int64_t>() <= 0) {
            throw MalformedRecord(where, 0,
                                  "cell \"" + path + "\" must be a positive integer");
        }
        cells[path] = value.get<std::uint64_t>();
    }
    if (cells.empty()) {
        throw MalformedRecord(where, 0, "row has no cells");
    }
    return cells;
}

}  // namespace

entropy::FileModificationMatrix read_matrix_ndjson(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoFailure("cannot open matrix file " + path.string());
    }
    std::string name = path.filename().string();

    std::vector<std::pair<std::string, std::map<std::string, std::uint64_t>>> parsed;
    std::map<std::string, std::uint32_t> column_of;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw MalformedRecord(name, line_no, std::string("invalid JSON: ") + e.what());
        }
        std::string fork_id = obj.value("fork_id", "");
        if (fork_id.empty()) {
            throw MalformedRecord(name, line_no, "row needs a \"fork_id\"");
        }
        auto cells = parse_cells(obj, name + ":" + std::to_string(line_no));
        for (const auto& [p, v] : cells) {
            column_of.emplace(p, 0);
        }
        parsed.emplace_back(std::move(fork_id), std::move(cells));
    }
    if (parsed.empty()) {
        throw MalformedRecord(name, 0, "matrix file holds no rows");
    }

    std::vector<std::string> paths;
    paths.reserve(column_of.size());
    for (auto& [p, col] : column_of) {
        col = std::uint32_t(paths.size());
        paths.push_back(p);
    }
    std::vector<entropy::FileModVector> rows;
    rows.reserve(parsed.size());
    for (auto& [fork_id, cells] : parsed) {
        std::vector<entropy::Cell> entries;
        entries.reserve(cells.size());
        for (const auto& [p, v] : cells) {
            entries.push_back({column_of.at(p), v});
        }
        rows.emplace_back(fork_id, std::move(entries));
    }
    return entropy::FileModificationMatrix(path.stem().string(), std::move(paths),
                                           std::move(rows));
}

entropy::FileModVector parse_row_spec(const std::string& json_text,
                                      const entropy::FileModificationMatrix& matrix) {
    json obj;
    try {
        obj = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw MalformedRecord("row-spec", 0, std::string("invalid JSON: ") + e.what());
    }
    std::string fork_id = obj.value("fork_id", "new-fork");
    auto cells = parse_cells(obj, "row-spec");

    std::map<std::string, std::uint32_t> column_of;
    for (std::uint32_t i = 0; i < matrix.file_count(); ++i) {
        column_of[matrix.file_paths()[i]] = i;
    }
    std::uint32_t next = std::uint32_t(matrix.file_count());
    for (const auto& [path, lines] : cells) {
        if (!column_of.count(path)) {
            column_of[path] = next++;
        }
    }

    std::vector<entropy::Cell> entries;
    for (const auto& [path, lines] : cells) {
        entries.push_back({column_of.at(path), lines});
    }
    std::sort(entries.begin(), entries.end(),
              [](const entropy::Cell& a, const entropy::Cell& b) { return a.column < b.column; });
    return entropy::FileModVector(fork_id, std::move(entries));
}

}  // namespace forkent::io
