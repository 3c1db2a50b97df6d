#include "forkent/population/cache.hpp"

#include <fstream>

#include <json.hpp>

#include "forkent/errors.hpp"

namespace forkent::population {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

json matrix_json(const entropy::FileModificationMatrix& m) {
    json rows = json::array();
    for (const auto& row : m.rows()) {
        json entries = json::array();
        for (const auto& cell : row.entries()) {
            entries.push_back(json::array({cell.column, cell.changed_lines}));
        }
        rows.push_back(json{{"fork_id", row.fork_id()}, {"entries", std::move(entries)}});
    }
    std::vector<std::string> files(m.file_paths().begin(), m.file_paths().end());
    return json{{"snapshot_ref", m.snapshot_ref()}, {"files", files}, {"rows", std::move(rows)}};
}

entropy::FileModificationMatrix matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("files") || !j.contains("rows")) {
        throw MalformedRecord(where, 0, "matrix object needs \"files\" and \"rows\"");
    }
    std::vector<std::string> files = j["files"].get<std::vector<std::string>>();
    std::vector<entropy::FileModVector> rows;
    for (const json& r : j["rows"]) {
        std::vector<entropy::Cell> entries;
        for (const json& e : r["entries"]) {
            entries.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint64_t>()});
        }
        rows.emplace_back(r.value("fork_id", ""), std::move(entries));
    }
    return entropy::FileModificationMatrix(j.value("snapshot_ref", ""), std::move(files),
                                           std::move(rows));
}

}  // namespace

CachedSnapshot build_cached(const data::EventDataset& ds, const Snapshot& snapshot) {
    CachedSnapshot cached;
    cached.snapshot = snapshot;
    if (!snapshot.population.empty()) {
        cached.full = build_matrix(ds, snapshot);
        try {
            cached.pr_variant = build_pr_filtered_matrix(ds, snapshot);
        } catch (const EmptyPopulation&) {
        }
    }
    return cached;
}

void write_snapshot_cache(const std::filesystem::path& path,
                          const std::vector<CachedSnapshot>& snapshots) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoFailure("cannot open snapshot cache " + path.string() + " for writing");
    }
    for (const CachedSnapshot& cached : snapshots) {
        json population = json::array();
        for (const PopulationEntry& entry : cached.snapshot.population) {
            population.push_back(
                json{{"fork_id", entry.fork_id}, {"commit_shas", entry.commit_shas}});
        }
        json line{{"schema_version", kSchemaVersion},
                  {"project_id", cached.snapshot.project_id},
                  {"interval_start", format_rfc3339(cached.snapshot.interval_start)},
                  {"interval_end", format_rfc3339(cached.snapshot.interval_end)},
                  {"population", std::move(population)},
                  {"matrix", cached.full ? matrix_json(*cached.full) : json(nullptr)},
                  {"matrix_pr",
                   cached.pr_variant ? matrix_json(*cached.pr_variant) : json(nullptr)}};
        out << line.dump() << '\n';
    }
}

std::vector<CachedSnapshot> read_snapshot_cache(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoFailure("cannot open snapshot cache " + path.string());
    }
    std::string name = path.filename().string();
    std::vector<CachedSnapshot> snapshots;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw MalformedRecord(name, line_no, std::string("invalid JSON: ") + e.what());
        }
        if (obj.value("schema_version", -1) != kSchemaVersion) {
            throw MalformedRecord(name, line_no, "unsupported snapshot cache schema_version");
        }
        CachedSnapshot cached;
        cached.snapshot.project_id = obj.value("project_id", "");
        cached.snapshot.interval_start = parse_rfc3339(obj.at("interval_start").get<std::string>());
        cached.snapshot.interval_end = parse_rfc3339(obj.at("interval_end").get<std::string>());
        for (const json& entry : obj.value("population", json::array())) {
            cached.snapshot.population.push_back(
                {entry.value("fork_id", ""),
                 entry.value("commit_shas", std::vector<std::string>{})});
        }
        std::string where = name + ":" + std::to_string(line_no);
        if (obj.contains("matrix") && !obj["matrix"].is_null()) {
            cached.full = matrix_from_json(obj["matrix"], where);
        }
        if (obj.contains("matrix_pr") && !obj["matrix_pr"].is_null()) {
            cached.pr_variant = matrix_from_json(obj["matrix_pr"], where);
        }
        snapshots.push_back(std::move(cached));
    }
    return snapshots;
}

}  // namespace forkent::population
