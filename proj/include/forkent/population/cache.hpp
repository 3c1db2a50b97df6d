#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "forkent/population/builder.hpp"

namespace forkent::population {

// A snapshot together with its built matrices (either may be absent: empty
// population / no PR-carried rows).
struct CachedSnapshot {
    Snapshot snapshot;
    std::optional<entropy::FileModificationMatrix> full;
    std::optional<entropy::FileModificationMatrix> pr_variant;
};

CachedSnapshot build_cached(const data::EventDataset& ds, const Snapshot& snapshot);

// One NDJSON line per snapshot, schema_version-tagged, deterministic bytes.
void write_snapshot_cache(const std::filesystem::path& path,
                          const std::vector<CachedSnapshot>& snapshots);

std::vector<CachedSnapshot> read_snapshot_cache(const std::filesystem::path& path);

}  // namespace forkent::population
