#include <doctest.h>
#include <algorithm>
#include <fstream>

#include <filesystem>

#include "forkent/data/dataset.hpp"
#include "forkent/entropy/entropy.hpp"
#include "forkent/errors.hpp"
#include "forkent/population/builder.hpp"
#include "forkent/population/cache.hpp"
#include "support/oracles.hpp"

using namespace forkent;
namespace fs = std::filesystem;

namespace {

const fs::path kFixture = fs::path(FORKENT_FIXTURE_DIR) / "mini-project";

const data::EventDataset& dataset() {
    static data::EventDataset ds = data::load_dataset(kFixture);
    return ds;
}

std::string sha_tag(const std::string& tag) {
    std::string s(40 - tag.size(), '0');
    return s + tag;
}

}  // namespace

TEST_CASE("classify_contributor role rules") {
    const auto& ds = dataset();
    Timestamp apr = parse_rfc3339("2021-04-01T00:00:00Z");

    // maintainer: direct commits into the source repository
    CHECK(population::classify_contributor(ds, "m_ada", apr).role ==
          population::Role::privileged);
    // privileged action only (closed someone else's issue on 2021-03-01)
    CHECK(population::classify_contributor(ds, "u_fay", apr).role ==
          population::Role::privileged);
    // strictly-before cutoff: not privileged at the instant of the action
    Timestamp at_action = parse_rfc3339("2021-03-01T10:00:00Z");
    CHECK(population::classify_contributor(ds, "u_fay", at_action).role ==
          population::Role::external);
    CHECK(population::classify_contributor(ds, "u_fay",
                                           parse_rfc3339("2021-03-01T10:00:01Z"))
              .role == population::Role::privileged);
    // fork owners never act on the source repository
    for (const char* user : {"u_bob", "u_cai", "u_dee", "u_eve"}) {
        CHECK(population::classify_contributor(ds, user, apr).role ==
              population::Role::external);
    }
    // unknown user
    CHECK(population::classify_contributor(ds, "nobody", apr).role ==
          population::Role::external);
}

TEST_CASE("build_snapshots: six months with populations [0,1,2,3,2,1]") {
    const auto& ds = dataset();
    auto snapshots = population::build_snapshots(ds);
    REQUIRE(snapshots.size() == 6);

    std::vector<std::size_t> sizes;
    for (const auto& s : snapshots) {
        sizes.push_back(s.population.size());
    }
    CHECK(sizes == std::vector<std::size_t>{0, 1, 2, 3, 2, 1});

    CHECK(snapshots[0].month() == MonthRef{2021, 1});
    CHECK(snapshots[5].month() == MonthRef{2021, 6});
    for (std::size_t i = 0; i + 1 < snapshots.size(); ++i) {
        CHECK(snapshots[i].interval_end == snapshots[i + 1].interval_start);
    }

    // March: the fork-of-fork R4 carries R2's commit c103; after shared-sha
    // attribution R4 has nothing left and drops out.
    const auto& march = snapshots[2];
    REQUIRE(march.population.size() == 2);
    CHECK(march.population[0].fork_id == "R1");
    CHECK(march.population[1].fork_id == "R2");
    CHECK(march.population[1].commit_shas == std::vector<std::string>{sha_tag("c103")});

    // April: R4 loses the synced c105 to R2 but keeps its own c106;
    // R1's merge commit c110 never counts.
    const auto& april = snapshots[3];
    REQUIRE(april.population.size() == 3);
    CHECK(april.population[0].fork_id == "R1");
    CHECK(april.population[0].commit_shas == std::vector<std::string>{sha_tag("c104")});
    CHECK(april.population[1].fork_id == "R2");
    CHECK(april.population[1].commit_shas == std::vector<std::string>{sha_tag("c105")});
    CHECK(april.population[2].fork_id == "R4");
    CHECK(april.population[2].commit_shas == std::vector<std::string>{sha_tag("c106")});

    // June: a commit with no file changes (c111 on R2) does not qualify.
    const auto& june = snapshots[5];
    REQUIRE(june.population.size() == 1);
    CHECK(june.population[0].fork_id == "R3");
}

TEST_CASE("a commit on the last second of a month lands in that month only") {
    data::EventDataset ds;
    ds.source_repo_id = "R0";
    ds.full_name = "x/y";
    ds.created_at = parse_rfc3339("2021-03-01T00:00:00Z");
    ds.forks.push_back({"F", "u/f", "u1", "R0", parse_rfc3339("2021-03-02T00:00:00Z")});
    data::CommitRecord commit;
    commit.sha = std::string(40, 'a');
    commit.repo_id = "F";
    commit.author_id = "u1";
    commit.committed_at = parse_rfc3339("2021-03-31T23:59:59Z");
    commit.parent_count = 1;
    commit.files.push_back({"a.txt", 1, 0});
    ds.commits.push_back(commit);
    // one April event so the snapshot range spans two months
    ds.stars.push_back({parse_rfc3339("2021-04-10T00:00:00Z")});

    auto snapshots = population::build_snapshots(ds);
    REQUIRE(snapshots.size() == 2);
    CHECK(snapshots[0].population.size() == 1);
    CHECK(snapshots[1].population.empty());
}

TEST_CASE("role cutoff knob: owner turning privileged mid-month") {
    // u_eve closes someone else's issue on 2021-04-20; with the month-end
    // cutoff her fork R4 drops out of April, with the month-start cutoff it
    // stays in.
    data::EventDataset ds = data::load_dataset(kFixture);
    ds.privileged_actions.push_back(
        {"u_eve", "R0", data::PrivilegedKind::close_issue_of_other,
         parse_rfc3339("2021-04-20T00:00:00Z")});

    auto end_cutoff = population::build_snapshots(ds, population::RoleCutoff::interval_end);
    REQUIRE(end_cutoff.size() == 6);
    CHECK(end_cutoff[3].population.size() == 2);

    auto start_cutoff =
        population::build_snapshots(ds, population::RoleCutoff::interval_start);
    CHECK(start_cutoff[3].population.size() == 3);
}

TEST_CASE("snapshots are independent of input record order") {
    data::EventDataset ds = data::load_dataset(kFixture);
    auto baseline = population::build_snapshots(ds);
    std::reverse(ds.commits.begin(), ds.commits.end());
    std::reverse(ds.forks.begin(), ds.forks.end());
    auto shuffled = population::build_snapshots(ds);
    REQUIRE(baseline.size() == shuffled.size());
    for (std::size_t i = 0; i < baseline.size(); ++i) {
        REQUIRE(baseline[i].population.size() == shuffled[i].population.size());
        for (std::size_t j = 0; j < baseline[i].population.size(); ++j) {
            CHECK(baseline[i].population[j].fork_id == shuffled[i].population[j].fork_id);
            CHECK(baseline[i].population[j].commit_shas ==
                  shuffled[i].population[j].commit_shas);
        }
    }
}

TEST_CASE("build_matrix cell conventions and entropies vs the dense oracle") {
    const auto& ds = dataset();
    auto snapshots = population::build_snapshots(ds);

    CHECK_THROWS_AS(population::build_matrix(ds, snapshots[0]), EmptyPopulation);

    // February: one fork, one commit a.txt +2/-1 -> cell 3
    auto feb = population::build_matrix(ds, snapshots[1]);
    REQUIRE(feb.fork_count() == 1);
    REQUIRE(feb.file_count() == 1);
    CHECK(feb.file_paths()[0] == "a.txt");
    CHECK(feb.rows()[0].entries()[0].changed_lines == 3);
    CHECK(entropy::quadratic_entropy(feb).value == 0.0);

    // March: rows [1] and [2] -> the closed-form 0.3160602794
    auto march = population::build_matrix(ds, snapshots[2]);
    REQUIRE(march.fork_count() == 2);
    CHECK(entropy::quadratic_entropy(march).value ==
          doctest::Approx(0.3160602794).epsilon(1e-10));
    CHECK(entropy::quadratic_entropy(march).value ==
          doctest::Approx(testsupport::dense_entropy_oracle({{1}, {2}}, 1.0)).epsilon(1e-12));

    // April: rows over files {a.txt, b.txt}: [1,0],[1,0],[1,3]
    auto april = population::build_matrix(ds, snapshots[3]);
    REQUIRE(april.fork_count() == 3);
    REQUIRE(april.file_count() == 2);
    testsupport::Dense april_dense{{1, 0}, {1, 0}, {1, 3}};
    CHECK(entropy::quadratic_entropy(april).value ==
          doctest::Approx(testsupport::dense_entropy_oracle(april_dense, 1.0)).epsilon(1e-12));
    CHECK(entropy::quadratic_entropy(april).value ==
          doctest::Approx(0.4223168585).epsilon(1e-10));

    // May: per-commit summation 2+1 -> cell 3 on fork R3
    auto may = population::build_matrix(ds, snapshots[4]);
    REQUIRE(may.fork_count() == 2);
    CHECK(may.rows()[1].fork_id() == "R3");
    CHECK(may.rows()[1].entries()[0].changed_lines == 3);
    CHECK(entropy::quadratic_entropy(may).value ==
          doctest::Approx(testsupport::dense_entropy_oracle({{1}, {3}}, 1.0)).epsilon(1e-12));
}

TEST_CASE("build_pr_filtered_matrix keeps only PR-carried modifications") {
    const auto& ds = dataset();
    auto snapshots = population::build_snapshots(ds);

    // April: PR files a:1 (PR 201), a:1 (PR 202), a:2 (PR 203)
    auto april = population::build_pr_filtered_matrix(ds, snapshots[3]);
    REQUIRE(april.fork_count() == 3);
    REQUIRE(april.file_count() == 1);
    CHECK(entropy::quadratic_entropy(april).value ==
          doctest::Approx(0.2809424706).epsilon(1e-10));
    CHECK(entropy::quadratic_entropy(april).value ==
          doctest::Approx(testsupport::dense_entropy_oracle({{1}, {1}, {2}}, 1.0))
              .epsilon(1e-12));

    // May: only R2 has an in-interval PR; R3 is dropped -> 1x1 matrix
    auto may = population::build_pr_filtered_matrix(ds, snapshots[4]);
    REQUIRE(may.fork_count() == 1);
    CHECK(may.rows()[0].fork_id() == "R2");
    CHECK(entropy::quadratic_entropy(may).value == 0.0);

    CHECK_THROWS_AS(population::build_pr_filtered_matrix(ds, snapshots[0]), EmptyPopulation);
}

TEST_CASE("snapshot cache round-trips byte-identically") {
    const auto& ds = dataset();
    auto snapshots = population::build_snapshots(ds);
    std::vector<population::CachedSnapshot> cached;
    for (const auto& s : snapshots) {
        cached.push_back(population::build_cached(ds, s));
    }

    fs::path dir = fs::temp_directory_path() / "forkent-test-cache";
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::path file = dir / "mini.snapshots.ndjson";
    population::write_snapshot_cache(file, cached);

    auto loaded = population::read_snapshot_cache(file);
    REQUIRE(loaded.size() == cached.size());
    for (std::size_t i = 0; i < cached.size(); ++i) {
        CHECK(loaded[i].snapshot.interval_start == cached[i].snapshot.interval_start);
        CHECK(loaded[i].snapshot.population.size() == cached[i].snapshot.population.size());
        CHECK(loaded[i].full.has_value() == cached[i].full.has_value());
        if (cached[i].full) {
            CHECK(entropy::quadratic_entropy(*loaded[i].full).value ==
                  entropy::quadratic_entropy(*cached[i].full).value);
        }
    }

    fs::path file2 = dir / "mini2.snapshots.ndjson";
    population::write_snapshot_cache(file2, loaded);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    CHECK(slurp(file) == slurp(file2));

    // byte-identical snapshots and matrices regardless of input file order
    data::EventDataset reversed = ds;
    std::reverse(reversed.commits.begin(), reversed.commits.end());
    std::reverse(reversed.forks.begin(), reversed.forks.end());
    std::reverse(reversed.pulls.begin(), reversed.pulls.end());
    std::vector<population::CachedSnapshot> cached2;
    for (const auto& s : population::build_snapshots(reversed)) {
        cached2.push_back(population::build_cached(reversed, s));
    }
    fs::path file3 = dir / "mini3.snapshots.ndjson";
    population::write_snapshot_cache(file3, cached2);
    CHECK(slurp(file) == slurp(file3));
}
