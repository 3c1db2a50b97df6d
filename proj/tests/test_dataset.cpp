#include <doctest.h>
#include <algorithm>

#include <filesystem>
#include <fstream>

#include "forkent/data/dataset.hpp"
#include "forkent/errors.hpp"

using namespace forkent;
namespace fs = std::filesystem;

namespace {

const fs::path kFixture = fs::path(FORKENT_FIXTURE_DIR) / "mini-project";

fs::path temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("forkent-test-" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// copies the fixture so individual files can be corrupted
fs::path corrupt_copy(const std::string& tag) {
    fs::path dir = temp_dir(tag);
    for (const auto& entry : fs::directory_iterator(kFixture)) {
        fs::copy_file(entry.path(), dir / entry.path().filename());
    }
    return dir;
}

void append_line(const fs::path& file, const std::string& line) {
    std::ofstream out(file, std::ios::app);
    out << line << '\n';
}

}  // namespace

TEST_CASE("mini-project loads with expected shape") {
    data::EventDataset ds = data::load_dataset(kFixture);
    CHECK(ds.source_repo_id == "R0");
    CHECK(ds.full_name == "acme/widgetd");
    CHECK(ds.forks.size() == 4);
    CHECK(ds.commits.size() == 23);
    CHECK(ds.pulls.size() == 7);
    CHECK(ds.issues.size() == 10);
    CHECK(ds.privileged_actions.size() == 5);
    CHECK(ds.stars.size() == 6);
    CHECK(month_of(ds.last_event_at()) == MonthRef{2021, 6});
}

TEST_CASE("empty ndjson files are valid") {
    fs::path dir = corrupt_copy("empty-pulls");
    std::ofstream(dir / "pulls.ndjson", std::ios::trunc);
    data::EventDataset ds = data::load_dataset(dir);
    CHECK(ds.pulls.empty());
    CHECK(ds.forks.size() == 4);
}

TEST_CASE("missing dataset directory is a distinct validation error") {
    try {
        data::load_dataset("/nonexistent/definitely-not-here");
        FAIL("expected DatasetError");
    } catch (const DatasetError& e) {
        CHECK(e.kind() == "dataset_not_found");
    }
}

TEST_CASE("dangling references are rejected") {
    fs::path dir = corrupt_copy("dangling");
    append_line(dir / "commits.ndjson",
                R"({"sha":"ffffffffffffffffffffffffffffffffffffffff","repo_id":"R99",)"
                R"("author_id":"u_x","committed_at":"2021-03-01T00:00:00Z","parent_count":1,)"
                R"("files":[],"message":"ghost"})");
    CHECK_THROWS_AS(data::load_dataset(dir), DanglingReference);
}

TEST_CASE("duplicate keys are rejected") {
    fs::path dir = corrupt_copy("dup-fork");
    append_line(dir / "forks.ndjson",
                R"({"repo_id":"R1","full_name":"x/y","owner_id":"u_x",)"
                R"("parent_repo_id":"R0","created_at":"2021-02-01T00:00:00Z"})");
    CHECK_THROWS_AS(data::load_dataset(dir), DuplicateKey);
}

TEST_CASE("malformed records carry file and line") {
    fs::path dir = corrupt_copy("truncated");
    append_line(dir / "commits.ndjson", R"({"sha":"00)");
    try {
        data::load_dataset(dir);
        FAIL("expected MalformedRecord");
    } catch (const MalformedRecord& e) {
        CHECK(e.line() == 24);
        CHECK(std::string(e.what()).find("commits.ndjson:24") != std::string::npos);
    }

    fs::path dir2 = corrupt_copy("missing-key");
    append_line(dir2 / "issues.ndjson",
                R"({"issue_id":"I99","labels":[],"created_at":"2021-03-01T00:00:00Z",)"
                R"("author_id":"u"})");
    CHECK_THROWS_AS(data::load_dataset(dir2), MalformedRecord);

    fs::path dir3 = corrupt_copy("bad-sha");
    append_line(dir3 / "commits.ndjson",
                R"({"sha":"SHORT","repo_id":"R1","author_id":"u_bob",)"
                R"("committed_at":"2021-03-01T00:00:00Z","parent_count":1,"files":[],)"
                R"("message":"m"})");
    CHECK_THROWS_AS(data::load_dataset(dir3), MalformedRecord);
}

TEST_CASE("pull request invariants validated at load") {
    fs::path dir = corrupt_copy("pr-invariants");
    // closed before created
    append_line(dir / "pulls.ndjson",
                R"({"pr_id":900,"source_repo_id":"R1","target_repo_id":"R0",)"
                R"("author_id":"u_bob","created_at":"2021-05-10T00:00:00Z",)"
                R"("closed_at":"2021-05-09T00:00:00Z","merged_action":false,)"
                R"("commit_shas":[],"files":[],"last_comments":[]})");
    CHECK_THROWS_AS(data::load_dataset(dir), MalformedRecord);

    fs::path dir2 = corrupt_copy("pr-merged-open");
    append_line(dir2 / "pulls.ndjson",
                R"({"pr_id":901,"source_repo_id":"R1","target_repo_id":"R0",)"
                R"("author_id":"u_bob","created_at":"2021-05-10T00:00:00Z",)"
                R"("merged_action":true,"commit_shas":[],"files":[],"last_comments":[]})");
    CHECK_THROWS_AS(data::load_dataset(dir2), MalformedRecord);
}

TEST_CASE("open pull requests (no closed_at) are valid records") {
    fs::path dir = corrupt_copy("open-pr");
    append_line(dir / "pulls.ndjson",
                R"({"pr_id":300,"source_repo_id":"R3","target_repo_id":"R0",)"
                R"("author_id":"u_dee","created_at":"2021-06-28T00:00:00Z",)"
                R"("merged_action":false,"commit_shas":[],"files":[],"last_comments":[]})");
    data::EventDataset ds = data::load_dataset(dir);
    CHECK(ds.pulls.size() == 8);
    CHECK_FALSE(ds.pulls.back().closed_at.has_value());
}

TEST_CASE("unknown keys are ignored") {
    fs::path dir = corrupt_copy("extra-keys");
    append_line(dir / "stars.ndjson",
                R"({"starred_at":"2021-06-30T00:00:00Z","user":"extra","nested":{"a":1}})");
    data::EventDataset ds = data::load_dataset(dir);
    CHECK(ds.stars.size() == 7);
}

TEST_CASE("serialize then load is the identity, independent of input order") {
    data::EventDataset ds = data::load_dataset(kFixture);
    fs::path dir = temp_dir("roundtrip");
    data::serialize_dataset(ds, dir);
    data::EventDataset again = data::load_dataset(dir);
    CHECK(data::same_records(ds, again));

    // serialization is canonical: writing the reloaded dataset is byte-identical
    fs::path dir2 = temp_dir("roundtrip2");
    data::serialize_dataset(again, dir2);
    for (const char* name : {"project.json", "forks.ndjson", "commits.ndjson", "pulls.ndjson",
                             "issues.ndjson", "privileged_actions.ndjson", "stars.ndjson"}) {
        std::ifstream a(dir / name), b(dir2 / name);
        std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        CHECK(sa == sb);
    }
}

TEST_CASE("fork_network: breadth-first, transitive, order-independent") {
    data::EventDataset ds = data::load_dataset(kFixture);
    auto network = data::fork_network(ds);
    REQUIRE(network.size() == 4);
    // R4 is a fork of R2, so it must come after all direct forks
    CHECK(network[0].repo_id == "R1");
    CHECK(network[1].repo_id == "R2");
    CHECK(network[2].repo_id == "R3");
    CHECK(network[3].repo_id == "R4");

    // reversing the fork record order changes nothing
    std::reverse(ds.forks.begin(), ds.forks.end());
    auto network2 = data::fork_network(ds);
    REQUIRE(network2.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(network[i].repo_id == network2[i].repo_id);
    }

    // reachability oracle: walk parent links back to the source
    for (const auto& fork : network) {
        std::string cur = fork.repo_id;
        int hops = 0;
        while (cur != ds.source_repo_id) {
            REQUIRE(hops++ < 10);
            auto it = std::find_if(ds.forks.begin(), ds.forks.end(),
                                   [&](const auto& f) { return f.repo_id == cur; });
            REQUIRE(it != ds.forks.end());
            cur = it->parent_repo_id;
        }
    }
}

TEST_CASE("no forks means an empty network") {
    data::EventDataset ds;
    ds.source_repo_id = "R0";
    CHECK(data::fork_network(ds).empty());
}

TEST_CASE("fork cycles are detected") {
    data::EventDataset ds;
    ds.source_repo_id = "R0";
    ds.forks.push_back({"A", "a/a", "u1", "B", 10});
    ds.forks.push_back({"B", "b/b", "u2", "A", 20});
    CHECK_THROWS_AS(data::fork_network(ds), CycleDetected);
}

TEST_CASE("lint flags the selection criteria") {
    data::EventDataset ds = data::load_dataset(kFixture);
    auto findings = data::lint_dataset(ds);
    // 4 active forks < 100 and 10 issues < 100
    REQUIRE(findings.size() == 2);
    CHECK(findings[0].rule == "active_forks");
    CHECK(findings[0].message == "active_forks=4 < 100");
    CHECK(findings[1].rule == "issues");
    CHECK(findings[1].message == "issues=10 < 100");

    // thresholds configurable: pass with desk-scale limits
    data::LintThresholds relaxed;
    relaxed.min_active_forks = 4;
    relaxed.min_issues = 10;
    CHECK(data::lint_dataset(ds, relaxed).empty());

    // keyword screen
    ds.full_name = "acme/homework-solutions";
    auto keyword_findings = data::lint_dataset(ds, relaxed);
    REQUIRE(keyword_findings.size() == 1);
    CHECK(keyword_findings[0].rule == "name_keyword");
    CHECK(keyword_findings[0].message.find("homework") != std::string::npos);
}

TEST_CASE("an active fork is one with at least one pushed commit") {
    data::EventDataset ds = data::load_dataset(kFixture);
    // drop all commits: no fork is active anymore
    ds.commits.clear();
    data::LintThresholds t;
    t.min_active_forks = 1;
    t.min_issues = 1;
    auto findings = data::lint_dataset(ds, t);
    REQUIRE(!findings.empty());
    CHECK(findings[0].message == "active_forks=0 < 1");
}
