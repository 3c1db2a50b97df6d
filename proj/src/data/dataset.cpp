#include "forkent/data/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <functional>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "forkent/errors.hpp"

namespace forkent::data {

namespace {

using nlohmann::json;

struct Ctx {
    const char* file;
    std::size_t line;

    [[noreturn]] void fail(const std::string& reason) const {
        throw MalformedRecord(file, line, reason);
    }
};

const json& require_key(const json& obj, const char* key, const Ctx& ctx) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        ctx.fail(std::string("missing required key \"") + key + "\"");
    }
    return *it;
}

std::string get_string(const json& obj, const char* key, const Ctx& ctx) {
    const json& v = require_key(obj, key, ctx);
    if (!v.is_string()) {
        ctx.fail(std::string("key \"") + key + "\" must be a string");
    }
    return v.get<std::string>();
}

Timestamp get_time(const json& obj, const char* key, const Ctx& ctx) {
    std::string text = get_string(obj, key, ctx);
    try {
        return parse_rfc3339(text);
    } catch (const std::invalid_argument& e) {
        ctx.fail(std::string("key \"") + key + "\": " + e.what());
    }
}

std::int64_t get_int64(const json& obj, const char* key, const Ctx& ctx) {
    const json& v = require_key(obj, key, ctx);
    if (!v.is_number_integer()) {
        ctx.fail(std::string("key \"") + key + "\" must be an integer");
    }
    return v.get<std::int64_t>();
}

std::uint32_t get_uint32(const json& obj, const char* key, const Ctx& ctx) {
    std::int64_t v = get_int64(obj, key, ctx);
    if (v < 0 || v > 0xffffffffLL) {
        ctx.fail(std::string("key \"") + key + "\" out of range");
    }
    return static_cast<std::uint32_t>(v);
}

bool get_bool(const json& obj, const char* key, const Ctx& ctx) {
    const json& v = require_key(obj, key, ctx);
    if (!v.is_boolean()) {
        ctx.fail(std::string("key \"") + key + "\" must be a boolean");
    }
    return v.get<bool>();
}

const json& get_array(const json& obj, const char* key, const Ctx& ctx) {
    const json& v = require_key(obj, key, ctx);
    if (!v.is_array()) {
        ctx.fail(std::string("key \"") + key + "\" must be an array");
    }
    return v;
}

bool is_40_hex(std::string_view s) {
    if (s.size() != 40) {
        return false;
    }
    for (char c : s) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
            return false;
        }
    }
    return true;
}

std::vector<FileChange> parse_files(const json& obj, const Ctx& ctx) {
    std::vector<FileChange> files;
    for (const json& f : get_array(obj, "files", ctx)) {
        if (!f.is_object()) {
            ctx.fail("\"files\" entries must be objects");
        }
        FileChange change;
        change.path = get_string(f, "path", ctx);
        change.additions = get_uint32(f, "additions", ctx);
        change.deletions = get_uint32(f, "deletions", ctx);
        if (change.path.empty()) {
            ctx.fail("file path must be non-empty");
        }
        files.push_back(std::move(change));
    }
    return files;
}

// Calls `handle(parsed_object, ctx)` per non-blank line.
void for_each_record(const std::filesystem::path& dir, const char* name,
                     const std::function<void(const json&, const Ctx&)>& handle) {
    std::filesystem::path path = dir / name;
    std::ifstream in(path);
    if (!in) {
        throw MalformedRecord(name, 0, "file missing or unreadable");
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        bool blank = std::all_of(line.begin(), line.end(), [](unsigned char c) {
            return std::isspace(c) != 0;
        });
        if (blank) {
            continue;
        }
        Ctx ctx{name, line_no};
        json parsed;
        try {
            parsed = json::parse(line);
        } catch (const json::parse_error& e) {
            ctx.fail(std::string("invalid JSON: ") + e.what());
        }
        if (!parsed.is_object()) {
            ctx.fail("line is not a JSON object");
        }
        handle(parsed, ctx);
    }
}

std::string lowercase(std::string s) {
    for (char& c : s) {
        c = char(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

json file_change_json(const FileChange& f) {
    return json{{"path", f.path}, {"additions", f.additions}, {"deletions", f.deletions}};
}

void write_lines(const std::filesystem::path& path, const std::vector<json>& lines) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoFailure("cannot open " + path.string() + " for writing");
    }
    for (const json& line : lines) {
        out << line.dump() << '\n';
    }
}

}  // namespace

std::string_view to_string(PrivilegedKind kind) {
    switch (kind) {
        case PrivilegedKind::direct_commit:
            return "direct_commit";
        case PrivilegedKind::close_issue_of_other:
            return "close_issue_of_other";
        case PrivilegedKind::close_pr_of_other:
            return "close_pr_of_other";
        case PrivilegedKind::merge_pr:
            return "merge_pr";
    }
    return "direct_commit";
}

std::optional<PrivilegedKind> parse_privileged_kind(std::string_view text) {
    if (text == "direct_commit") return PrivilegedKind::direct_commit;
    if (text == "close_issue_of_other") return PrivilegedKind::close_issue_of_other;
    if (text == "close_pr_of_other") return PrivilegedKind::close_pr_of_other;
    if (text == "merge_pr") return PrivilegedKind::merge_pr;
    return std::nullopt;
}

Timestamp EventDataset::last_event_at() const {
    Timestamp latest = created_at;
    auto bump = [&latest](Timestamp t) { latest = std::max(latest, t); };
    for (const auto& f : forks) bump(f.created_at);
    for (const auto& c : commits) bump(c.committed_at);
    for (const auto& p : pulls) {
        bump(p.created_at);
        if (p.closed_at) bump(*p.closed_at);
    }
    for (const auto& i : issues) bump(i.created_at);
    for (const auto& a : privileged_actions) bump(a.occurred_at);
    for (const auto& s : stars) bump(s.starred_at);
    return latest;
}

EventDataset load_dataset(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw DatasetError("dataset_not_found", "dataset directory not found: " + dir.string());
    }

    EventDataset ds;

    {
        std::ifstream in(dir / "project.json");
        if (!in) {
            throw MalformedRecord("project.json", 0, "file missing or unreadable");
        }
        Ctx ctx{"project.json", 1};
        json project;
        try {
            project = json::parse(in);
        } catch (const json::parse_error& e) {
            ctx.fail(std::string("invalid JSON: ") + e.what());
        }
        if (!project.is_object()) {
            ctx.fail("project.json must hold a JSON object");
        }
        ds.source_repo_id = get_string(project, "source_repo_id", ctx);
        ds.full_name = get_string(project, "full_name", ctx);
        ds.created_at = get_time(project, "created_at", ctx);
    }

    std::unordered_set<std::string> fork_ids;
    for_each_record(dir, "forks.ndjson", [&](const json& obj, const Ctx& ctx) {
        ForkRecord fork;
        fork.repo_id = get_string(obj, "repo_id", ctx);
        fork.full_name = get_string(obj, "full_name", ctx);
        fork.owner_id = get_string(obj, "owner_id", ctx);
        fork.parent_repo_id = get_string(obj, "parent_repo_id", ctx);
        fork.created_at = get_time(obj, "created_at", ctx);
        if (fork.repo_id == ds.source_repo_id || !fork_ids.insert(fork.repo_id).second) {
            throw DuplicateKey("fork", fork.repo_id);
        }
        ds.forks.push_back(std::move(fork));
    });

    std::unordered_set<std::string> commit_keys;
    for_each_record(dir, "commits.ndjson", [&](const json& obj, const Ctx& ctx) {
        CommitRecord commit;
        commit.sha = get_string(obj, "sha", ctx);
        if (!is_40_hex(commit.sha)) {
            ctx.fail("\"sha\" must be a 40-char lowercase hex string");
        }
        commit.repo_id = get_string(obj, "repo_id", ctx);
        commit.author_id = get_string(obj, "author_id", ctx);
        commit.committed_at = get_time(obj, "committed_at", ctx);
        commit.parent_count = get_uint32(obj, "parent_count", ctx);
        commit.files = parse_files(obj, ctx);
        commit.message = get_string(obj, "message", ctx);
        if (!commit_keys.insert(commit.repo_id + "\n" + commit.sha).second) {
            throw DuplicateKey("commit", commit.sha + " in " + commit.repo_id);
        }
        ds.commits.push_back(std::move(commit));
    });

    std::unordered_set<std::int64_t> pr_ids;
    for_each_record(dir, "pulls.ndjson", [&](const json& obj, const Ctx& ctx) {
        PullRequestRecord pr;
        pr.pr_id = get_int64(obj, "pr_id", ctx);
        pr.source_repo_id = get_string(obj, "source_repo_id", ctx);
        pr.target_repo_id = get_string(obj, "target_repo_id", ctx);
        pr.author_id = get_string(obj, "author_id", ctx);
        pr.created_at = get_time(obj, "created_at", ctx);
        if (auto it = obj.find("closed_at"); it != obj.end() && !it->is_null()) {
            pr.closed_at = get_time(obj, "closed_at", ctx);
        }
        pr.merged_action = get_bool(obj, "merged_action", ctx);
        for (const json& sha : get_array(obj, "commit_shas", ctx)) {
            if (!sha.is_string()) {
                ctx.fail("\"commit_shas\" entries must be strings");
            }
            pr.commit_shas.push_back(sha.get<std::string>());
        }
        pr.files = parse_files(obj, ctx);
        for (const json& comment : get_array(obj, "last_comments", ctx)) {
            if (!comment.is_string()) {
                ctx.fail("\"last_comments\" entries must be strings");
            }
            pr.last_comments.push_back(comment.get<std::string>());
        }
        if (pr.last_comments.size() > 3) {
            ctx.fail("\"last_comments\" holds more than 3 entries");
        }
        if (pr.closed_at && *pr.closed_at < pr.created_at) {
            ctx.fail("closed_at precedes created_at");
        }
        if (pr.merged_action && !pr.closed_at) {
            ctx.fail("merged_action requires closed_at");
        }
        if (!pr_ids.insert(pr.pr_id).second) {
            throw DuplicateKey("pull", std::to_string(pr.pr_id));
        }
        ds.pulls.push_back(std::move(pr));
    });

    std::unordered_set<std::string> issue_ids;
    for_each_record(dir, "issues.ndjson", [&](const json& obj, const Ctx& ctx) {
        IssueRecord issue;
        issue.issue_id = get_string(obj, "issue_id", ctx);
        issue.title = get_string(obj, "title", ctx);
        if (issue.title.empty()) {
            ctx.fail("issue title must be non-empty");
        }
        for (const json& label : get_array(obj, "labels", ctx)) {
            if (!label.is_string()) {
                ctx.fail("\"labels\" entries must be strings");
            }
            issue.labels.push_back(label.get<std::string>());
        }
        issue.created_at = get_time(obj, "created_at", ctx);
        issue.author_id = get_string(obj, "author_id", ctx);
        if (!issue_ids.insert(issue.issue_id).second) {
            throw DuplicateKey("issue", issue.issue_id);
        }
        ds.issues.push_back(std::move(issue));
    });

    for_each_record(dir, "privileged_actions.ndjson", [&](const json& obj, const Ctx& ctx) {
        PrivilegedActionRecord action;
        action.user_id = get_string(obj, "user_id", ctx);
        action.repo_id = get_string(obj, "repo_id", ctx);
        std::string kind = get_string(obj, "action_kind", ctx);
        auto parsed = parse_privileged_kind(kind);
        if (!parsed) {
            ctx.fail("unknown action_kind \"" + kind + "\"");
        }
        action.action_kind = *parsed;
        action.occurred_at = get_time(obj, "occurred_at", ctx);
        ds.privileged_actions.push_back(std::move(action));
    });

    for_each_record(dir, "stars.ndjson", [&](const json& obj, const Ctx& ctx) {
        ds.stars.push_back(StarEvent{get_time(obj, "starred_at", ctx)});
    });

    // Referential checks once everything is in memory; file order must not
    // matter.
    auto known_repo = [&](const std::string& id) {
        return id == ds.source_repo_id || fork_ids.count(id) > 0;
    };
    for (const auto& fork : ds.forks) {
        if (!known_repo(fork.parent_repo_id)) {
            throw DanglingReference("fork parent", fork.parent_repo_id);
        }
    }
    for (const auto& commit : ds.commits) {
        if (!known_repo(commit.repo_id)) {
            throw DanglingReference("commit", commit.repo_id);
        }
    }
    for (const auto& pr : ds.pulls) {
        if (!known_repo(pr.source_repo_id)) {
            throw DanglingReference("pull source", pr.source_repo_id);
        }
        if (!known_repo(pr.target_repo_id)) {
            throw DanglingReference("pull target", pr.target_repo_id);
        }
    }
    for (const auto& action : ds.privileged_actions) {
        if (!known_repo(action.repo_id)) {
            throw DanglingReference("privileged action", action.repo_id);
        }
    }

    return ds;
}

void serialize_dataset(const EventDataset& ds, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    {
        json project{{"source_repo_id", ds.source_repo_id},
                     {"full_name", ds.full_name},
                     {"created_at", format_rfc3339(ds.created_at)}};
        std::ofstream out(dir / "project.json", std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoFailure("cannot open project.json for writing");
        }
        out << project.dump() << '\n';
    }

    auto forks = ds.forks;
    std::sort(forks.begin(), forks.end(),
              [](const auto& a, const auto& b) { return a.repo_id < b.repo_id; });
    std::vector<json> lines;
    for (const auto& f : forks) {
        lines.push_back(json{{"repo_id", f.repo_id},
                             {"full_name", f.full_name},
                             {"owner_id", f.owner_id},
                             {"parent_repo_id", f.parent_repo_id},
                             {"created_at", format_rfc3339(f.created_at)}});
    }
    write_lines(dir / "forks.ndjson", lines);

    auto commits = ds.commits;
    std::sort(commits.begin(), commits.end(), [](const auto& a, const auto& b) {
        return std::tie(a.repo_id, a.sha) < std::tie(b.repo_id, b.sha);
    });
    lines.clear();
    for (const auto& c : commits) {
        json files = json::array();
        for (const auto& f : c.files) {
            files.push_back(file_change_json(f));
        }
        lines.push_back(json{{"sha", c.sha},
                             {"repo_id", c.repo_id},
                             {"author_id", c.author_id},
                             {"committed_at", format_rfc3339(c.committed_at)},
                             {"parent_count", c.parent_count},
                             {"files", files},
                             {"message", c.message}});
    }
    write_lines(dir / "commits.ndjson", lines);

    auto pulls = ds.pulls;
    std::sort(pulls.begin(), pulls.end(),
              [](const auto& a, const auto& b) { return a.pr_id < b.pr_id; });
    lines.clear();
    for (const auto& p : pulls) {
        json files = json::array();
        for (const auto& f : p.files) {
            files.push_back(file_change_json(f));
        }
        json obj{{"pr_id", p.pr_id},
                 {"source_repo_id", p.source_repo_id},
                 {"target_repo_id", p.target_repo_id},
                 {"author_id", p.author_id},
                 {"created_at", format_rfc3339(p.created_at)},
                 {"merged_action", p.merged_action},
                 {"commit_shas", p.commit_shas},
                 {"files", files},
                 {"last_comments", p.last_comments}};
        if (p.closed_at) {
            obj["closed_at"] = format_rfc3339(*p.closed_at);
        }
        lines.push_back(std::move(obj));
    }
    write_lines(dir / "pulls.ndjson", lines);

    auto issues = ds.issues;
    std::sort(issues.begin(), issues.end(),
              [](const auto& a, const auto& b) { return a.issue_id < b.issue_id; });
    lines.clear();
    for (const auto& i : issues) {
        lines.push_back(json{{"issue_id", i.issue_id},
                             {"title", i.title},
                             {"labels", i.labels},
                             {"created_at", format_rfc3339(i.created_at)},
                             {"author_id", i.author_id}});
    }
    write_lines(dir / "issues.ndjson", lines);

    auto actions = ds.privileged_actions;
    std::sort(actions.begin(), actions.end(), [](const auto& a, const auto& b) {
        return std::tie(a.occurred_at, a.user_id, a.repo_id, a.action_kind) <
               std::tie(b.occurred_at, b.user_id, b.repo_id, b.action_kind);
    });
    lines.clear();
    for (const auto& a : actions) {
        lines.push_back(json{{"user_id", a.user_id},
                             {"repo_id", a.repo_id},
                             {"action_kind", std::string(to_string(a.action_kind))},
                             {"occurred_at", format_rfc3339(a.occurred_at)}});
    }
    write_lines(dir / "privileged_actions.ndjson", lines);

    auto stars = ds.stars;
    std::sort(stars.begin(), stars.end(),
              [](const auto& a, const auto& b) { return a.starred_at < b.starred_at; });
    lines.clear();
    for (const auto& s : stars) {
        lines.push_back(json{{"starred_at", format_rfc3339(s.starred_at)}});
    }
    write_lines(dir / "stars.ndjson", lines);
}

bool same_records(const EventDataset& a, const EventDataset& b) {
    if (a.source_repo_id != b.source_repo_id || a.full_name != b.full_name ||
        a.created_at != b.created_at) {
        return false;
    }
    auto sorted = [](auto records, auto key) {
        std::sort(records.begin(), records.end(),
                  [&key](const auto& x, const auto& y) { return key(x) < key(y); });
        return records;
    };
    auto fork_key = [](const ForkRecord& f) { return f.repo_id; };
    auto commit_key = [](const CommitRecord& c) { return std::tie(c.repo_id, c.sha); };
    auto pull_key = [](const PullRequestRecord& p) { return p.pr_id; };
    auto issue_key = [](const IssueRecord& i) { return i.issue_id; };
    auto action_key = [](const PrivilegedActionRecord& x) {
        return std::tie(x.occurred_at, x.user_id, x.repo_id, x.action_kind);
    };
    auto star_key = [](const StarEvent& s) { return s.starred_at; };
    return sorted(a.forks, fork_key) == sorted(b.forks, fork_key) &&
           sorted(a.commits, commit_key) == sorted(b.commits, commit_key) &&
           sorted(a.pulls, pull_key) == sorted(b.pulls, pull_key) &&
           sorted(a.issues, issue_key) == sorted(b.issues, issue_key) &&
           sorted(a.privileged_actions, action_key) ==
               sorted(b.privileged_actions, action_key) &&
           sorted(a.stars, star_key) == sorted(b.stars, star_key);
}

std::vector<ForkRecord> fork_network(const EventDataset& ds) {
    std::unordered_map<std::string, std::vector<const ForkRecord*>> children;
    for (const ForkRecord& fork : ds.forks) {
        children[fork.parent_repo_id].push_back(&fork);
    }
    for (auto& [parent, list] : children) {
        std::sort(list.begin(), list.end(), [](const ForkRecord* a, const ForkRecord* b) {
            return std::tie(a->created_at, a->repo_id) < std::tie(b->created_at, b->repo_id);
        });
    }

    std::vector<ForkRecord> order;
    std::unordered_set<std::string> visited;
    std::deque<const ForkRecord*> queue;
    if (auto it = children.find(ds.source_repo_id); it != children.end()) {
        for (const ForkRecord* fork : it->second) {
            queue.push_back(fork);
        }
    }
    while (!queue.empty()) {
        const ForkRecord* fork = queue.front();
        queue.pop_front();
        if (!visited.insert(fork->repo_id).second) {
            continue;
        }
        order.push_back(*fork);
        if (auto it = children.find(fork->repo_id); it != children.end()) {
            for (const ForkRecord* child : it->second) {
                queue.push_back(child);
            }
        }
    }

    if (order.size() != ds.forks.size()) {
        // Parents all resolve (load checked), so an unreachable fork's
        // ancestry must loop. Walk it to name a cycle member.
        std::vector<const ForkRecord*> unreachable;
        std::unordered_map<std::string, const ForkRecord*> by_id;
        for (const ForkRecord& fork : ds.forks) {
            by_id[fork.repo_id] = &fork;
            if (!visited.count(fork.repo_id)) {
                unreachable.push_back(&fork);
            }
        }
        std::sort(unreachable.begin(), unreachable.end(),
                  [](const ForkRecord* a, const ForkRecord* b) { return a->repo_id < b->repo_id; });
        std::unordered_set<std::string> walk;
        const ForkRecord* cur = unreachable.front();
        while (cur && walk.insert(cur->repo_id).second) {
            auto it = by_id.find(cur->parent_repo_id);
            cur = it == by_id.end() ? nullptr : it->second;
        }
        throw CycleDetected(cur ? cur->repo_id : unreachable.front()->repo_id);
    }
    return order;
}

std::vector<LintFinding> lint_dataset(const EventDataset& ds, const LintThresholds& thresholds) {
    std::vector<LintFinding> findings;

    std::unordered_set<std::string> active;
    std::unordered_set<std::string> fork_ids;
    for (const auto& fork : ds.forks) {
        fork_ids.insert(fork.repo_id);
    }
    for (const auto& commit : ds.commits) {
        if (fork_ids.count(commit.repo_id)) {
            active.insert(commit.repo_id);
        }
    }
    if (active.size() < thresholds.min_active_forks) {
        findings.push_back({"active_forks", "active_forks=" + std::to_string(active.size()) +
                                                " < " + std::to_string(thresholds.min_active_forks)});
    }
    if (ds.issues.size() < thresholds.min_issues) {
        findings.push_back({"issues", "issues=" + std::to_string(ds.issues.size()) + " < " +
                                          std::to_string(thresholds.min_issues)});
    }
    std::string name = lowercase(ds.full_name);
    for (const std::string& keyword : thresholds.name_keywords) {
        if (name.find(lowercase(keyword)) != std::string::npos) {
            findings.push_back(
                {"name_keyword", "full_name contains \"" + keyword + "\""});
        }
    }
    return findings;
}

}  // namespace forkent::data
