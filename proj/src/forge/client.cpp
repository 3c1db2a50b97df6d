#include "forkent/forge/client.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "forkent/data/dataset.hpp"
#include "forkent/errors.hpp"

namespace forkent::forge {

namespace {

using nlohmann::json;

// Budget exhaustion is an internal control-flow signal; fetch() turns it
// into PartialFetch after persisting the cursor.
struct BudgetExhausted {
    std::string url;
};

std::string lower(std::string s) {
    for (char& c : s) {
        c = char(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

std::optional<std::string> next_link(const std::map<std::string, std::string>& headers) {
    auto it = headers.find("link");
    if (it == headers.end()) {
        return std::nullopt;
    }
    const std::string& link = it->second;
    std::size_t pos = 0;
    while ((pos = link.find('<', pos)) != std::string::npos) {
        std::size_t end = link.find('>', pos);
        if (end == std::string::npos) {
            break;
        }
        std::string url = link.substr(pos + 1, end - pos - 1);
        std::size_t rel = link.find("rel=", end);
        if (rel != std::string::npos) {
            std::string tail = link.substr(rel, 11);
            if (tail.find("\"next\"") != std::string::npos) {
                return url;
            }
        }
        pos = end + 1;
    }
    return std::nullopt;
}

// --- cursor file ------------------------------------------------------

struct CursorState {
    std::vector<std::string> done;
    std::optional<std::pair<std::string, std::string>> current;  // (task, next_url)
    std::map<std::string, std::string> watermarks;               // file kind -> RFC3339
};

CursorState load_cursor(const std::filesystem::path& dir) {
    CursorState state;
    std::ifstream in(dir / "cursors.json");
    if (!in) {
        return state;
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error&) {
        return state;  // corrupt cursor: restart from scratch, appends are idempotent
    }
    for (const auto& d : j.value("done", json::array())) {
        if (d.is_string()) {
            state.done.push_back(d.get<std::string>());
        }
    }
    if (j.contains("current") && j["current"].is_object()) {
        state.current = {j["current"].value("task", ""), j["current"].value("next_url", "")};
    }
    json watermarks = j.value("watermarks", json::object());
    for (const auto& [k, v] : watermarks.items()) {
        if (v.is_string()) {
            state.watermarks[k] = v.get<std::string>();
        }
    }
    return state;
}

void save_cursor(const std::filesystem::path& dir, const CursorState& state) {
    json j{{"schema_version", 1}, {"done", state.done}};
    j["current"] = state.current ? json{{"task", state.current->first},
                                        {"next_url", state.current->second}}
                                 : json(nullptr);
    j["watermarks"] = state.watermarks;
    std::filesystem::path tmp = dir / "cursors.json.tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoFailure("cannot write cursor file in " + dir.string());
        }
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, dir / "cursors.json");
}

// --- idempotent NDJSON append -----------------------------------------

class Appender {
 public:
    Appender(std::filesystem::path path, std::string key_field)
        : path_(std::move(path)), key_field_(std::move(key_field)) {
        std::ifstream in(path_);
        std::string line;
        while (in && std::getline(in, line)) {
            if (line.empty()) {
                continue;
            }
            try {
                keys_.insert(key_of(json::parse(line)));
            } catch (const json::parse_error&) {
                // verify_cache reports malformed lines; appending stays safe
            }
        }
    }

    bool append(const json& record) {
        std::string key = key_of(record);
        if (!keys_.insert(key).second) {
            return false;
        }
        std::ofstream out(path_, std::ios::binary | std::ios::app);
        if (!out) {
            throw IoFailure("cannot append to " + path_.string());
        }
        out << record.dump() << '\n';
        return true;
    }

    bool known(const std::string& key) const { return keys_.count(key) > 0; }

 private:
    std::string key_of(const json& record) const {
        if (key_field_ == "repo_id+sha") {
            return record.value("repo_id", "") + "\n" + record.value("sha", "");
        }
        if (key_field_ == "pr_id") {
            return std::to_string(record.value("pr_id", std::int64_t{0}));
        }
        if (key_field_ == "privileged") {
            return record.value("user_id", "") + "\n" + record.value("repo_id", "") + "\n" +
                   record.value("action_kind", "") + "\n" + record.value("occurred_at", "");
        }
        return record.value(key_field_, "");
    }

    std::filesystem::path path_;
    std::string key_field_;
    std::unordered_set<std::string> keys_;
};

void touch_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        std::ofstream out(path, std::ios::binary | std::ios::app);
    }
}

// --- transports --------------------------------------------------------

class RecordedTransport final : public HttpTransport {
 public:
    explicit RecordedTransport(const std::filesystem::path& dir) {
        std::ifstream in(dir / "responses.json");
        if (!in) {
            throw IoFailure("recorded transport needs " + (dir / "responses.json").string());
        }
        json all = json::parse(in);
        for (const json& entry : all) {
            HttpResponse response;
            response.status = entry.value("status", 200);
            json headers = entry.value("headers", json::object());
            for (const auto& [k, v] : headers.items()) {
                response.headers[lower(k)] = v.get<std::string>();
            }
            if (entry.contains("body_json")) {
                response.body = entry["body_json"].dump();
            } else {
                response.body = entry.value("body", "");
            }
            queues_[entry.at("url").get<std::string>()].push_back(std::move(response));
        }
    }

    HttpResponse get(const std::string& url,
                     const std::vector<std::pair<std::string, std::string>>&) override {
        std::lock_guard lock(mutex_);
        auto it = queues_.find(url);
        if (it == queues_.end() || it->second.empty()) {
            return HttpResponse{404, {}, "{\"message\":\"Not Found\"}"};
        }
        // consume in sequence, last response is sticky
        HttpResponse response = it->second.front();
        if (it->second.size() > 1) {
            it->second.erase(it->second.begin());
        }
        return response;
    }

 private:
    std::mutex mutex_;
    std::map<std::string, std::vector<HttpResponse>> queues_;
};

}  // namespace

std::string_view to_string(Resource r) {
    switch (r) {
        case Resource::forks: return "forks";
        case Resource::commits: return "commits";
        case Resource::pulls: return "pulls";
        case Resource::issues: return "issues";
        case Resource::events: return "events";
        case Resource::stars: return "stars";
    }
    return "forks";
}

std::optional<Resource> parse_resource(std::string_view name) {
    if (name == "forks") return Resource::forks;
    if (name == "commits") return Resource::commits;
    if (name == "pulls") return Resource::pulls;
    if (name == "issues") return Resource::issues;
    if (name == "events") return Resource::events;
    if (name == "stars") return Resource::stars;
    return std::nullopt;
}

std::unique_ptr<HttpTransport> make_recorded_transport(const std::filesystem::path& dir) {
    return std::make_unique<RecordedTransport>(dir);
}

namespace {

// --- the fetch session --------------------------------------------------

class Fetcher {
 public:
    Fetcher(const FetchPlan& plan, std::filesystem::path dir, HttpTransport& transport)
        : plan_(plan),
          dir_(std::move(dir)),
          transport_(transport),
          forks_out_(dir_ / "forks.ndjson", "repo_id"),
          commits_out_(dir_ / "commits.ndjson", "repo_id+sha"),
          pulls_out_(dir_ / "pulls.ndjson", "pr_id"),
          issues_out_(dir_ / "issues.ndjson", "issue_id"),
          actions_out_(dir_ / "privileged_actions.ndjson", "privileged"),
          stars_out_(dir_ / "stars.ndjson", "starred_at") {
        cursor_ = load_cursor(dir_);
    }

    FetchReport run() {
        try {
            fetch_project();
            discover_forks();
            if (plan_.resources.count(Resource::commits)) {
                for (const auto& repo : repos_) {
                    run_task("commits:" + repo.full_name, [&](const std::string& resume) {
                        fetch_commits(repo, resume);
                    });
                }
            }
            if (plan_.resources.count(Resource::pulls)) {
                run_task("pulls", [&](const std::string& resume) { fetch_pulls(resume); });
            }
            if (plan_.resources.count(Resource::issues)) {
                run_task("issues", [&](const std::string& resume) { fetch_issues(resume); });
            }
            if (plan_.resources.count(Resource::events)) {
                run_task("events", [&](const std::string& resume) { fetch_events(resume); });
            }
            if (plan_.resources.count(Resource::stars)) {
                run_task("stars", [&](const std::string& resume) { fetch_stars(resume); });
            }
        } catch (const BudgetExhausted& b) {
            save_cursor(dir_, cursor_);
            throw PartialFetch(current_task_, b.url);
        } catch (const RateLimited&) {
            save_cursor(dir_, cursor_);
            throw;
        } catch (const json::exception& e) {
            save_cursor(dir_, cursor_);
            throw UpstreamSchemaChange(std::string("payload (") + e.what() + ")");
        }
        cursor_.current.reset();
        save_cursor(dir_, cursor_);
        report_.requests_used = requests_.load();
        return report_;
    }

 private:
    bool task_done(const std::string& task) const {
        return std::find(cursor_.done.begin(), cursor_.done.end(), task) != cursor_.done.end();
    }

    void run_task(const std::string& task, const std::function<void(std::string)>& body) {
        if (task_done(task)) {
            return;
        }
        current_task_ = task;
        std::string resume;
        if (cursor_.current && cursor_.current->first == task) {
            resume = cursor_.current->second;
        }
        cursor_.current = {task, resume};
        body(resume);
        cursor_.done.push_back(task);
        cursor_.current.reset();
    }

    void note_page(const std::string& task, const std::string& url) {
        cursor_.current = {task, url};
    }

    void bump_watermark(const std::string& kind, Timestamp t) {
        std::string text = format_rfc3339(t);
        auto it = cursor_.watermarks.find(kind);
        if (it == cursor_.watermarks.end() || it->second < text) {
            cursor_.watermarks[kind] = text;
        }
    }

    HttpResponse raw_get(const std::string& url, const std::string& accept) {
        long used = requests_.fetch_add(1);
        if (plan_.max_requests >= 0 && used >= plan_.max_requests) {
            throw BudgetExhausted{url};
        }
        std::vector<std::pair<std::string, std::string>> headers{
            {"Accept", accept}, {"User-Agent", "forkent"}, {"X-GitHub-Api-Version", "2022-11-28"}};
        if (!plan_.token.empty()) {
            headers.emplace_back("Authorization", "Bearer " + plan_.token);
        }
        HttpResponse response = transport_.get(url, headers);
        if (response.status == 401) {
            throw AuthFailure("401 unauthorized for " + url);
        }
        bool limited = response.status == 429;
        if (response.status == 403) {
            auto remaining = response.headers.find("x-ratelimit-remaining");
            if (response.headers.count("retry-after") ||
                (remaining != response.headers.end() && remaining->second == "0")) {
                limited = true;
            } else {
                throw AuthFailure("403 forbidden for " + url);
            }
        }
        if (limited) {
            long retry_after = 60;
            if (auto it = response.headers.find("retry-after"); it != response.headers.end()) {
                retry_after = std::atol(it->second.c_str());
            } else if (auto it2 = response.headers.find("x-ratelimit-reset");
                       it2 != response.headers.end()) {
                retry_after = std::max(0L, std::atol(it2->second.c_str()) -
                                               long(std::time(nullptr)));
            }
            throw RateLimited(retry_after);
        }
        return response;
    }

    json get_json(const std::string& url,
                  const std::string& accept = "application/vnd.github+json") {
        HttpResponse response = raw_get(url, accept);
        if (response.status != 200) {
            throw Error("http_error", "GET " + url + " returned status " +
                                          std::to_string(response.status));
        }
        try {
            return json::parse(response.body);
        } catch (const json::parse_error&) {
            throw UpstreamSchemaChange("body of " + url);
        }
    }

    // Pages through `url`, invoking `on_item` per array element; remembers
    // pagination progress for resume.
    void paginate(std::string url, const std::string& task,
                  const std::function<void(const json&)>& on_item,
                  const std::string& accept = "application/vnd.github+json") {
        while (!url.empty()) {
            note_page(task, url);
            HttpResponse response = raw_get(url, accept);
            if (response.status != 200) {
                throw Error("http_error", "GET " + url + " returned status " +
                                              std::to_string(response.status));
            }
            json page;
            try {
                page = json::parse(response.body);
            } catch (const json::parse_error&) {
                throw UpstreamSchemaChange("body of " + url);
            }
            if (!page.is_array()) {
                throw UpstreamSchemaChange("expected array from " + url);
            }
            for (const json& item : page) {
                on_item(item);
            }
            auto next = next_link(response.headers);
            url = next.value_or("");
        }
    }

    static std::string require_string(const json& obj, const char* key) {
        auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) {
            throw UpstreamSchemaChange(key);
        }
        if (it->is_string()) {
            return it->get<std::string>();
        }
        if (it->is_number_integer()) {
            return std::to_string(it->get<std::int64_t>());
        }
        throw UpstreamSchemaChange(key);
    }

    static std::string login_of(const json& obj, const char* key) {
        auto it = obj.find(key);
        if (it != obj.end() && it->is_object() && it->contains("login")) {
            return (*it)["login"].get<std::string>();
        }
        return "unknown";
    }

    void fetch_project() {
        if (task_done("project")) {
            // the ids/full names still seed later tasks
            json repo = get_json(plan_.api_base_url + "/repos/" + plan_.full_name);
            source_repo_id_ = require_string(repo, "id");
            return;
        }
        current_task_ = "project";
        json repo = get_json(plan_.api_base_url + "/repos/" + plan_.full_name);
        source_repo_id_ = require_string(repo, "id");
        json project{{"source_repo_id", source_repo_id_},
                     {"full_name", require_string(repo, "full_name")},
                     {"created_at", require_string(repo, "created_at")}};
        std::ofstream out(dir_ / "project.json", std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoFailure("cannot write project.json");
        }
        out << project.dump() << '\n';
        for (const char* name : {"forks.ndjson", "commits.ndjson", "pulls.ndjson",
                                 "issues.ndjson", "privileged_actions.ndjson", "stars.ndjson"}) {
            touch_file(dir_ / name);
        }
        cursor_.done.push_back("project");
    }

    struct RepoRef {
        std::string repo_id;
        std::string full_name;
    };

    // Breadth-first over the fork network ("forks of forks") up to
    // plan_.fork_depth levels; fills repos_ (source first) either way.
    void discover_forks() {
        repos_.push_back({source_repo_id_, plan_.full_name});
        if (!plan_.resources.count(Resource::forks)) {
            return;
        }
        run_task("forks", [&](const std::string&) {
            std::vector<std::pair<RepoRef, int>> queue{{repos_.front(), 0}};
            std::size_t head = 0;
            while (head < queue.size()) {
                auto [parent, depth] = queue[head++];
                if (plan_.fork_depth >= 0 && depth >= plan_.fork_depth) {
                    continue;
                }
                paginate(plan_.api_base_url + "/repos/" + parent.full_name +
                             "/forks?per_page=100",
                         "forks", [&](const json& item) {
                             RepoRef fork{require_string(item, "id"),
                                          require_string(item, "full_name")};
                             json record{{"repo_id", fork.repo_id},
                                         {"full_name", fork.full_name},
                                         {"owner_id", login_of(item, "owner")},
                                         {"parent_repo_id", parent.repo_id},
                                         {"created_at", require_string(item, "created_at")}};
                             if (forks_out_.append(record)) {
                                 ++report_.forks;
                             }
                             repos_.push_back(fork);
                             queue.emplace_back(fork, depth + 1);
                         });
            }
        });
        if (task_done("forks") && repos_.size() == 1) {
            // resumed run: recover the fork list from disk
            for_each_disk_fork();
        }
    }

    void for_each_disk_fork() {
        std::ifstream in(dir_ / "forks.ndjson");
        std::string line;
        while (in && std::getline(in, line)) {
            if (line.empty()) {
                continue;
            }
            try {
                json record = json::parse(line);
                repos_.push_back({record.value("repo_id", ""), record.value("full_name", "")});
            } catch (const json::parse_error&) {
            }
        }
    }

    // Commit listings are cheap; per-commit file stats need one detail call
    // each, fanned out over plan_.workers bounded threads.
    void fetch_commits(const RepoRef& repo, const std::string& resume) {
        std::string url = resume.empty()
                              ? plan_.api_base_url + "/repos/" + repo.full_name +
                                    "/commits?per_page=100" +
                                    (plan_.since ? "&since=" + format_rfc3339(*plan_.since) : "")
                              : resume;
        std::vector<std::string> detail_urls;
        std::vector<std::string> shas;
        paginate(url, "commits:" + repo.full_name, [&](const json& item) {
            std::string sha = require_string(item, "sha");
            if (commits_out_.known(repo.repo_id + "\n" + sha)) {
                return;
            }
            shas.push_back(sha);
            detail_urls.push_back(plan_.api_base_url + "/repos/" + repo.full_name + "/commits/" +
                                  sha);
        });

        std::vector<json> details = parallel_get(detail_urls);
        for (std::size_t i = 0; i < details.size(); ++i) {
            const json& detail = details[i];
            if (!detail.contains("commit") || !detail["commit"].is_object()) {
                throw UpstreamSchemaChange("commit");
            }
            const json& commit = detail["commit"];
            json files = json::array();
            for (const json& f : detail.value("files", json::array())) {
                files.push_back(json{{"path", require_string(f, "filename")},
                                     {"additions", f.value("additions", 0)},
                                     {"deletions", f.value("deletions", 0)}});
            }
            std::string committed_at =
                commit.contains("author") && commit["author"].is_object()
                    ? commit["author"].value("date", "")
                    : "";
            if (committed_at.empty()) {
                throw UpstreamSchemaChange("commit.author.date");
            }
            json record{{"sha", shas[i]},
                        {"repo_id", repo.repo_id},
                        {"author_id", login_of(detail, "author")},
                        {"committed_at", committed_at},
                        {"parent_count", detail.value("parents", json::array()).size()},
                        {"files", files},
                        {"message", commit.value("message", "")}};
            if (commits_out_.append(record)) {
                ++report_.commits;
                bump_watermark("commits", parse_rfc3339(committed_at));
            }
        }
    }

    void fetch_pulls(const std::string& resume) {
        std::string url = resume.empty() ? plan_.api_base_url + "/repos/" + plan_.full_name +
                                               "/pulls?state=all&per_page=100&sort=created&"
                                               "direction=asc"
                                         : resume;
        struct PendingPr {
            json item;
            std::int64_t number;
        };
        std::vector<PendingPr> pending;
        paginate(url, "pulls", [&](const json& item) {
            std::int64_t number = item.at("number").get<std::int64_t>();
            if (pulls_out_.known(std::to_string(number))) {
                return;
            }
            pending.push_back({item, number});
        });

        for (const PendingPr& pr : pending) {
            std::string base = plan_.api_base_url + "/repos/" + plan_.full_name;
            json commits = get_json(base + "/pulls/" + std::to_string(pr.number) + "/commits");
            json files = get_json(base + "/pulls/" + std::to_string(pr.number) + "/files");
            json comments = get_json(base + "/issues/" + std::to_string(pr.number) +
                                     "/comments?per_page=3&sort=created&direction=desc");

            json shas = json::array();
            for (const json& c : commits) {
                shas.push_back(require_string(c, "sha"));
            }
            json file_list = json::array();
            for (const json& f : files) {
                file_list.push_back(json{{"path", require_string(f, "filename")},
                                         {"additions", f.value("additions", 0)},
                                         {"deletions", f.value("deletions", 0)}});
            }
            json last_comments = json::array();
            {
                std::vector<std::string> bodies;
                for (const json& c : comments) {
                    bodies.push_back(c.value("body", ""));
                }
                std::reverse(bodies.begin(), bodies.end());  // newest last
                for (const std::string& b : bodies) {
                    last_comments.push_back(b);
                }
            }

            const json& head = pr.item.value("head", json::object());
            std::string head_repo_id = source_repo_id_;
            if (head.contains("repo") && head["repo"].is_object()) {
                head_repo_id = require_string(head["repo"], "id");
                ensure_fork_known(head["repo"]);
            }
            bool merged = pr.item.contains("merged_at") && !pr.item["merged_at"].is_null();
            json record{{"pr_id", pr.number},
                        {"source_repo_id", head_repo_id},
                        {"target_repo_id", source_repo_id_},
                        {"author_id", login_of(pr.item, "user")},
                        {"created_at", require_string(pr.item, "created_at")},
                        {"merged_action", merged},
                        {"commit_shas", shas},
                        {"files", file_list},
                        {"last_comments", last_comments}};
            if (pr.item.contains("closed_at") && !pr.item["closed_at"].is_null()) {
                record["closed_at"] = pr.item["closed_at"].get<std::string>();
            }
            if (pulls_out_.append(record)) {
                ++report_.pulls;
                bump_watermark("pulls", parse_rfc3339(record["created_at"].get<std::string>()));
            }
        }
    }

    // A PR head outside the discovered network (deleted fork, depth cap)
    // still needs a fork record for referential integrity.
    void ensure_fork_known(const json& repo) {
        std::string repo_id = require_string(repo, "id");
        if (repo_id == source_repo_id_ || forks_out_.known(repo_id)) {
            return;
        }
        json record{{"repo_id", repo_id},
                    {"full_name", repo.value("full_name", "unknown/unknown")},
                    {"owner_id", login_of(repo, "owner")},
                    {"parent_repo_id", source_repo_id_},
                    {"created_at", repo.value("created_at", "1970-01-01T00:00:00Z")}};
        if (forks_out_.append(record)) {
            ++report_.forks;
        }
    }

    void fetch_issues(const std::string& resume) {
        std::string url = resume.empty() ? plan_.api_base_url + "/repos/" + plan_.full_name +
                                               "/issues?state=all&per_page=100&direction=asc"
                                         : resume;
        paginate(url, "issues", [&](const json& item) {
            if (item.contains("pull_request")) {
                return;  // the issues listing interleaves PRs
            }
            json labels = json::array();
            for (const json& l : item.value("labels", json::array())) {
                if (l.is_object() && l.contains("name")) {
                    labels.push_back(l["name"].get<std::string>());
                }
            }
            json record{{"issue_id", require_string(item, "number")},
                        {"title", item.value("title", "")},
                        {"labels", labels},
                        {"created_at", require_string(item, "created_at")},
                        {"author_id", login_of(item, "user")}};
            if (record["title"].get<std::string>().empty()) {
                record["title"] = "(untitled)";
            }
            if (issues_out_.append(record)) {
                ++report_.issues;
                bump_watermark("issues", parse_rfc3339(record["created_at"].get<std::string>()));
            }
        });
    }

    void fetch_events(const std::string& resume) {
        std::string url = resume.empty() ? plan_.api_base_url + "/repos/" + plan_.full_name +
                                               "/issues/events?per_page=100"
                                         : resume;
        paginate(url, "events", [&](const json& item) {
            std::string event = item.value("event", "");
            if (event != "closed" && event != "merged") {
                return;
            }
            if (!item.contains("actor") || item["actor"].is_null()) {
                return;
            }
            std::string actor = login_of(item, "actor");
            const json& issue = item.value("issue", json::object());
            std::string author = login_of(issue, "user");
            std::string kind;
            if (event == "merged") {
                kind = "merge_pr";
            } else if (actor != author) {
                kind = issue.contains("pull_request") ? "close_pr_of_other"
                                                      : "close_issue_of_other";
            } else {
                return;  // closing your own issue is not privileged
            }
            json record{{"user_id", actor},
                        {"repo_id", source_repo_id_},
                        {"action_kind", kind},
                        {"occurred_at", require_string(item, "created_at")}};
            if (actions_out_.append(record)) {
                ++report_.privileged_actions;
            }
        });
    }

    void fetch_stars(const std::string& resume) {
        std::string url = resume.empty() ? plan_.api_base_url + "/repos/" + plan_.full_name +
                                               "/stargazers?per_page=100"
                                         : resume;
        paginate(
            url, "stars",
            [&](const json& item) {
                json record{{"starred_at", require_string(item, "starred_at")}};
                if (stars_out_.append(record)) {
                    ++report_.stars;
                }
            },
            "application/vnd.github.star+json");
    }

    // Fans GETs over bounded workers; results keep input order. The first
    // worker error wins and is rethrown on the caller thread.
    std::vector<json> parallel_get(const std::vector<std::string>& urls) {
        std::vector<json> results(urls.size());
        if (urls.empty()) {
            return results;
        }
        int workers = std::max(1, std::min<int>(plan_.workers, int(urls.size())));
        if (workers == 1) {
            for (std::size_t i = 0; i < urls.size(); ++i) {
                results[i] = get_json(urls[i]);
            }
            return results;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= urls.size()) {
                        return;
                    }
                    try {
                        results[i] = get_json(urls[i]);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) {
                            error = std::current_exception();
                        }
                        next.store(urls.size());
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        if (error) {
            std::rethrow_exception(error);
        }
        return results;
    }

    const FetchPlan& plan_;
    std::filesystem::path dir_;
    HttpTransport& transport_;
    FetchReport report_;
    CursorState cursor_;
    std::string current_task_ = "project";
    std::string source_repo_id_;
    std::vector<RepoRef> repos_;
    std::atomic<long> requests_{0};

    Appender forks_out_;
    Appender commits_out_;
    Appender pulls_out_;
    Appender issues_out_;
    Appender actions_out_;
    Appender stars_out_;
};

}  // namespace

FetchReport fetch(const FetchPlan& plan, const std::filesystem::path& out_dir,
                  HttpTransport& transport) {
    if (plan.full_name.empty() || plan.full_name.find('/') == std::string::npos) {
        throw std::invalid_argument("fetch plan needs an owner/repo full name");
    }
    if (plan.resources.empty()) {
        throw std::invalid_argument("fetch plan needs at least one resource");
    }
    if (plan.api_base_url.rfind("https://", 0) != 0) {
        throw std::invalid_argument("api base url must use https");
    }
    std::filesystem::create_directories(out_dir);
    Fetcher fetcher(plan, out_dir, transport);
    return fetcher.run();
}

CacheReport verify_cache(const std::filesystem::path& dir) {
    CacheReport report;
    data::EventDataset ds;
    bool loaded = false;
    try {
        ds = data::load_dataset(dir);
        loaded = true;
    } catch (const Error& e) {
        report.clean = false;
        report.findings.push_back(std::string(e.kind()) + ": " + e.what());
    }

    CursorState cursor = load_cursor(dir);
    if (cursor.current) {
        report.clean = false;
        report.findings.push_back("resume_pending: task " + cursor.current->first +
                                  " interrupted at " + cursor.current->second);
    }
    if (loaded) {
        auto check_watermark = [&](const char* kind, Timestamp newest, bool any) {
            auto it = cursor.watermarks.find(kind);
            if (it == cursor.watermarks.end()) {
                return;
            }
            Timestamp mark = parse_rfc3339(it->second);
            if (!any || mark > newest) {
                report.findings.push_back(std::string("CursorAhead: ") + kind +
                                          " watermark " + it->second +
                                          " is newer than the newest record");
            }
        };
        Timestamp newest_commit = 0, newest_pull = 0, newest_issue = 0;
        for (const auto& c : ds.commits) newest_commit = std::max(newest_commit, c.committed_at);
        for (const auto& p : ds.pulls) newest_pull = std::max(newest_pull, p.created_at);
        for (const auto& i : ds.issues) newest_issue = std::max(newest_issue, i.created_at);
        check_watermark("commits", newest_commit, !ds.commits.empty());
        check_watermark("pulls", newest_pull, !ds.pulls.empty());
        check_watermark("issues", newest_issue, !ds.issues.empty());
    }
    return report;
}

}  // namespace forkent::forge
