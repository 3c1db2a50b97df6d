#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forkent/time.hpp"

namespace forkent::forge {

struct HttpResponse {
    int status = 0;
    std::map<std::string, std::string> headers;  // lowercase keys
    std::string body;
};

// One GET at a time; implementations must be callable from several worker
// threads at once.
class HttpTransport {
 public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse get(const std::string& url,
                             const std::vector<std::pair<std::string, std::string>>& headers) = 0;
};

// Live transport backed by cpp-httplib.
std::unique_ptr<HttpTransport> make_live_transport();

// Replays canned responses from `<dir>/responses.json`:
//   [{"url": "...", "status": 200, "headers": {...}, "body": "..."} , ...]
// ("body_json" may replace "body"). Unknown URLs get 404. No network.
std::unique_ptr<HttpTransport> make_recorded_transport(const std::filesystem::path& dir);

enum class Resource { forks, commits, pulls, issues, events, stars };

std::string_view to_string(Resource r);
std::optional<Resource> parse_resource(std::string_view name);

struct FetchPlan {
    std::string api_base_url = "https://api.github.com";
    std::string full_name;  // "owner/repo"
    std::set<Resource> resources{Resource::forks,  Resource::commits, Resource::pulls,
                                 Resource::issues, Resource::events,  Resource::stars};
    std::optional<Timestamp> since;
    std::string token;     // empty = anonymous
    int workers = 4;       // bounded in-flight detail requests
    long max_requests = -1;  // -1 = unlimited
    int fork_depth = -1;   // transitive fork discovery depth, -1 = full
};

struct FetchReport {
    std::size_t forks = 0;
    std::size_t commits = 0;
    std::size_t pulls = 0;
    std::size_t issues = 0;
    std::size_t privileged_actions = 0;
    std::size_t stars = 0;
    long requests_used = 0;
};

// Populates/extends a dataset directory in the normalized NDJSON schema.
// Appending is idempotent per record key; a cursor file (cursors.json)
// records pending work so an interrupted fetch resumes. Throws RateLimited,
// AuthFailure, UpstreamSchemaChange, PartialFetch.
FetchReport fetch(const FetchPlan& plan, const std::filesystem::path& out_dir,
                  HttpTransport& transport);

struct CacheReport {
    bool clean = true;
    std::vector<std::string> findings;
};

// load_dataset-grade validation plus cursor consistency (pending work,
// watermarks ahead of the newest record).
CacheReport verify_cache(const std::filesystem::path& dir);

}  // namespace forkent::forge
