// Live HTTP transport over cpp-httplib, in its own translation unit so the
// big header is compiled once. HTTPS needs OpenSSL at build time.

#if FORKENT_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include <httplib.h>

#include <cctype>

#include "forkent/errors.hpp"
#include "forkent/forge/client.hpp"

namespace forkent::forge {

namespace {

class LiveTransport final : public HttpTransport {
 public:
    HttpResponse get(const std::string& url,
                     const std::vector<std::pair<std::string, std::string>>& headers) override {
        std::size_t scheme = url.find("://");
        if (scheme == std::string::npos) {
            throw Error("network_error", "unsupported url: " + url);
        }
        std::size_t path_pos = url.find('/', scheme + 3);
        std::string origin = path_pos == std::string::npos ? url : url.substr(0, path_pos);
        std::string path = path_pos == std::string::npos ? "/" : url.substr(path_pos);

#if !FORKENT_HAVE_OPENSSL
        if (origin.rfind("https://", 0) == 0) {
            throw Error("network_error",
                        "built without OpenSSL; https fetch is unavailable: " + url);
        }
#endif
        httplib::Client client(origin);
        client.set_follow_location(true);
        client.set_connection_timeout(30);
        client.set_read_timeout(60);

        httplib::Headers request_headers;
        for (const auto& [key, value] : headers) {
            request_headers.emplace(key, value);
        }
        httplib::Result result = client.Get(path, request_headers);
        if (!result) {
            throw Error("network_error",
                        "GET " + url + " failed: " + httplib::to_string(result.error()));
        }
        HttpResponse response;
        response.status = result->status;
        response.body = result->body;
        for (const auto& [key, value] : result->headers) {
            std::string lower = key;
            for (char& c : lower) {
                c = char(std::tolower(static_cast<unsigned char>(c)));
            }
            response.headers[lower] = value;
        }
        return response;
    }
};

}  // namespace

std::unique_ptr<HttpTransport> make_live_transport() {
    return std::make_unique<LiveTransport>();
}

}  // namespace forkent::forge
