#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "sitecensus/url.hpp"

namespace sitecensus::fetch {

/// One fetched page, after redirects.
struct PageSource {
    std::string requested_url;
    url::Url final_url;
    int status = 0;  // 0 = no HTTP-like status (transport failure)
    std::optional<std::string> content_type;
    std::string body;  // present iff ok
    int depth = 0;
    bool ok = false;
    std::string error;  // non-empty on failure
};

/// Single round trip, no redirect following.
struct RawResponse {
    int status = 0;
    std::optional<std::string> location;
    std::optional<std::string> content_type;
    std::string body;
    bool transport_ok = false;
    std::string error;
};

class Fetcher {
public:
    virtual ~Fetcher() = default;
    virtual RawResponse get(const url::Url& u) = 0;
};

/// Serves file:// URLs from a fixture root: the URL path is taken relative
/// to the root, and anything escaping the root is refused.
class FileFetcher : public Fetcher {
public:
    explicit FileFetcher(std::filesystem::path root);
    RawResponse get(const url::Url& u) override;

private:
    std::filesystem::path root_;
};

/// HTTP(S) backend. Sends the configured User-Agent; never follows
/// redirects itself (fetch_page owns that).
std::unique_ptr<Fetcher> make_http_fetcher(int timeout_ms, std::string user_agent);

/// Per-host minimum spacing between requests, shared across crawl workers.
class PolitenessGate {
public:
    void acquire(const std::string& host, std::chrono::milliseconds delay);

private:
    std::mutex mutex_;
    std::map<std::string, std::chrono::steady_clock::time_point> next_slot_;
};

/// Fetch with up to `max_redirects` hops. Every hop is normalized and
/// re-checked against the scope; a hop that leaves the site fails the fetch.
/// Never throws: failures come back in PageSource::error.
PageSource fetch_page(const url::Url& target, const url::SiteScope& scope, Fetcher& fetcher,
                      PolitenessGate* gate, std::chrono::milliseconds delay, int depth,
                      int max_redirects = 5);

/// Heuristic from the crawl contract: Content-Type containing "html", or,
/// with no Content-Type, a path extension in {none, htm, html}.
bool looks_html(const PageSource& page);

}  // namespace sitecensus::fetch
