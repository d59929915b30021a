#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "sitecensus/census.hpp"
#include "sitecensus/fetch.hpp"
#include "sitecensus/url.hpp"

namespace sitecensus::crawler {

struct CrawlConfig {
    std::string seed_url;
    int max_pages = 200;
    int max_depth = 10;
    int delay_ms = 500;
    int timeout_ms = 10000;
    std::string user_agent = "sitecensus/0.1";
    bool treat_subdomains_inbound = false;
    int parallelism = 1;
    bool obey_robots = true;
    std::optional<std::filesystem::path> offline_root;  // enables the file backend

    /// Throws std::invalid_argument on out-of-range limits or a seed whose
    /// scheme is not http/https/file.
    void validate() const;
};

/// Normalized URLs already censused; insert-if-absent is atomic.
class VisitedSet {
public:
    bool insert(const std::string& normalized_url);
    bool contains(const std::string& normalized_url) const;
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::unordered_set<std::string> urls_;
};

struct PerPageEntry {
    std::string url;  // final URL after redirects
    census::ElementCensus census;
};

struct SiteCensus {
    std::string seed_url;
    census::ElementCensus census;  // field-wise sum of per_page
    census::ScormFindings scorm;   // union over pages
    std::uint64_t pages_visited = 0;
    std::uint64_t pages_failed = 0;
    std::uint64_t links_skipped = 0;
    std::uint64_t pages_non_html = 0;
    std::uint64_t robots_skipped = 0;
    std::vector<PerPageEntry> per_page;
};

class CrawlError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

bool is_outbound(const url::Url& u, const CrawlConfig& config);

/// Breadth-first same-site crawl from the seed. Deterministic for any
/// parallelism: the frontier is ordered by discovery and batch results are
/// applied in batch order. Throws CrawlError when the seed is unusable
/// (invalid, unreachable, or redirecting off-site).
SiteCensus crawl(const CrawlConfig& config, const census::Lexicon& lexicon,
                 const census::ExtensionPolicy& policy, fetch::Fetcher& fetcher);

/// Convenience overload that builds the file or HTTP backend from the config.
SiteCensus crawl(const CrawlConfig& config, const census::Lexicon& lexicon,
                 const census::ExtensionPolicy& policy);

}  // namespace sitecensus::crawler
