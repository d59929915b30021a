#include "sitecensus/crawler.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <future>
#include <map>

#include "sitecensus/markup.hpp"
#include "sitecensus/robots.hpp"

namespace sitecensus::crawler {

namespace {

struct QueueEntry {
    url::Url target;
    int depth = 0;
};

// Per-host rules, fetched lazily. Only touched from the single-threaded
// apply phase, so no locking.
class RobotsCache {
public:
    RobotsCache(fetch::Fetcher& fetcher, std::string user_agent, bool enabled)
        : fetcher_(fetcher), user_agent_(std::move(user_agent)), enabled_(enabled) {}

    bool allowed(const url::Url& u, const url::SiteScope& scope) {
        if (!enabled_) return true;
        std::string key = u.scheme == "file"
                              ? "file:" + scope.file_dir
                              : u.scheme + "://" + u.host + (u.port.empty() ? "" : ":" + u.port);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            url::Url robots_url;
            robots_url.scheme = u.scheme;
            if (u.scheme == "file") {
                robots_url.path = scope.file_dir + "robots.txt";
            } else {
                robots_url.host = u.host;
                robots_url.port = u.port;
                robots_url.path = "/robots.txt";
            }
            fetch::RawResponse r = fetcher_.get(robots_url);
            // Anything but a readable 200 means no restrictions.
            robots::RobotsRules rules = (r.transport_ok && r.status == 200)
                                            ? robots::RobotsRules::parse(r.body, user_agent_)
                                            : robots::RobotsRules::allow_all();
            it = cache_.emplace(std::move(key), std::move(rules)).first;
        }
        // File crawls treat the seed directory as the host root, so rule
        // prefixes like /private/ are matched against the path below it.
        std::string_view path = u.path;
        std::string rebased;
        if (u.scheme == "file" && path.starts_with(scope.file_dir)) {
            rebased.reserve(path.size() - scope.file_dir.size() + 1);
            rebased = "/";
            rebased.append(path.substr(scope.file_dir.size()));
            path = rebased;
        }
        return it->second.allows(path);
    }

private:
    fetch::Fetcher& fetcher_;
    std::string user_agent_;
    bool enabled_;
    std::map<std::string, robots::RobotsRules> cache_;
};

}  // namespace

void CrawlConfig::validate() const {
    if (max_pages < 1) throw std::invalid_argument("max_pages must be positive");
    if (max_depth < 0) throw std::invalid_argument("max_depth must be non-negative");
    if (delay_ms < 0) throw std::invalid_argument("delay_ms must be non-negative");
    if (timeout_ms < 1) throw std::invalid_argument("timeout_ms must be positive");
    if (parallelism < 1) throw std::invalid_argument("parallelism must be positive");
    auto seed = url::normalize_absolute(seed_url);
    if (!seed) throw std::invalid_argument("seed URL must be absolute http, https or file: " + seed_url);
    if (seed->scheme == "file" && seed->path.empty())
        throw std::invalid_argument("file seed URL needs a path: " + seed_url);
}

bool VisitedSet::insert(const std::string& normalized_url) {
    std::lock_guard<std::mutex> lock(mutex_);
    return urls_.insert(normalized_url).second;
}

bool VisitedSet::contains(const std::string& normalized_url) const {
    std::lock_guard<std::mutex> lock(mutex_);
    return urls_.contains(normalized_url);
}

std::size_t VisitedSet::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return urls_.size();
}

bool is_outbound(const url::Url& u, const CrawlConfig& config) {
    auto seed = url::normalize_absolute(config.seed_url);
    if (!seed) throw CrawlError("seed URL not usable: " + config.seed_url);
    return url::is_outbound(u, url::SiteScope::for_seed(*seed, config.treat_subdomains_inbound));
}

SiteCensus crawl(const CrawlConfig& config, const census::Lexicon& lexicon,
                 const census::ExtensionPolicy& policy, fetch::Fetcher& fetcher) {
    config.validate();
    policy.validate();
    auto seed = url::normalize_absolute(config.seed_url);
    url::SiteScope scope = url::SiteScope::for_seed(*seed, config.treat_subdomains_inbound);

    SiteCensus out;
    out.seed_url = seed->to_string();

    fetch::PolitenessGate gate;
    auto delay = std::chrono::milliseconds(config.delay_ms);
    RobotsCache robots(fetcher, config.user_agent, config.obey_robots);

    if (!robots.allowed(*seed, scope))
        throw CrawlError("seed disallowed by robots.txt: " + out.seed_url);

    std::deque<QueueEntry> frontier;
    VisitedSet admitted;
    std::unordered_set<std::string> censused_finals;

    frontier.push_back({*seed, 0});
    admitted.insert(out.seed_url);
    bool first_result = true;

    while (!frontier.empty()) {
        if (out.pages_visited >= static_cast<std::uint64_t>(config.max_pages)) break;

        std::vector<QueueEntry> batch;
        while (!frontier.empty() && batch.size() < static_cast<std::size_t>(config.parallelism)) {
            batch.push_back(std::move(frontier.front()));
            frontier.pop_front();
        }

        std::vector<fetch::PageSource> results(batch.size());
        if (batch.size() == 1) {
            results[0] = fetch::fetch_page(batch[0].target, scope, fetcher, &gate, delay,
                                           batch[0].depth);
        } else {
            std::vector<std::future<fetch::PageSource>> futures;
            futures.reserve(batch.size());
            for (const auto& entry : batch) {
                futures.push_back(std::async(std::launch::async, [&, entry] {
                    return fetch::fetch_page(entry.target, scope, fetcher, &gate, delay,
                                             entry.depth);
                }));
            }
            for (std::size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
        }

        // Results apply strictly in dequeue order so any parallelism yields
        // the same census, per-page list and limit behavior.
        for (std::size_t i = 0; i < results.size(); ++i) {
            fetch::PageSource& page = results[i];
            if (out.pages_visited >= static_cast<std::uint64_t>(config.max_pages)) continue;

            if (!page.ok) {
                if (first_result) throw CrawlError("seed unreachable: " + page.error);
                ++out.pages_failed;
                continue;
            }
            if (!fetch::looks_html(page)) {
                if (first_result)
                    throw CrawlError("seed is not an HTML page: " + page.final_url.to_string());
                ++out.pages_non_html;
                continue;
            }
            first_result = false;

            std::string final_str = page.final_url.to_string();
            if (!censused_finals.insert(final_str).second) continue;

            std::string body = markup::utf8_sanitize(page.body);
            markup::SegmentStream stream = markup::scan(body);
            census::PageCensus pc = census::census_stream(stream, page.final_url, scope, lexicon, policy);

            out.census += pc.census;
            out.scorm.merge(pc.scorm);
            out.links_skipped += pc.links.skipped;
            out.per_page.push_back({final_str, pc.census});
            ++out.pages_visited;

            if (page.depth >= config.max_depth) continue;
            std::vector<std::pair<std::string, url::Url>> fresh;
            for (const auto& link : census::walk_links(stream, page.final_url, scope, policy)) {
                if (link.kind != census::LinkKind::Inbound) continue;
                std::string key = link.resolved.to_string();
                if (admitted.contains(key)) continue;
                admitted.insert(key);
                if (!robots.allowed(link.resolved, scope)) {
                    ++out.robots_skipped;
                    continue;
                }
                fresh.emplace_back(std::move(key), link.resolved);
            }
            std::sort(fresh.begin(), fresh.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            for (auto& [key, target] : fresh) frontier.push_back({std::move(target), page.depth + 1});
        }
    }
    return out;
}

SiteCensus crawl(const CrawlConfig& config, const census::Lexicon& lexicon,
                 const census::ExtensionPolicy& policy) {
    config.validate();
    if (config.offline_root) {
        fetch::FileFetcher backend(*config.offline_root);
        return crawl(config, lexicon, policy, backend);
    }
    auto backend = fetch::make_http_fetcher(config.timeout_ms, config.user_agent);
    return crawl(config, lexicon, policy, *backend);
}

}  // namespace sitecensus::crawler
