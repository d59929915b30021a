#include "sitecensus/crawler.hpp"

#include <atomic>
#include <chrono>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "sitecensus/robots.hpp"

// keep the httplib configuration identical to the library's fetch backend
#ifdef SITECENSUS_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

using namespace sitecensus;
using crawler::CrawlConfig;
using crawler::CrawlError;
using crawler::SiteCensus;

namespace {

const std::string kFixtures = FIXTURES_DIR;

CrawlConfig offline_config(const std::string& seed_path) {
    CrawlConfig c;
    c.seed_url = "file://" + seed_path;
    c.delay_ms = 0;
    c.offline_root = kFixtures;
    return c;
}

SiteCensus crawl_offline(const CrawlConfig& config) {
    fetch::FileFetcher backend(kFixtures);
    return crawler::crawl(config, census::Lexicon{}, census::ExtensionPolicy{}, backend);
}

fetch::RawResponse ok_html(std::string body) {
    fetch::RawResponse r;
    r.transport_ok = true;
    r.status = 200;
    r.content_type = "text/html";
    r.body = std::move(body);
    return r;
}

fetch::RawResponse redirect_to(std::string location, int status = 302) {
    fetch::RawResponse r;
    r.transport_ok = true;
    r.status = status;
    r.location = std::move(location);
    return r;
}

// Canned responses keyed by normalized URL; unknown URLs 404.
class FakeFetcher : public fetch::Fetcher {
public:
    std::map<std::string, fetch::RawResponse> responses;
    std::vector<std::string> requests;

    fetch::RawResponse get(const url::Url& u) override {
        requests.push_back(u.to_string());
        auto it = responses.find(u.to_string());
        if (it != responses.end()) return it->second;
        fetch::RawResponse r;
        r.transport_ok = true;
        r.status = 404;
        return r;
    }
};

class RecordingFileFetcher : public fetch::Fetcher {
public:
    explicit RecordingFileFetcher(const std::string& root) : inner_(root) {}
    fetch::RawResponse get(const url::Url& u) override {
        requests.push_back(u.to_string());
        return inner_.get(u);
    }
    std::vector<std::string> requests;

private:
    fetch::FileFetcher inner_;
};

url::SiteScope scope_for(const std::string& seed) {
    return url::SiteScope::for_seed(*url::normalize_absolute(seed), false);
}

}  // namespace

TEST_CASE("fetch_page follows a redirect chain to the final page") {
    FakeFetcher f;
    f.responses["http://s.edu/a.html"] = redirect_to("/b.html");
    f.responses["http://s.edu/b.html"] = redirect_to("c.html", 301);
    f.responses["http://s.edu/c.html"] = ok_html("<p>done</p>");

    auto page = fetch::fetch_page(*url::normalize_absolute("http://s.edu/a.html"),
                                  scope_for("http://s.edu/"), f, nullptr,
                                  std::chrono::milliseconds(0), 0);
    CHECK(page.ok);
    CHECK(page.status == 200);
    CHECK(page.final_url.to_string() == "http://s.edu/c.html");
    CHECK(page.requested_url == "http://s.edu/a.html");
    CHECK(page.body == "<p>done</p>");
    CHECK(f.requests == std::vector<std::string>{"http://s.edu/a.html", "http://s.edu/b.html",
                                                 "http://s.edu/c.html"});
}

TEST_CASE("fetch_page refuses redirects that leave the site") {
    FakeFetcher f;
    f.responses["http://s.edu/a.html"] = redirect_to("http://evil.com/x.html");
    f.responses["http://evil.com/x.html"] = ok_html("<p>gotcha</p>");

    auto page = fetch::fetch_page(*url::normalize_absolute("http://s.edu/a.html"),
                                  scope_for("http://s.edu/"), f, nullptr,
                                  std::chrono::milliseconds(0), 0);
    CHECK_FALSE(page.ok);
    CHECK(page.error.find("redirect left the site") != std::string::npos);
    // the off-site URL is never requested
    CHECK(f.requests == std::vector<std::string>{"http://s.edu/a.html"});
}

TEST_CASE("fetch_page gives up after five redirect hops") {
    FakeFetcher f;
    for (int i = 1; i <= 7; ++i)
        f.responses["http://s.edu/r" + std::to_string(i)] =
            redirect_to("/r" + std::to_string(i + 1));
    f.responses["http://s.edu/r6"] = ok_html("<p>six hops</p>");

    // five hops reach r6
    auto five = fetch::fetch_page(*url::normalize_absolute("http://s.edu/r1"),
                                  scope_for("http://s.edu/"), f, nullptr,
                                  std::chrono::milliseconds(0), 0);
    CHECK(five.ok);
    CHECK(five.final_url.to_string() == "http://s.edu/r6");

    // six don't
    f.responses["http://s.edu/r6"] = redirect_to("/r7");
    f.responses["http://s.edu/r7"] = ok_html("<p>seven</p>");
    auto six = fetch::fetch_page(*url::normalize_absolute("http://s.edu/r1"),
                                 scope_for("http://s.edu/"), f, nullptr,
                                 std::chrono::milliseconds(0), 0);
    CHECK_FALSE(six.ok);
    CHECK(six.error == "too many redirects");
}

TEST_CASE("fetch_page reports non-2xx statuses and missing locations as errors") {
    FakeFetcher f;
    fetch::RawResponse gone404;
    gone404.transport_ok = true;
    gone404.status = 404;
    f.responses["http://s.edu/gone.html"] = gone404;
    fetch::RawResponse stray;
    stray.transport_ok = true;
    stray.status = 302;  // no Location header
    f.responses["http://s.edu/stray.html"] = stray;

    auto gone = fetch::fetch_page(*url::normalize_absolute("http://s.edu/gone.html"),
                                  scope_for("http://s.edu/"), f, nullptr,
                                  std::chrono::milliseconds(0), 0);
    CHECK_FALSE(gone.ok);
    CHECK(gone.error == "http status 404");

    auto lost = fetch::fetch_page(*url::normalize_absolute("http://s.edu/stray.html"),
                                  scope_for("http://s.edu/"), f, nullptr,
                                  std::chrono::milliseconds(0), 0);
    CHECK_FALSE(lost.ok);
    CHECK(lost.error == "http status 302");
}

TEST_CASE("file fetcher serves, 404s, indexes directories and refuses escapes") {
    fetch::FileFetcher f(kFixtures);

    auto ok = f.get(*url::normalize_absolute("file:///sites/site_a/index.html"));
    CHECK(ok.status == 200);
    CHECK(ok.content_type == "text/html");
    CHECK(ok.body.find("Site A") != std::string::npos);

    auto pdf = f.get(*url::normalize_absolute("file:///sites/site_a/notes.pdf"));
    CHECK(pdf.status == 200);
    CHECK(pdf.content_type == "application/pdf");

    auto missing = f.get(*url::normalize_absolute("file:///sites/site_a/nope.html"));
    CHECK(missing.status == 404);

    auto dir = f.get(*url::normalize_absolute("file:///sites/site_a/"));
    CHECK(dir.status == 200);
    CHECK(dir.body.find("Site A") != std::string::npos);

    // encoded dot segments survive normalization but not containment
    url::Url sneaky;
    sneaky.scheme = "file";
    sneaky.path = "/sites/%2e%2e/%2e%2e/etc/passwd";
    CHECK(f.get(sneaky).status == 403);
}

TEST_CASE("looks_html decides by content type, then by extension") {
    fetch::PageSource p;
    p.content_type = "text/html; charset=utf-8";
    CHECK(fetch::looks_html(p));
    p.content_type = "TEXT/HTML";
    CHECK(fetch::looks_html(p));
    p.content_type = "application/pdf";
    CHECK_FALSE(fetch::looks_html(p));

    p.content_type.reset();
    p.final_url = *url::normalize_absolute("http://s.edu/page.html");
    CHECK(fetch::looks_html(p));
    p.final_url = *url::normalize_absolute("http://s.edu/page");
    CHECK(fetch::looks_html(p));
    p.final_url = *url::normalize_absolute("http://s.edu/file.pdf");
    CHECK_FALSE(fetch::looks_html(p));
}

TEST_CASE("robots rules: prefixes, ties and group selection") {
    using robots::RobotsRules;

    auto basic = RobotsRules::parse("User-agent: *\nDisallow: /private/\n", "sitecensus/0.1");
    CHECK(basic.allows("/index.html"));
    CHECK_FALSE(basic.allows("/private/secret.html"));
    CHECK(basic.allows("/privateer.html"));  // prefix is /private/ with the slash
    CHECK(basic.allows("/priv.html"));

    auto tie = RobotsRules::parse("User-agent: *\nDisallow: /p\nAllow: /p\n", "ua");
    CHECK(tie.allows("/p"));  // allow wins equal-length ties

    auto nested = RobotsRules::parse("User-agent: *\nDisallow: /p/\nAllow: /p/pub/\n", "ua");
    CHECK_FALSE(nested.allows("/p/x.html"));
    CHECK(nested.allows("/p/pub/x.html"));  // longest prefix wins

    auto grouped = RobotsRules::parse(
        "User-agent: sitecensus\nDisallow: /only-for-us/\n\nUser-agent: *\nDisallow: /\n",
        "sitecensus/0.1");
    CHECK(grouped.allows("/anything.html"));  // specific group, not the catch-all
    CHECK_FALSE(grouped.allows("/only-for-us/x"));

    auto starred = RobotsRules::parse(
        "User-agent: sitecensus\nDisallow: /only-for-us/\n\nUser-agent: *\nDisallow: /\n",
        "otherbot/2.0");
    CHECK_FALSE(starred.allows("/anything.html"));

    auto shared = RobotsRules::parse(
        "User-agent: abot\nUser-agent: bbot\nDisallow: /x/\n", "bbot/1.0");
    CHECK_FALSE(shared.allows("/x/y"));  // consecutive agent lines share a group

    CHECK(RobotsRules::parse("# nothing here\n", "ua").allows("/a"));
    CHECK(RobotsRules::allow_all().allows("/anything"));
    // empty-value disallow lines are ignored, not treated as "disallow nothing"
    CHECK(RobotsRules::parse("User-agent: *\nDisallow:\n", "ua").allows("/a"));
}

TEST_CASE("crawl obeys robots.txt and tallies what it skipped") {
    auto config = offline_config("/robots_root/index.html");
    auto site = crawl_offline(config);
    CHECK(site.pages_visited == 2);  // index + open, not private/secret
    CHECK(site.robots_skipped == 1);
    CHECK(site.pages_failed == 0);
    REQUIRE(site.per_page.size() == 2);
    CHECK(site.per_page[0].url == "file:///robots_root/index.html");
    CHECK(site.per_page[1].url == "file:///robots_root/open.html");

    config.obey_robots = false;
    auto all = crawl_offline(config);
    CHECK(all.pages_visited == 3);
    CHECK(all.robots_skipped == 0);
}

TEST_CASE("crawl aborts when robots.txt disallows the seed itself") {
    FakeFetcher f;
    f.responses["http://s.edu/robots.txt"] = [] {
        fetch::RawResponse r;
        r.transport_ok = true;
        r.status = 200;
        r.content_type = "text/plain";
        r.body = "User-agent: *\nDisallow: /\n";
        return r;
    }();
    f.responses["http://s.edu/"] = ok_html("<p>never reached</p>");

    CrawlConfig config;
    config.seed_url = "http://s.edu/";
    config.delay_ms = 0;
    CHECK_THROWS_AS(crawler::crawl(config, census::Lexicon{}, census::ExtensionPolicy{}, f),
                    CrawlError);
    // only robots.txt was requested
    CHECK(f.requests == std::vector<std::string>{"http://s.edu/robots.txt"});
}

TEST_CASE("site_a crawl matches the hand-counted totals") {
    auto site = crawl_offline(offline_config("/sites/site_a/index.html"));
    CHECK(site.pages_visited == 3);
    CHECK(site.pages_failed == 0);
    CHECK(site.census.word_count == 10);
    CHECK(site.census.image_count == 1);
    CHECK(site.census.audio_count == 1);
    CHECK(site.census.video_count == 0);
    CHECK(site.census.active_content_count == 0);
    CHECK(site.census.downloadable_content_count == 1);
    CHECK(site.census.script_functions == 1);
    CHECK(site.census.form_control_count == 0);
    CHECK(site.census.inbound_link_count == 3);
    CHECK(site.census.outbound_link_count == 1);
    CHECK(site.census.pages_counted == 3);
    CHECK_FALSE(site.scorm.looks_scorm);
}

TEST_CASE("site_b crawl matches the hand-counted totals") {
    auto site = crawl_offline(offline_config("/sites/site_b/index.html"));
    CHECK(site.pages_visited == 2);
    CHECK(site.census.word_count == 8);
    CHECK(site.census.video_count == 1);
    CHECK(site.census.form_control_count == 2);
    CHECK(site.census.inbound_link_count == 2);
    CHECK(site.census.outbound_link_count == 0);
}

TEST_CASE("cycle crawl visits every page once and never leaves the site") {
    auto config = offline_config("/sites/site_cycle/index.html");
    RecordingFileFetcher recorder(kFixtures);
    auto site = crawler::crawl(config, census::Lexicon{}, census::ExtensionPolicy{}, recorder);

    CHECK(site.pages_visited == 9);
    CHECK(site.pages_failed == 1);  // missing.html
    CHECK(site.census.inbound_link_count == 11);
    CHECK(site.census.outbound_link_count == 1);
    CHECK(site.census.downloadable_content_count == 1);

    // breadth-first, ties broken by URL order
    std::vector<std::string> order;
    for (const auto& p : site.per_page) order.push_back(p.url);
    const std::string base = "file:///sites/site_cycle/";
    CHECK(order == std::vector<std::string>{base + "index.html", base + "a.html", base + "c.html",
                                            base + "d.html", base + "b.html", base + "f.html",
                                            base + "g.html", base + "e.html", base + "h.html"});

    // the outbound canary and the pdf are never fetched, and nothing twice
    std::map<std::string, int> seen;
    for (const auto& r : recorder.requests) {
        CHECK(r.find("outbound.html") == std::string::npos);
        CHECK(r.find("paper.pdf") == std::string::npos);
        ++seen[r];
    }
    for (const auto& [target, count] : seen) {
        CAPTURE(target);
        CHECK(count == 1);
    }
}

TEST_CASE("max_pages and max_depth bound the crawl") {
    auto config = offline_config("/sites/site_cycle/index.html");
    config.max_pages = 3;
    auto capped = crawl_offline(config);
    CHECK(capped.pages_visited == 3);
    REQUIRE(capped.per_page.size() == 3);
    CHECK(capped.per_page[2].url == "file:///sites/site_cycle/c.html");

    config = offline_config("/sites/site_cycle/index.html");
    config.max_depth = 1;
    auto shallow = crawl_offline(config);
    CHECK(shallow.pages_visited == 4);  // index + a, c, d
    CHECK(shallow.pages_failed == 0);

    config.max_depth = 0;
    auto seed_only = crawl_offline(config);
    CHECK(seed_only.pages_visited == 1);
}

TEST_CASE("parallel crawls census exactly like serial ones") {
    auto config = offline_config("/sites/site_cycle/index.html");
    auto serial = crawl_offline(config);
    config.parallelism = 4;
    auto parallel = crawl_offline(config);

    CHECK(serial.census == parallel.census);
    CHECK(serial.pages_visited == parallel.pages_visited);
    CHECK(serial.pages_failed == parallel.pages_failed);
    CHECK(serial.links_skipped == parallel.links_skipped);
    REQUIRE(serial.per_page.size() == parallel.per_page.size());
    for (std::size_t i = 0; i < serial.per_page.size(); ++i) {
        CHECK(serial.per_page[i].url == parallel.per_page[i].url);
        CHECK(serial.per_page[i].census == parallel.per_page[i].census);
    }

    // limits interact identically with batching
    config.max_pages = 3;
    auto capped_parallel = crawl_offline(config);
    config.parallelism = 1;
    auto capped_serial = crawl_offline(config);
    CHECK(capped_serial.census == capped_parallel.census);
    REQUIRE(capped_parallel.per_page.size() == 3);
    CHECK(capped_parallel.per_page[2].url == "file:///sites/site_cycle/c.html");
}

TEST_CASE("unusable seeds raise CrawlError") {
    CHECK_THROWS_AS(crawl_offline(offline_config("/sites/site_a/nope.html")), CrawlError);
    CHECK_THROWS_AS(crawl_offline(offline_config("/sites/site_a/notes.pdf")), CrawlError);

    FakeFetcher hostile;
    hostile.responses["http://s.edu/"] = redirect_to("http://elsewhere.com/");
    CrawlConfig config;
    config.seed_url = "http://s.edu/";
    config.delay_ms = 0;
    CHECK_THROWS_AS(
        crawler::crawl(config, census::Lexicon{}, census::ExtensionPolicy{}, hostile),
        CrawlError);
}

TEST_CASE("config validation rejects nonsense") {
    CrawlConfig config;
    config.seed_url = "http://s.edu/";
    CHECK_NOTHROW(config.validate());

    auto broken = config;
    broken.max_pages = 0;
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
    broken = config;
    broken.max_depth = -1;
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
    broken = config;
    broken.delay_ms = -5;
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
    broken = config;
    broken.parallelism = 0;
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
    broken = config;
    broken.seed_url = "ftp://s.edu/";
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
    broken = config;
    broken.seed_url = "not a url";
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}

TEST_CASE("is_outbound treats the seed itself as inbound") {
    CrawlConfig config;
    config.seed_url = "http://s.edu/dir/index.html";
    CHECK_FALSE(crawler::is_outbound(*url::normalize_absolute(config.seed_url), config));
    CHECK(crawler::is_outbound(*url::normalize_absolute("http://other.org/"), config));

    config.seed_url = "http://s.edu/";
    CHECK(crawler::is_outbound(*url::normalize_absolute("http://sub.s.edu/"), config));
    config.treat_subdomains_inbound = true;
    CHECK_FALSE(crawler::is_outbound(*url::normalize_absolute("http://sub.s.edu/"), config));
}

TEST_CASE("politeness gate spaces same-host requests") {
    fetch::PolitenessGate gate;
    auto start = std::chrono::steady_clock::now();
    gate.acquire("one.test", std::chrono::milliseconds(60));
    gate.acquire("two.test", std::chrono::milliseconds(60));
    auto mid = std::chrono::steady_clock::now();
    // distinct hosts don't wait on each other
    CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(mid - start).count() < 50);

    gate.acquire("one.test", std::chrono::milliseconds(60));
    auto end = std::chrono::steady_clock::now();
    CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count() >= 55);
}

TEST_CASE("http crawl against a loopback server") {
    httplib::Server server;
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("<html><body><p>root</p><a href=\"two.html\">t</a>"
                        "<a href=\"r\">r</a></body></html>",
                        "text/html");
    });
    server.Get("/two.html", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("<html><body><p>two words</p><img src=\"pic.jpg\"></body></html>",
                        "text/html");
    });
    server.Get("/r", [](const httplib::Request&, httplib::Response& res) {
        res.set_redirect("/three.html");
    });
    server.Get("/three.html", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("<html><body><p>three</p></body></html>", "text/html");
    });

    int port = server.bind_to_any_port("127.0.0.1");
    if (port <= 0) {
        MESSAGE("loopback bind unavailable; skipping");
        return;
    }
    std::thread runner([&server] { server.listen_after_bind(); });
    server.wait_until_ready();

    CrawlConfig config;
    config.seed_url = "http://127.0.0.1:" + std::to_string(port) + "/";
    config.delay_ms = 0;
    config.timeout_ms = 5000;
    auto site = crawler::crawl(config, census::Lexicon{}, census::ExtensionPolicy{});

    server.stop();
    runner.join();

    CHECK(site.pages_visited == 3);
    CHECK(site.pages_failed == 0);
    CHECK(site.census.word_count == 6);  // root t r + two words + three
    CHECK(site.census.image_count == 1);
    CHECK(site.census.inbound_link_count == 2);
    REQUIRE(site.per_page.size() == 3);
    const std::string base = "http://127.0.0.1:" + std::to_string(port) + "/";
    CHECK(site.per_page[0].url == base);
    CHECK(site.per_page[1].url == base + "three.html");  // /r redirected
    CHECK(site.per_page[2].url == base + "two.html");
}
