#include "sitecensus/url.hpp"

#include <string>

#include "doctest.h"

using namespace sitecensus::url;

namespace {

std::string resolve(const std::string& base, const std::string& ref) {
    auto b = normalize_absolute(base);
    REQUIRE(b.has_value());
    auto r = normalize_url(*b, ref);
    if (!r) return "<unresolvable>";
    return r->to_string();
}

}  // namespace

TEST_CASE("parse_url splits the components") {
    auto u = parse_url("http://user@Host.Example:8080/a/b?q=1#frag");
    REQUIRE(u.has_value());
    CHECK(u->scheme == "http");
    CHECK(u->userinfo == "user");
    CHECK(u->host == "host.example");
    CHECK(u->port == "8080");
    CHECK(u->path == "/a/b");
    CHECK(u->query == "q=1");
    CHECK(u->has_query);
}

TEST_CASE("parse_url without scheme fails") {
    CHECK_FALSE(parse_url("//host/path").has_value());
    CHECK_FALSE(parse_url("relative/path").has_value());
    CHECK_FALSE(parse_url("").has_value());
}

TEST_CASE("normalize_absolute canonical form") {
    CHECK(normalize_absolute("HTTP://S.EDU:80/x#y")->to_string() == "http://s.edu/x");
    CHECK(normalize_absolute("https://h.org:443/")->to_string() == "https://h.org/");
    CHECK(normalize_absolute("https://h.org:8443/")->to_string() == "https://h.org:8443/");
    CHECK(normalize_absolute("http://h.org")->to_string() == "http://h.org/");
    CHECK(normalize_absolute("http://h.org/a/./b/../c")->to_string() == "http://h.org/a/c");
    CHECK(normalize_absolute("file:///dir/page.html")->to_string() == "file:///dir/page.html");
}

TEST_CASE("normalize_absolute rejects unsupported schemes and hostless http") {
    CHECK_FALSE(normalize_absolute("mailto:a@b").has_value());
    CHECK_FALSE(normalize_absolute("javascript:void(0)").has_value());
    CHECK_FALSE(normalize_absolute("data:text/plain,x").has_value());
    CHECK_FALSE(normalize_absolute("ftp://h/x").has_value());
    CHECK_FALSE(normalize_absolute("http:///no-host").has_value());
}

TEST_CASE("relative resolution with dot segments") {
    CHECK(resolve("http://s.edu/a/b.html", "../c.html") == "http://s.edu/c.html");
    CHECK(resolve("http://s.edu/a/b.html", "./d.html") == "http://s.edu/a/d.html");
    CHECK(resolve("http://s.edu/a/b.html", "e.html") == "http://s.edu/a/e.html");
    CHECK(resolve("http://s.edu/a/b.html", "/f.html") == "http://s.edu/f.html");
    CHECK(resolve("http://s.edu/a/", "sub/g.html") == "http://s.edu/a/sub/g.html");
    // ".." cannot climb above the root
    CHECK(resolve("http://s.edu/a.html", "../../x.html") == "http://s.edu/x.html");
}

TEST_CASE("absolute and scheme-relative refs") {
    CHECK(resolve("http://s.edu/", "http://S.EDU:80/x#y") == "http://s.edu/x");
    CHECK(resolve("http://s.edu/", "https://other.org/p") == "https://other.org/p");
    CHECK(resolve("https://s.edu/a", "//cdn.example/lib.html") == "https://cdn.example/lib.html");
}

TEST_CASE("unsupported ref schemes are unresolvable") {
    CHECK(resolve("http://s.edu/", "mailto:a@b") == "<unresolvable>");
    CHECK(resolve("http://s.edu/", "javascript:void(0)") == "<unresolvable>");
    CHECK(resolve("http://s.edu/", "data:text/plain,x") == "<unresolvable>");
}

TEST_CASE("query and fragment handling") {
    CHECK(resolve("http://s.edu/a.html", "b.html?x=1") == "http://s.edu/b.html?x=1");
    CHECK(resolve("http://s.edu/a.html", "b.html#top") == "http://s.edu/b.html");
    CHECK(resolve("http://s.edu/a.html?x=1", "?y=2") == "http://s.edu/a.html?y=2");
    // empty ref keeps the base, query included
    CHECK(resolve("http://s.edu/a.html?x=1", "") == "http://s.edu/a.html?x=1");
    CHECK(resolve("http://s.edu/a.html?x=1", "#frag") == "http://s.edu/a.html?x=1");
}

TEST_CASE("ref whitespace cleanup") {
    CHECK(resolve("http://s.edu/", "  b.html  ") == "http://s.edu/b.html");
    CHECK(resolve("http://s.edu/", "b\n.ht\tml") == "http://s.edu/b.html");
    CHECK(resolve("http://s.edu/", "my page.html") == "http://s.edu/my%20page.html");
}

TEST_CASE("file URLs resolve within the pseudo-host root") {
    CHECK(resolve("file:///sites/a/index.html", "page.html") == "file:///sites/a/page.html");
    CHECK(resolve("file:///sites/a/index.html", "../b/x.html") == "file:///sites/b/x.html");
}

TEST_CASE("site scope for http hosts") {
    auto seed = normalize_absolute("http://s.edu/dir/index.html");
    REQUIRE(seed.has_value());

    auto exact = SiteScope::for_seed(*seed, false);
    CHECK_FALSE(is_outbound(*seed, exact));
    CHECK_FALSE(is_outbound(*normalize_absolute("http://s.edu/other.html"), exact));
    CHECK_FALSE(is_outbound(*normalize_absolute("https://s.edu/tls.html"), exact));
    CHECK(is_outbound(*normalize_absolute("http://www.s.edu/x"), exact));
    CHECK(is_outbound(*normalize_absolute("http://other.org/"), exact));
    CHECK(is_outbound(*normalize_absolute("http://evil-s.edu/"), exact));

    auto subs = SiteScope::for_seed(*seed, true);
    CHECK_FALSE(is_outbound(*normalize_absolute("http://www.s.edu/x"), subs));
    CHECK_FALSE(is_outbound(*normalize_absolute("http://a.b.s.edu/x"), subs));
    CHECK(is_outbound(*normalize_absolute("http://evil-s.edu/"), subs));
    CHECK(is_outbound(*normalize_absolute("http://other.org/"), subs));
}

TEST_CASE("site scope for file seeds is the seed directory") {
    auto seed = normalize_absolute("file:///sites/site_a/index.html");
    REQUIRE(seed.has_value());
    auto scope = SiteScope::for_seed(*seed, false);
    CHECK(scope.file_dir == "/sites/site_a/");

    CHECK_FALSE(is_outbound(*seed, scope));
    CHECK_FALSE(is_outbound(*normalize_absolute("file:///sites/site_a/sub/p.html"), scope));
    CHECK(is_outbound(*normalize_absolute("file:///sites/site_b/p.html"), scope));
    CHECK(is_outbound(*normalize_absolute("file:///sites/outside.html"), scope));
    CHECK(is_outbound(*normalize_absolute("http://s.edu/"), scope));
}

TEST_CASE("to_string round trip through parse") {
    for (const char* spec : {"http://s.edu/", "https://h.org:8443/a/b?q=1",
                             "file:///x/y.html", "http://u@h.net/p"}) {
        auto u = normalize_absolute(spec);
        REQUIRE(u.has_value());
        auto again = normalize_absolute(u->to_string());
        REQUIRE(again.has_value());
        CHECK(u->to_string() == again->to_string());
    }
}
