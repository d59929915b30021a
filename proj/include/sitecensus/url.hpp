#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace sitecensus::url {

/// Parsed absolute URL. Only http, https and file are ever produced by
/// normalize_url; everything else is unresolvable by policy.
struct Url {
    std::string scheme;    // lowercase
    std::string userinfo;  // kept verbatim, excluded from host comparisons
    std::string host;      // lowercase
    std::string port;      // empty once default ports are stripped
    std::string path;      // dot segments collapsed; "/" for empty http(s) paths
    std::string query;     // without '?'
    bool has_query = false;

    std::string to_string() const;
    bool operator==(const Url&) const = default;
};

/// Parse an absolute URL string. No scheme policy applied here.
std::optional<Url> parse_url(std::string_view spec);

/// Resolve `ref` against `base` per generic URI resolution, then normalize:
/// lowercase scheme/host, strip fragment, drop default ports, collapse dot
/// segments, keep the query. nullopt for unsupported schemes (mailto,
/// javascript, data, ...) and syntactically invalid references.
std::optional<Url> normalize_url(const Url& base, std::string_view ref);

/// Parse + self-normalize an absolute URL (used for seeds).
std::optional<Url> normalize_absolute(std::string_view spec);

/// What counts as "the site" for inbound/outbound classification.
struct SiteScope {
    std::string host;           // empty for file seeds
    std::string file_dir;       // seed directory, file scheme only ("/site_a/")
    bool include_subdomains = false;

    static SiteScope for_seed(const Url& seed, bool include_subdomains);
};

bool is_outbound(const Url& url, const SiteScope& scope);

}  // namespace sitecensus::url
