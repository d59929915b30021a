#include "sitecensus/url.hpp"

#include <cctype>

namespace sitecensus::url {

namespace {

std::string lowered(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool scheme_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool scheme_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '+' || c == '-' || c == '.';
}

// Length of "scheme:" prefix, 0 when the string has none.
std::size_t scheme_len(std::string_view s) {
    if (s.empty() || !scheme_start(s[0])) return 0;
    std::size_t i = 1;
    while (i < s.size() && scheme_char(s[i])) ++i;
    if (i < s.size() && s[i] == ':') return i + 1;
    return 0;
}

// RFC 3986 5.2.4.
std::string remove_dot_segments(std::string_view path) {
    std::string in(path);
    std::string out;
    while (!in.empty()) {
        if (in.starts_with("../")) {
            in.erase(0, 3);
        } else if (in.starts_with("./")) {
            in.erase(0, 2);
        } else if (in.starts_with("/./")) {
            in.erase(0, 2);  // leaves the leading '/'
        } else if (in == "/.") {
            in = "/";
        } else if (in.starts_with("/../") || in == "/..") {
            in = in == "/.." ? "/" : in.substr(3);
            std::size_t slash = out.rfind('/');
            out.erase(slash == std::string::npos ? 0 : slash);
        } else if (in == "." || in == "..") {
            in.clear();
        } else {
            std::size_t next = in.find('/', in[0] == '/' ? 1 : 0);
            if (next == std::string::npos) {
                out += in;
                in.clear();
            } else {
                out += in.substr(0, next);
                in.erase(0, next);
            }
        }
    }
    return out;
}

void split_authority(std::string_view auth, Url& u) {
    std::size_t at = auth.rfind('@');
    if (at != std::string_view::npos) {
        u.userinfo.assign(auth.substr(0, at));
        auth.remove_prefix(at + 1);
    }
    std::size_t port_colon = std::string_view::npos;
    if (!auth.empty() && auth[0] == '[') {
        std::size_t close = auth.find(']');
        if (close != std::string_view::npos && close + 1 < auth.size() && auth[close + 1] == ':')
            port_colon = close + 1;
    } else {
        port_colon = auth.rfind(':');
    }
    if (port_colon != std::string_view::npos) {
        u.host = lowered(auth.substr(0, port_colon));
        u.port.assign(auth.substr(port_colon + 1));
    } else {
        u.host = lowered(auth);
    }
}

void strip_default_port(Url& u) {
    if ((u.scheme == "http" && u.port == "80") || (u.scheme == "https" && u.port == "443"))
        u.port.clear();
}

bool scheme_supported(const std::string& scheme) {
    return scheme == "http" || scheme == "https" || scheme == "file";
}

// Final canonical form shared by every construction path.
std::optional<Url> finalize(Url u) {
    if (!scheme_supported(u.scheme)) return std::nullopt;
    strip_default_port(u);
    u.path = remove_dot_segments(u.path);
    if ((u.scheme == "http" || u.scheme == "https") && u.path.empty()) u.path = "/";
    if ((u.scheme == "http" || u.scheme == "https") && u.host.empty()) return std::nullopt;
    return u;
}

// Whitespace cleanup applied to raw href values before resolution: tabs and
// newlines vanish anywhere, edges are trimmed, interior spaces get encoded.
std::string preprocess_ref(std::string_view ref) {
    std::string s;
    s.reserve(ref.size());
    for (char c : ref)
        if (c != '\t' && c != '\n' && c != '\r') s += c;
    std::size_t b = s.find_first_not_of(' ');
    std::size_t e = s.find_last_not_of(' ');
    if (b == std::string::npos) return {};
    s = s.substr(b, e - b + 1);
    std::size_t hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    while (!s.empty() && s.back() == ' ') s.pop_back();
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        if (c == ' ')
            out += "%20";
        else
            out += c;
    return out;
}

}  // namespace

std::string Url::to_string() const {
    std::string s = scheme + "://";
    if (!userinfo.empty()) s += userinfo + '@';
    s += host;
    if (!port.empty()) s += ':' + port;
    s += path;
    if (has_query) s += '?' + query;
    return s;
}

std::optional<Url> parse_url(std::string_view spec) {
    std::size_t sl = scheme_len(spec);
    if (sl == 0) return std::nullopt;
    Url u;
    u.scheme = lowered(spec.substr(0, sl - 1));
    std::string_view rest = spec.substr(sl);

    std::string_view after_auth = rest;
    if (rest.starts_with("//")) {
        rest.remove_prefix(2);
        std::size_t end = rest.find_first_of("/?#");
        split_authority(rest.substr(0, end), u);
        after_auth = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
    }

    std::size_t q = after_auth.find('?');
    std::size_t h = after_auth.find('#');
    std::size_t path_end = std::min(q, h);
    u.path.assign(after_auth.substr(0, path_end));
    if (q != std::string_view::npos && q < h) {
        u.has_query = true;
        u.query.assign(after_auth.substr(q + 1, (h == std::string_view::npos ? after_auth.size() : h) - q - 1));
    }
    return u;
}

std::optional<Url> normalize_url(const Url& base, std::string_view raw_ref) {
    std::string ref = preprocess_ref(raw_ref);
    if (ref.empty()) return finalize(base);

    if (scheme_len(ref) != 0) {
        auto abs = parse_url(ref);
        if (!abs) return std::nullopt;
        return finalize(*abs);
    }

    Url out;
    out.scheme = base.scheme;
    std::string_view r = ref;
    bool own_authority = r.starts_with("//");

    if (own_authority) {
        r.remove_prefix(2);
        std::size_t end = r.find_first_of("/?");
        split_authority(r.substr(0, end), out);
        r = end == std::string_view::npos ? std::string_view{} : r.substr(end);
    } else {
        out.userinfo = base.userinfo;
        out.host = base.host;
        out.port = base.port;
    }

    std::size_t q = r.find('?');
    std::string_view ref_path = r.substr(0, q);
    bool ref_has_query = q != std::string_view::npos;
    if (ref_has_query) {
        out.has_query = true;
        out.query.assign(r.substr(q + 1));
    }

    if (own_authority || (!ref_path.empty() && ref_path[0] == '/')) {
        out.path.assign(ref_path);
    } else if (ref_path.empty()) {
        out.path = base.path;
        if (!ref_has_query) {
            out.query = base.query;
            out.has_query = base.has_query;
        }
    } else {
        std::size_t slash = base.path.rfind('/');
        std::string merged = slash == std::string::npos
                                 ? (base.host.empty() ? std::string{} : std::string{"/"})
                                 : base.path.substr(0, slash + 1);
        merged += ref_path;
        out.path = std::move(merged);
    }
    return finalize(std::move(out));
}

std::optional<Url> normalize_absolute(std::string_view spec) {
    std::string cleaned = preprocess_ref(spec);
    auto parsed = parse_url(cleaned);
    if (!parsed) return std::nullopt;
    return finalize(*parsed);
}

SiteScope SiteScope::for_seed(const Url& seed, bool include_subdomains) {
    SiteScope scope;
    scope.include_subdomains = include_subdomains;
    scope.host = seed.host;
    if (seed.scheme == "file") {
        std::size_t slash = seed.path.rfind('/');
        scope.file_dir = slash == std::string::npos ? "/" : seed.path.substr(0, slash + 1);
    }
    return scope;
}

bool is_outbound(const Url& u, const SiteScope& scope) {
    if (!scope.file_dir.empty()) {
        if (u.scheme != "file") return true;
        return !u.path.starts_with(scope.file_dir);
    }
    if (u.scheme == "file") return true;
    if (u.host == scope.host) return false;
    if (scope.include_subdomains && u.host.size() > scope.host.size() &&
        u.host.ends_with(scope.host) && u.host[u.host.size() - scope.host.size() - 1] == '.')
        return false;
    return true;
}

}  // namespace sitecensus::url
