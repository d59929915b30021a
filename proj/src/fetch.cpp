#include "sitecensus/fetch.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

#include "sitecensus/markup.hpp"

#ifdef SITECENSUS_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

namespace sitecensus::fetch {

namespace {

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string percent_decode(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            int hi = hex_digit(s[i + 1]);
            int lo = hex_digit(s[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>(hi * 16 + lo));
                i += 2;
                continue;
            }
        }
        out.push_back(s[i]);
    }
    return out;
}

std::optional<std::string> mime_for(const std::filesystem::path& p) {
    auto ext = markup::extension_of(p.string());
    if (!ext) return std::nullopt;
    if (*ext == "html" || *ext == "htm") return "text/html";
    if (*ext == "css") return "text/css";
    if (*ext == "js") return "text/javascript";
    if (*ext == "txt") return "text/plain";
    if (*ext == "xml") return "application/xml";
    if (*ext == "json") return "application/json";
    if (*ext == "pdf") return "application/pdf";
    if (*ext == "doc") return "application/msword";
    if (*ext == "ppt") return "application/vnd.ms-powerpoint";
    if (*ext == "zip") return "application/zip";
    if (*ext == "jpg" || *ext == "jpeg") return "image/jpeg";
    if (*ext == "gif") return "image/gif";
    if (*ext == "png") return "image/png";
    if (*ext == "bmp") return "image/bmp";
    if (*ext == "mp3") return "audio/mpeg";
    if (*ext == "wav") return "audio/wav";
    if (*ext == "avi") return "video/x-msvideo";
    if (*ext == "swf") return "application/x-shockwave-flash";
    return std::nullopt;
}

class HttpFetcher : public Fetcher {
public:
    HttpFetcher(int timeout_ms, std::string user_agent)
        : timeout_ms_(timeout_ms), user_agent_(std::move(user_agent)) {}

    RawResponse get(const url::Url& u) override {
        RawResponse resp;
#ifndef SITECENSUS_HAVE_OPENSSL
        if (u.scheme == "https") {
            resp.error = "https support not compiled in";
            return resp;
        }
#endif
        std::string origin = u.scheme + "://" + u.host;
        if (!u.port.empty()) origin += ':' + u.port;
        httplib::Client client(origin);
        client.set_follow_location(false);
        client.set_connection_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
        client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
        client.set_write_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);

        std::string target = u.path.empty() ? "/" : u.path;
        if (u.has_query) target += '?' + u.query;
        httplib::Headers headers{{"User-Agent", user_agent_}, {"Accept", "*/*"}};
        auto res = client.Get(target, headers);
        if (!res) {
            resp.error = httplib::to_string(res.error());
            return resp;
        }
        resp.transport_ok = true;
        resp.status = res->status;
        resp.body = res->body;
        if (res->has_header("Content-Type")) resp.content_type = res->get_header_value("Content-Type");
        if (res->has_header("Location")) resp.location = res->get_header_value("Location");
        return resp;
    }

private:
    int timeout_ms_;
    std::string user_agent_;
};

}  // namespace

FileFetcher::FileFetcher(std::filesystem::path root)
    : root_(std::filesystem::absolute(std::move(root)).lexically_normal()) {}

RawResponse FileFetcher::get(const url::Url& u) {
    RawResponse resp;
    if (u.scheme != "file") {
        resp.error = "file backend cannot fetch " + u.scheme + " URLs";
        return resp;
    }
    resp.transport_ok = true;

    std::string decoded = percent_decode(u.path);
    if (decoded.empty() || decoded.front() != '/') {
        resp.status = 400;
        return resp;
    }

    std::filesystem::path target = (root_ / decoded.substr(1)).lexically_normal();
    const std::string root_str = root_.string();
    const std::string target_str = target.string();
    bool inside = target_str == root_str ||
                  (target_str.size() > root_str.size() &&
                   target_str.compare(0, root_str.size(), root_str) == 0 &&
                   (root_str.back() == '/' || target_str[root_str.size()] == '/'));
    if (!inside) {
        resp.status = 403;  // refuses escapes from the fixture root
        return resp;
    }

    std::error_code ec;
    if (std::filesystem::is_directory(target, ec)) target /= "index.html";

    std::ifstream file(target, std::ios::binary);
    if (!file) {
        resp.status = 404;
        return resp;
    }
    std::ostringstream buf;
    buf << file.rdbuf();
    resp.status = 200;
    resp.body = buf.str();
    resp.content_type = mime_for(target);
    return resp;
}

std::unique_ptr<Fetcher> make_http_fetcher(int timeout_ms, std::string user_agent) {
    return std::make_unique<HttpFetcher>(timeout_ms, std::move(user_agent));
}

void PolitenessGate::acquire(const std::string& host, std::chrono::milliseconds delay) {
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto now = std::chrono::steady_clock::now();
        auto& next = next_slot_[host];
        slot = next > now ? next : now;
        next = slot + delay;  // reserve before sleeping so other hosts stay unblocked
    }
    std::this_thread::sleep_until(slot);
}

PageSource fetch_page(const url::Url& target, const url::SiteScope& scope, Fetcher& fetcher,
                      PolitenessGate* gate, std::chrono::milliseconds delay, int depth,
                      int max_redirects) {
    PageSource page;
    page.requested_url = target.to_string();
    page.depth = depth;

    url::Url current = target;
    for (int hop = 0;; ++hop) {
        if (gate && current.scheme != "file" && delay.count() > 0) gate->acquire(current.host, delay);
        RawResponse r = fetcher.get(current);
        page.final_url = current;
        page.status = r.status;
        if (!r.transport_ok) {
            page.error = r.error.empty() ? "transport failure" : r.error;
            return page;
        }
        if (r.status >= 300 && r.status < 400 && r.location) {
            if (hop >= max_redirects) {
                page.error = "too many redirects";
                return page;
            }
            auto next = url::normalize_url(current, *r.location);
            if (!next) {
                page.error = "unresolvable redirect location: " + *r.location;
                return page;
            }
            if (url::is_outbound(*next, scope)) {
                page.error = "redirect left the site: " + next->to_string();
                return page;
            }
            current = *next;
            continue;
        }
        page.content_type = r.content_type;
        if (r.status >= 200 && r.status < 300) {
            page.ok = true;
            page.body = r.body;
        } else {
            page.error = "http status " + std::to_string(r.status);
        }
        return page;
    }
}

bool looks_html(const PageSource& page) {
    if (page.content_type) {
        std::string ct = *page.content_type;
        for (char& c : ct) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return ct.find("html") != std::string::npos;
    }
    auto ext = markup::extension_of(page.final_url.path);
    return !ext || *ext == "htm" || *ext == "html";
}

}  // namespace sitecensus::fetch
