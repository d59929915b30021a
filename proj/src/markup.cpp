#include "sitecensus/markup.hpp"

#include <cctype>

namespace sitecensus::markup {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char to_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string lowered(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(to_lower(c));
    return out;
}

// Enclosure bookkeeping: an opening <script>/<style> opens raw-text scope,
// only the matching close ends it.
Enclosure next_enclosure(Enclosure current, const TagToken& tag) {
    if (!tag.is_element()) return current;
    if (tag.name == "script" || tag.name == "style") {
        Enclosure which = tag.name == "script" ? Enclosure::Script : Enclosure::Style;
        if (tag.is_closing) {
            if (current == which) return Enclosure::None;
        } else if (!tag.is_void_style) {
            return which;
        }
    }
    return current;
}

}  // namespace

const std::string* TagToken::attribute(std::string_view name) const {
    for (const auto& [key, value] : attributes) {
        if (key == name) return &value;
    }
    return nullptr;
}

SegmentStream scan(std::string_view html) {
    SegmentStream stream;
    Enclosure enclosure = Enclosure::None;
    std::size_t i = 0;
    const std::size_t n = html.size();

    while (i < n) {
        if (html[i] != '<') {
            std::size_t start = i;
            while (i < n && html[i] != '<') ++i;
            Segment seg;
            seg.kind = SegmentKind::Text;
            seg.content.assign(html.substr(start, i - start));
            seg.byte_offset = start;
            seg.enclosure = enclosure;
            stream.segments.push_back(std::move(seg));
            continue;
        }

        std::size_t start = i;  // at '<'
        std::size_t close;
        if (html.substr(i + 1).starts_with("!--")) {
            // Comment bodies may contain '<' and '>'; consume through "-->".
            // The search starts inside the opener so "<!-->" still closes.
            std::size_t from = i + 2;
            std::size_t end = html.find("-->", from);
            close = end == std::string_view::npos ? std::string_view::npos : end + 2;
        } else {
            close = html.find('>', i + 1);
        }

        Segment seg;
        seg.kind = SegmentKind::Tag;
        seg.byte_offset = start;
        if (close == std::string_view::npos) {
            seg.content.assign(html.substr(start + 1));
            seg.unterminated = true;
            i = n;
        } else {
            seg.content.assign(html.substr(start + 1, close - start - 1));
            i = close + 1;
        }
        enclosure = next_enclosure(enclosure, parse_tag(seg.content));
        stream.segments.push_back(std::move(seg));
    }
    return stream;
}

std::string reassemble(const SegmentStream& stream) {
    std::string out;
    for (const auto& seg : stream.segments) {
        if (seg.kind == SegmentKind::Text) {
            out += seg.content;
        } else {
            out += '<';
            out += seg.content;
            if (!seg.unterminated) out += '>';
        }
    }
    return out;
}

TagToken parse_tag(std::string_view content) {
    TagToken tok;

    // Comments, doctypes, processing instructions: reserved non-element name.
    if (!content.empty() && (content.front() == '!' || content.front() == '?')) {
        if (content.starts_with("!--")) {
            tok.name = "!--";
        } else {
            std::size_t end = 0;
            while (end < content.size() && !is_space(content[end])) ++end;
            tok.name = lowered(content.substr(0, end));
        }
        return tok;
    }

    std::size_t i = 0;
    const std::size_t n = content.size();
    while (i < n && is_space(content[i])) ++i;

    if (i < n && content[i] == '/') {
        tok.is_closing = true;
        ++i;
    }

    std::size_t name_start = i;
    while (i < n && !is_space(content[i]) && content[i] != '/') ++i;
    tok.name = lowered(content.substr(name_start, i - name_start));

    // A trailing '/' here is always self-closing syntax: a '/' that ends an
    // unquoted attribute value is consumed into the value below and never
    // reaches this loop.
    while (i < n) {
        while (i < n && (is_space(content[i]) || content[i] == '/')) {
            if (content[i] == '/' && i + 1 == n) tok.is_void_style = true;
            ++i;
        }
        if (i >= n) break;

        std::size_t key_start = i;
        while (i < n && !is_space(content[i]) && content[i] != '=' && content[i] != '/') ++i;
        std::string key = lowered(content.substr(key_start, i - key_start));
        std::string value;

        std::size_t j = i;
        while (j < n && is_space(content[j])) ++j;
        if (j < n && content[j] == '=') {
            ++j;
            while (j < n && is_space(content[j])) ++j;
            if (j < n && (content[j] == '"' || content[j] == '\'')) {
                char quote = content[j++];
                std::size_t value_start = j;
                while (j < n && content[j] != quote) ++j;
                value.assign(content.substr(value_start, j - value_start));
                if (j < n) ++j;  // closing quote
            } else {
                std::size_t value_start = j;
                while (j < n && !is_space(content[j])) ++j;
                value.assign(content.substr(value_start, j - value_start));
            }
            i = j;
        }

        if (!key.empty() && tok.attribute(key) == nullptr) {
            tok.attributes.emplace_back(std::move(key), std::move(value));
        }
    }
    return tok;
}

std::optional<std::string> extension_of(std::string_view url_or_path) {
    std::size_t cut = url_or_path.find_first_of("?#");
    std::string_view path = url_or_path.substr(0, cut);

    std::size_t slash = path.find_last_of('/');
    std::string_view component = slash == std::string_view::npos ? path : path.substr(slash + 1);

    std::size_t dot = component.find_last_of('.');
    if (dot == std::string_view::npos || dot == 0) return std::nullopt;
    return lowered(component.substr(dot + 1));
}

std::string utf8_sanitize(std::string_view bytes) {
    static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";  // U+FFFD
    std::string out;
    out.reserve(bytes.size());

    std::size_t i = 0;
    const std::size_t n = bytes.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(bytes[i]);
        std::size_t len;
        unsigned cp_min;
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp_min = 0x80;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp_min = 0x800;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp_min = 0x10000;
        } else {
            out += kReplacement;
            ++i;
            continue;
        }

        if (i + len > n) {
            out += kReplacement;
            ++i;
            continue;
        }
        unsigned cp = c & (0x7F >> len);
        bool valid = true;
        for (std::size_t k = 1; k < len; ++k) {
            unsigned char cc = static_cast<unsigned char>(bytes[i + k]);
            if ((cc & 0xC0) != 0x80) {
                valid = false;
                break;
            }
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (valid && (cp < cp_min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) {
            valid = false;  // overlong, out of range, or a surrogate
        }
        if (valid) {
            out.append(bytes.substr(i, len));
            i += len;
        } else {
            out += kReplacement;
            ++i;
        }
    }
    return out;
}

}  // namespace sitecensus::markup
