#include "sitecensus/census.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sitecensus::census {

namespace {

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char to_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool keyword_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-';
}

// Tokens of one text segment; tokens never span segment boundaries.
void append_tokens(std::string_view text, std::vector<std::string>& out) {
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_ws(text[i])) ++i;
        if (i >= text.size()) break;
        std::size_t start = i;
        while (i < text.size() && !is_ws(text[i])) ++i;
        out.emplace_back(text.substr(start, i - start));
    }
}

// Learner-facing text only: script and style bodies are excluded.
std::vector<std::string> page_tokens(const markup::SegmentStream& stream) {
    std::vector<std::string> tokens;
    for (const auto& seg : stream.segments) {
        if (seg.kind != markup::SegmentKind::Text) continue;
        if (seg.enclosure != markup::Enclosure::None) continue;
        append_tokens(seg.content, tokens);
    }
    return tokens;
}

std::string keyword_form(std::string_view token) {
    std::size_t b = 0;
    std::size_t e = token.size();
    while (b < e && !keyword_char(token[b])) ++b;
    while (e > b && !keyword_char(token[e - 1])) --e;
    std::string out;
    out.reserve(e - b);
    for (std::size_t i = b; i < e; ++i) out.push_back(to_lower(token[i]));
    return out;
}

// Count tags whose given attribute has an extension from `exts`. Matching is
// tag-name-agnostic; comments and declarations never qualify.
std::uint64_t count_attr_extension(const markup::SegmentStream& stream, std::string_view attr,
                                   const std::unordered_set<std::string>& exts) {
    std::uint64_t count = 0;
    for (const auto& seg : stream.segments) {
        if (seg.kind != markup::SegmentKind::Tag) continue;
        markup::TagToken tag = markup::parse_tag(seg.content);
        if (!tag.is_element()) continue;
        const std::string* value = tag.attribute(attr);
        if (!value) continue;
        auto ext = markup::extension_of(*value);
        if (ext && exts.contains(*ext)) ++count;
    }
    return count;
}

std::uint64_t count_opening_tags(const markup::SegmentStream& stream,
                                 std::initializer_list<std::string_view> names) {
    std::uint64_t count = 0;
    for (const auto& seg : stream.segments) {
        if (seg.kind != markup::SegmentKind::Tag) continue;
        markup::TagToken tag = markup::parse_tag(seg.content);
        if (!tag.is_element() || tag.is_closing) continue;
        for (std::string_view name : names) {
            if (tag.name == name) {
                ++count;
                break;
            }
        }
    }
    return count;
}

bool identifier_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

constexpr std::array<std::string_view, 11> kScormApiNames = {
    "LMSInitialize", "LMSFinish",   "LMSCommit",  "LMSGetValue",
    "LMSSetValue",   "LMSGetLastError", "Initialize", "Terminate",
    "Commit",        "GetValue",    "SetValue",
};

bool families_present(const std::set<std::string>& names) {
    bool init = names.contains("LMSInitialize") || names.contains("Initialize");
    bool term = names.contains("LMSFinish") || names.contains("Terminate");
    return init && term;
}

// Raw href cleanup mirrored from URL resolution; detects refs that can only
// point at the page itself.
bool fragment_only(std::string_view href) {
    std::string s;
    for (char c : href)
        if (c != '\t' && c != '\n' && c != '\r' && c != ' ') s += c;
    return s.empty() || s.front() == '#';
}

void check_ext_set(const std::unordered_set<std::string>& exts, std::string_view label) {
    for (const auto& e : exts) {
        if (e.empty()) throw std::invalid_argument(std::string(label) + ": empty extension");
        for (char c : e) {
            bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
            if (!ok)
                throw std::invalid_argument(std::string(label) + ": extension '" + e +
                                            "' must be lowercase alphanumeric");
        }
    }
}

}  // namespace

ElementCensus& ElementCensus::operator+=(const ElementCensus& other) {
    word_count += other.word_count;
    image_count += other.image_count;
    audio_count += other.audio_count;
    video_count += other.video_count;
    active_content_count += other.active_content_count;
    downloadable_content_count += other.downloadable_content_count;
    script_functions += other.script_functions;
    form_control_count += other.form_control_count;
    inbound_link_count += other.inbound_link_count;
    outbound_link_count += other.outbound_link_count;
    keyword_count += other.keyword_count;
    pages_counted += other.pages_counted;
    return *this;
}

void ExtensionPolicy::validate() const {
    const std::array<std::pair<std::string_view, const std::unordered_set<std::string>*>, 5> sets = {{
        {"image", &image_exts},
        {"audio", &audio_exts},
        {"video", &video_exts},
        {"active", &active_exts},
        {"downloadable", &downloadable_exts},
    }};
    for (const auto& [label, exts] : sets) check_ext_set(*exts, label);
    for (std::size_t a = 0; a < sets.size(); ++a) {
        for (std::size_t b = a + 1; b < sets.size(); ++b) {
            for (const auto& e : *sets[a].second) {
                if (sets[b].second->contains(e))
                    throw std::invalid_argument("extension '" + e + "' appears in both " +
                                                std::string(sets[a].first) + " and " +
                                                std::string(sets[b].first));
            }
        }
    }
}

Lexicon Lexicon::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read lexicon file: " + path.string());
    Lexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        lex.insert(line, line_no);
    }
    return lex;
}

Lexicon Lexicon::from_terms(const std::vector<std::string>& terms) {
    Lexicon lex;
    for (const auto& t : terms) lex.insert(t, 0);
    return lex;
}

void Lexicon::insert(std::string_view raw_term, std::size_t line_no) {
    // Normalize to lowercase, single-space separated.
    std::string term;
    std::size_t words = 0;
    std::size_t i = 0;
    while (i < raw_term.size()) {
        while (i < raw_term.size() && is_ws(raw_term[i])) ++i;
        if (i >= raw_term.size()) break;
        if (!term.empty()) term += ' ';
        ++words;
        while (i < raw_term.size() && !is_ws(raw_term[i])) term += to_lower(raw_term[i++]);
    }
    if (term.empty()) return;
    if (words > 3) {
        std::ostringstream msg;
        msg << "lexicon entry ";
        if (line_no > 0) msg << "(line " << line_no << ") ";
        msg << "has " << words << " words, limit is 3: " << term;
        throw std::runtime_error(msg.str());
    }
    entries_.insert(std::move(term));
}

bool Lexicon::contains(std::string_view term) const {
    return entries_.contains(std::string(term));
}

void ScormFindings::merge(const ScormFindings& other) {
    api_names_found.insert(other.api_names_found.begin(), other.api_names_found.end());
    looks_scorm = families_present(api_names_found);
}

std::uint64_t count_words(const markup::SegmentStream& stream) {
    std::uint64_t count = 0;
    for (const auto& seg : stream.segments) {
        if (seg.kind != markup::SegmentKind::Text) continue;
        if (seg.enclosure != markup::Enclosure::None) continue;
        std::size_t i = 0;
        while (i < seg.content.size()) {
            while (i < seg.content.size() && is_ws(seg.content[i])) ++i;
            if (i >= seg.content.size()) break;
            ++count;
            while (i < seg.content.size() && !is_ws(seg.content[i])) ++i;
        }
    }
    return count;
}

std::uint64_t count_images(const markup::SegmentStream& stream, const ExtensionPolicy& policy) {
    return count_attr_extension(stream, "src", policy.image_exts);
}

std::uint64_t count_audio(const markup::SegmentStream& stream, const ExtensionPolicy& policy) {
    return count_attr_extension(stream, "src", policy.audio_exts);
}

std::uint64_t count_video(const markup::SegmentStream& stream, const ExtensionPolicy& policy) {
    return count_attr_extension(stream, "src", policy.video_exts);
}

std::uint64_t count_active(const markup::SegmentStream& stream, const ExtensionPolicy& policy) {
    return count_opening_tags(stream, {"applet"}) +
           count_attr_extension(stream, "src", policy.active_exts);
}

std::uint64_t count_downloadables(const markup::SegmentStream& stream,
                                  const ExtensionPolicy& policy) {
    return count_attr_extension(stream, "href", policy.downloadable_exts);
}

std::uint64_t count_script_functions(const markup::SegmentStream& stream) {
    // One automaton over all script text in document order, depth floored at
    // zero; each return to zero closes one top-level group.
    std::uint64_t count = 0;
    std::uint64_t depth = 0;
    for (const auto& seg : stream.segments) {
        if (seg.kind != markup::SegmentKind::Text) continue;
        if (seg.enclosure != markup::Enclosure::Script) continue;
        for (char c : seg.content) {
            if (c == '{') {
                ++depth;
            } else if (c == '}' && depth > 0) {
                if (--depth == 0) ++count;
            }
        }
    }
    return count;
}

std::uint64_t count_form_controls(const markup::SegmentStream& stream) {
    return count_opening_tags(stream, {"input", "textarea", "select", "button"});
}

std::uint64_t count_keywords(const markup::SegmentStream& stream, const Lexicon& lexicon) {
    if (lexicon.empty()) return 0;
    std::vector<std::string> tokens = page_tokens(stream);
    for (auto& t : tokens) t = keyword_form(t);

    std::uint64_t count = 0;
    std::size_t i = 0;
    while (i < tokens.size()) {
        bool matched = false;
        for (std::size_t len = 3; len >= 1; --len) {
            if (i + len > tokens.size()) continue;
            std::string phrase = tokens[i];
            for (std::size_t k = 1; k < len; ++k) {
                phrase += ' ';
                phrase += tokens[i + k];
            }
            if (lexicon.contains(phrase)) {
                ++count;
                i += len;
                matched = true;
                break;
            }
        }
        if (!matched) ++i;
    }
    return count;
}

ScormFindings detect_scorm_api(const markup::SegmentStream& stream) {
    ScormFindings findings;
    for (const auto& seg : stream.segments) {
        if (seg.kind != markup::SegmentKind::Text) continue;
        if (seg.enclosure != markup::Enclosure::Script) continue;
        const std::string& text = seg.content;
        for (std::string_view name : kScormApiNames) {
            std::size_t pos = 0;
            while ((pos = text.find(name, pos)) != std::string::npos) {
                bool left_ok = pos == 0 || !identifier_char(text[pos - 1]);
                std::size_t end = pos + name.size();
                bool right_ok = end >= text.size() || !identifier_char(text[end]);
                if (left_ok && right_ok) {
                    findings.api_names_found.emplace(name);
                    break;
                }
                ++pos;
            }
        }
    }
    findings.looks_scorm = families_present(findings.api_names_found);
    return findings;
}

std::vector<LinkRef> walk_links(const markup::SegmentStream& stream, const url::Url& page_url,
                                const url::SiteScope& scope, const ExtensionPolicy& policy) {
    std::vector<LinkRef> links;
    for (const auto& seg : stream.segments) {
        if (seg.kind != markup::SegmentKind::Tag) continue;
        markup::TagToken tag = markup::parse_tag(seg.content);
        if (!tag.is_element()) continue;
        const std::string* href = tag.attribute("href");
        if (!href) continue;

        LinkRef ref;
        ref.raw = *href;

        // The downloadable test uses the raw value, exactly as
        // count_downloadables does, so a downloadable is never also a link.
        auto raw_ext = markup::extension_of(*href);
        if (raw_ext && policy.downloadable_exts.contains(*raw_ext)) {
            if (auto resolved = url::normalize_url(page_url, *href)) ref.resolved = *resolved;
            ref.kind = LinkKind::Downloadable;
            links.push_back(std::move(ref));
            continue;
        }

        if (fragment_only(*href)) {
            ref.kind = LinkKind::Skipped;
            links.push_back(std::move(ref));
            continue;
        }

        auto resolved = url::normalize_url(page_url, *href);
        if (!resolved) {
            ref.kind = LinkKind::Skipped;
        } else {
            ref.resolved = *resolved;
            ref.kind = url::is_outbound(*resolved, scope) ? LinkKind::Outbound : LinkKind::Inbound;
        }
        links.push_back(std::move(ref));
    }
    return links;
}

LinkTally classify_links(const markup::SegmentStream& stream, const url::Url& page_url,
                         const url::SiteScope& scope, const ExtensionPolicy& policy) {
    LinkTally tally;
    for (const auto& link : walk_links(stream, page_url, scope, policy)) {
        switch (link.kind) {
            case LinkKind::Inbound: ++tally.inbound; break;
            case LinkKind::Outbound: ++tally.outbound; break;
            case LinkKind::Skipped: ++tally.skipped; break;
            case LinkKind::Downloadable: break;
        }
    }
    return tally;
}

PageCensus census_stream(const markup::SegmentStream& stream, const url::Url& page_url,
                         const url::SiteScope& scope, const Lexicon& lexicon,
                         const ExtensionPolicy& policy) {
    PageCensus page;
    page.census.word_count = count_words(stream);
    page.census.image_count = count_images(stream, policy);
    page.census.audio_count = count_audio(stream, policy);
    page.census.video_count = count_video(stream, policy);
    page.census.active_content_count = count_active(stream, policy);
    page.census.downloadable_content_count = count_downloadables(stream, policy);
    page.census.script_functions = count_script_functions(stream);
    page.census.form_control_count = count_form_controls(stream);
    page.census.keyword_count = count_keywords(stream, lexicon);
    page.scorm = detect_scorm_api(stream);
    page.links = classify_links(stream, page_url, scope, policy);
    page.census.inbound_link_count = page.links.inbound;
    page.census.outbound_link_count = page.links.outbound;
    page.census.pages_counted = 1;
    return page;
}

}  // namespace sitecensus::census
