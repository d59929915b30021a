#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "sitecensus/markup.hpp"
#include "sitecensus/url.hpp"

namespace sitecensus::census {

/// One page's (or one site's, once aggregated) element counts.
struct ElementCensus {
    std::uint64_t word_count = 0;
    std::uint64_t image_count = 0;
    std::uint64_t audio_count = 0;
    std::uint64_t video_count = 0;
    std::uint64_t active_content_count = 0;
    std::uint64_t downloadable_content_count = 0;
    std::uint64_t script_functions = 0;
    std::uint64_t form_control_count = 0;
    std::uint64_t inbound_link_count = 0;
    std::uint64_t outbound_link_count = 0;
    std::uint64_t keyword_count = 0;
    std::uint64_t pages_counted = 0;

    ElementCensus& operator+=(const ElementCensus& other);
    friend ElementCensus operator+(ElementCensus a, const ElementCensus& b) { return a += b; }
    bool operator==(const ElementCensus&) const = default;
};

/// Which file extensions map to which media category. Defaults are the
/// classic bmp/jpg/gif, wav/mp3, dat/avi, swf, doc/pdf/ppt lists; overrides
/// must keep the sets pairwise disjoint.
struct ExtensionPolicy {
    std::unordered_set<std::string> image_exts{"bmp", "jpg", "gif"};
    std::unordered_set<std::string> audio_exts{"wav", "mp3"};
    std::unordered_set<std::string> video_exts{"dat", "avi"};
    std::unordered_set<std::string> active_exts{"swf"};
    std::unordered_set<std::string> downloadable_exts{"doc", "pdf", "ppt"};

    /// Throws std::invalid_argument if any two sets overlap or an entry is
    /// empty / not lowercase.
    void validate() const;
};

/// Lowercase 1-3 word terms matched against page text.
class Lexicon {
public:
    Lexicon() = default;

    /// One term per line, '#' comment lines, blanks ignored, lowercased,
    /// duplicates collapsed. Throws std::runtime_error on unreadable files
    /// and entries longer than three words.
    static Lexicon from_file(const std::filesystem::path& path);
    static Lexicon from_terms(const std::vector<std::string>& terms);

    bool contains(std::string_view term) const;
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

private:
    void insert(std::string_view raw_term, std::size_t line_no);
    std::unordered_set<std::string> entries_;
};

struct ScormFindings {
    std::set<std::string> api_names_found;  // sorted for deterministic export
    bool looks_scorm = false;

    void merge(const ScormFindings& other);
    bool operator==(const ScormFindings&) const = default;
};

struct LinkTally {
    std::uint64_t inbound = 0;
    std::uint64_t outbound = 0;
    std::uint64_t skipped = 0;  // fragment-only, mailto:/javascript:, unresolvable
};

enum class LinkKind { Inbound, Outbound, Downloadable, Skipped };

struct LinkRef {
    std::string raw;       // href attribute value as written
    url::Url resolved;     // meaningful unless Skipped for unresolvable refs
    LinkKind kind = LinkKind::Skipped;
};

std::uint64_t count_words(const markup::SegmentStream& stream);
std::uint64_t count_images(const markup::SegmentStream& stream, const ExtensionPolicy& policy);
std::uint64_t count_audio(const markup::SegmentStream& stream, const ExtensionPolicy& policy);
std::uint64_t count_video(const markup::SegmentStream& stream, const ExtensionPolicy& policy);
std::uint64_t count_active(const markup::SegmentStream& stream, const ExtensionPolicy& policy);
std::uint64_t count_downloadables(const markup::SegmentStream& stream, const ExtensionPolicy& policy);
std::uint64_t count_script_functions(const markup::SegmentStream& stream);
std::uint64_t count_form_controls(const markup::SegmentStream& stream);
std::uint64_t count_keywords(const markup::SegmentStream& stream, const Lexicon& lexicon);
ScormFindings detect_scorm_api(const markup::SegmentStream& stream);

/// Every href in document order, resolved against page_url and classified.
/// Downloadable wins over link classification; fragment-only self references
/// and non-fetchable schemes are Skipped.
std::vector<LinkRef> walk_links(const markup::SegmentStream& stream, const url::Url& page_url,
                                const url::SiteScope& scope, const ExtensionPolicy& policy);

LinkTally classify_links(const markup::SegmentStream& stream, const url::Url& page_url,
                         const url::SiteScope& scope, const ExtensionPolicy& policy);

struct PageCensus {
    ElementCensus census;  // pages_counted == 1
    ScormFindings scorm;
    LinkTally links;
};

/// Run every counter over one scanned page.
PageCensus census_stream(const markup::SegmentStream& stream, const url::Url& page_url,
                         const url::SiteScope& scope, const Lexicon& lexicon,
                         const ExtensionPolicy& policy);

}  // namespace sitecensus::census
