#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sitecensus::markup {

enum class SegmentKind { Text, Tag };

/// Element whose raw-text body encloses a Text segment (script/style scoping).
enum class Enclosure { None, Script, Style };

struct Segment {
    SegmentKind kind = SegmentKind::Text;
    std::string content;          // delimiters stripped for Tag segments
    std::size_t byte_offset = 0;  // position of the segment start in the source
    bool unterminated = false;    // Tag segment that ran into EOF before '>'
    Enclosure enclosure = Enclosure::None;  // meaningful for Text segments
};

/// Ordered, lossless partition of a page into text-outside-tags and
/// tag-inside-delimiters segments.
struct SegmentStream {
    std::vector<Segment> segments;
};

struct TagToken {
    std::string name;  // lowercase; names starting '!' or '?' are comments/declarations/PIs
    bool is_closing = false;
    bool is_void_style = false;  // self-closing syntax ("<br/>")
    std::vector<std::pair<std::string, std::string>> attributes;  // lowercase name, raw value

    bool is_element() const {
        return !name.empty() && name.front() != '!' && name.front() != '?';
    }
    /// First-wins lookup by lowercase attribute name; nullptr if absent.
    const std::string* attribute(std::string_view name) const;

    bool operator==(const TagToken&) const = default;
};

/// Partition raw markup into Text and Tag segments. Total over arbitrary
/// bytes; never throws. A "<!--" tag consumes through "-->"; a '<' run that
/// hits EOF becomes a final unterminated Tag segment.
SegmentStream scan(std::string_view html);

/// Inverse of scan: byte-exact reconstruction of the scanned input.
std::string reassemble(const SegmentStream& stream);

/// Parse one Tag segment's content (delimiters already stripped). Total;
/// unparseable trailing junk is dropped.
TagToken parse_tag(std::string_view tag_content);

/// Lowercase extension of the last path component, with query/fragment
/// stripped first. nullopt when there is no dot or the dot starts the
/// component (".htaccess").
std::optional<std::string> extension_of(std::string_view url_or_path);

/// Replace invalid UTF-8 sequences with U+FFFD. Applied to fetched bodies
/// before scanning; scan itself is byte-agnostic.
std::string utf8_sanitize(std::string_view bytes);

}  // namespace sitecensus::markup
