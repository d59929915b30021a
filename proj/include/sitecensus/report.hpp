#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "sitecensus/census.hpp"
#include "sitecensus/crawler.hpp"

namespace sitecensus::report {

/// Chart category order is fixed everywhere: charts, JSON, CSV.
inline constexpr std::array<const char*, 7> kCategories = {
    "images", "audio", "video", "active", "downloadable", "inbound_links", "outbound_links"};

/// Percentage of total countable element usage per category.
struct CategoryShares {
    std::array<double, 7> values{};  // kCategories order
    std::uint64_t denominator = 0;
    bool empty = false;  // denominator == 0

    double images() const { return values[0]; }
    double audio() const { return values[1]; }
    double video() const { return values[2]; }
    double active() const { return values[3]; }
    double downloadable() const { return values[4]; }
    double inbound_links() const { return values[5]; }
    double outbound_links() const { return values[6]; }
};

CategoryShares compute_shares(const census::ElementCensus& census);

/// What one crawled site contributes to a comparison.
struct SiteSummary {
    std::string label;
    std::string seed_url;
    std::uint64_t pages_visited = 0;
    std::uint64_t pages_failed = 0;
    census::ElementCensus census;
    census::ScormFindings scorm;
};

SiteSummary summarize(std::string label, const crawler::SiteCensus& site);

struct ReportEntry {
    SiteSummary site;
    CategoryShares shares;
};

struct ComparisonReport {
    std::vector<ReportEntry> entries;  // CLI argument order
};

/// Throws std::invalid_argument on an empty list or duplicate labels.
ComparisonReport build_comparison(const std::vector<SiteSummary>& sites);

/// Renderable grouped-bar description shared by both chart backends.
struct ChartSpec {
    struct Series {
        std::string label;
        std::array<double, 7> values{};  // percent, kCategories order
        bool empty = false;
    };
    std::vector<Series> series;
};

ChartSpec make_chart_spec(const ComparisonReport& report);

/// Grouped horizontal text bars; 50 '#' characters = 100%. Byte-deterministic.
std::string render_ascii(const ComparisonReport& report);

/// Grouped vertical bars on a fixed 900x480 canvas, 0-100 axis, gridlines
/// every 10, legend from an 8-color palette. Byte-deterministic; throws
/// std::invalid_argument beyond 8 series.
std::string render_svg(const ComparisonReport& report);

/// Fixed key order, numbers with at most six fractional digits and no
/// locale formatting. Byte-deterministic.
std::string export_json(const ComparisonReport& report);

/// Header plus one row per (site, category) with share and raw count.
std::string export_csv(const ComparisonReport& report);

class ReportFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Read the sites back out of an export_json file. Throws ReportFormatError
/// naming the file on schema mismatches.
std::vector<SiteSummary> load_report(const std::filesystem::path& path);

}  // namespace sitecensus::report
