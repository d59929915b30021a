#include "sitecensus/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sitecensus/version.hpp"

namespace sitecensus::report {

namespace {

// Up to six fractional digits, trailing zeros dropped, so 20.0 -> "20".
std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s(buf);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

std::string format_fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s(buf);
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string json_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    return out;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::array<std::uint64_t, 7> category_counts(const census::ElementCensus& c) {
    return {c.image_count,  c.audio_count,         c.video_count,        c.active_content_count,
            c.downloadable_content_count, c.inbound_link_count, c.outbound_link_count};
}

constexpr std::array<const char*, 8> kPalette = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                                 "#59a14f", "#edc948", "#b07aa1", "#9c755f"};

}  // namespace

CategoryShares compute_shares(const census::ElementCensus& census) {
    CategoryShares shares;
    auto counts = category_counts(census);
    for (auto n : counts) shares.denominator += n;
    if (shares.denominator == 0) {
        shares.empty = true;
        return shares;
    }
    for (std::size_t i = 0; i < counts.size(); ++i)
        shares.values[i] = 100.0 * static_cast<double>(counts[i]) /
                           static_cast<double>(shares.denominator);
    return shares;
}

SiteSummary summarize(std::string label, const crawler::SiteCensus& site) {
    SiteSummary s;
    s.label = std::move(label);
    s.seed_url = site.seed_url;
    s.pages_visited = site.pages_visited;
    s.pages_failed = site.pages_failed;
    s.census = site.census;
    s.scorm = site.scorm;
    return s;
}

ComparisonReport build_comparison(const std::vector<SiteSummary>& sites) {
    if (sites.empty()) throw std::invalid_argument("a comparison needs at least one site");
    std::set<std::string> labels;
    ComparisonReport report;
    for (const auto& site : sites) {
        if (!labels.insert(site.label).second)
            throw std::invalid_argument("duplicate site label: " + site.label);
        report.entries.push_back({site, compute_shares(site.census)});
    }
    return report;
}

ChartSpec make_chart_spec(const ComparisonReport& report) {
    ChartSpec spec;
    for (const auto& entry : report.entries)
        spec.series.push_back({entry.site.label, entry.shares.values, entry.shares.empty});
    return spec;
}

std::string render_ascii(const ComparisonReport& report) {
    ChartSpec spec = make_chart_spec(report);
    std::size_t width = 0;
    for (const auto& s : spec.series) width = std::max(width, s.label.size());

    std::string out;
    for (std::size_t cat = 0; cat < kCategories.size(); ++cat) {
        if (cat > 0) out += '\n';
        out += kCategories[cat];
        out += '\n';
        for (const auto& s : spec.series) {
            out += "  ";
            out += s.label;
            out.append(width - s.label.size(), ' ');
            out += " | ";
            if (s.empty) {
                out += "(no countable elements)";
            } else {
                double share = s.values[cat];
                auto bars = static_cast<std::size_t>(std::lround(share / 2.0));
                out.append(bars, '#');
                if (bars > 0) out += ' ';
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.1f", share);
                out += buf;
            }
            out += '\n';
        }
    }
    return out;
}

std::string render_svg(const ComparisonReport& report) {
    ChartSpec spec = make_chart_spec(report);
    if (spec.series.size() > kPalette.size())
        throw std::invalid_argument("svg chart supports at most 8 sites; split the comparison");

    // Fixed geometry: 900x480 canvas, plot area x 60..880, y 50..430.
    constexpr double kLeft = 60, kRight = 880, kTop = 50, kBottom = 430;
    constexpr double kGroupWidth = (kRight - kLeft) / 7.0;
    constexpr double kUnit = (kBottom - kTop) / 100.0;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"480\" "
           "viewBox=\"0 0 900 480\">\n";
    out += "  <rect x=\"0\" y=\"0\" width=\"900\" height=\"480\" fill=\"#ffffff\"/>\n";

    for (int v = 0; v <= 100; v += 10) {
        std::string y = format_fixed2(kBottom - v * kUnit);
        out += "  <line x1=\"60\" y1=\"" + y + "\" x2=\"880\" y2=\"" + y +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out += "  <text x=\"52\" y=\"" + format_fixed2(kBottom - v * kUnit + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
               "fill=\"#555555\">" +
               std::to_string(v) + "</text>\n";
    }

    for (std::size_t cat = 0; cat < kCategories.size(); ++cat) {
        double gx = kLeft + static_cast<double>(cat) * kGroupWidth;
        double inner = gx + 0.1 * kGroupWidth;
        double bar_width = 0.8 * kGroupWidth / static_cast<double>(spec.series.size());
        for (std::size_t s = 0; s < spec.series.size(); ++s) {
            double share = spec.series[s].empty ? 0.0 : spec.series[s].values[cat];
            double height = share * kUnit;
            out += "  <rect x=\"" + format_fixed2(inner + static_cast<double>(s) * bar_width) +
                   "\" y=\"" + format_fixed2(kBottom - height) + "\" width=\"" +
                   format_fixed2(bar_width) + "\" height=\"" + format_fixed2(height) +
                   "\" fill=\"" + kPalette[s] + "\"/>\n";
        }
        out += "  <text x=\"" + format_fixed2(gx + kGroupWidth / 2.0) +
               "\" y=\"450\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"12\" fill=\"#333333\">" +
               kCategories[cat] + "</text>\n";
    }

    out += "  <line x1=\"60\" y1=\"50\" x2=\"60\" y2=\"430\" stroke=\"#333333\" "
           "stroke-width=\"1\"/>\n";
    out += "  <line x1=\"60\" y1=\"430\" x2=\"880\" y2=\"430\" stroke=\"#333333\" "
           "stroke-width=\"1\"/>\n";

    double lx = kLeft;
    for (std::size_t s = 0; s < spec.series.size(); ++s) {
        out += "  <rect x=\"" + format_fixed2(lx) + "\" y=\"14\" width=\"12\" height=\"12\" fill=\"" +
               kPalette[s] + "\"/>\n";
        out += "  <text x=\"" + format_fixed2(lx + 16) +
               "\" y=\"24\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">" +
               xml_escape(spec.series[s].label) + "</text>\n";
        lx += 16 + 7 * static_cast<double>(spec.series[s].label.size()) + 18;
    }

    out += "</svg>\n";
    return out;
}

std::string export_json(const ComparisonReport& report) {
    std::string out;
    out += "{\n";
    out += "  \"tool_version\": \"" + std::string(kToolVersion) + "\",\n";
    out += "  \"generated_for\": [";
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        if (i > 0) out += ", ";
        out += '"' + json_escape(report.entries[i].site.label) + '"';
    }
    out += "],\n";
    out += "  \"sites\": [\n";
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& site = report.entries[i].site;
        const auto& shares = report.entries[i].shares;
        const auto& c = site.census;
        out += "    {\n";
        out += "      \"label\": \"" + json_escape(site.label) + "\",\n";
        out += "      \"seed_url\": \"" + json_escape(site.seed_url) + "\",\n";
        out += "      \"pages_visited\": " + std::to_string(site.pages_visited) + ",\n";
        out += "      \"pages_failed\": " + std::to_string(site.pages_failed) + ",\n";
        out += "      \"census\": {\n";
        out += "        \"word_count\": " + std::to_string(c.word_count) + ",\n";
        out += "        \"image_count\": " + std::to_string(c.image_count) + ",\n";
        out += "        \"audio_count\": " + std::to_string(c.audio_count) + ",\n";
        out += "        \"video_count\": " + std::to_string(c.video_count) + ",\n";
        out += "        \"active_content_count\": " + std::to_string(c.active_content_count) + ",\n";
        out += "        \"downloadable_content_count\": " +
               std::to_string(c.downloadable_content_count) + ",\n";
        out += "        \"script_functions\": " + std::to_string(c.script_functions) + ",\n";
        out += "        \"form_control_count\": " + std::to_string(c.form_control_count) + ",\n";
        out += "        \"inbound_link_count\": " + std::to_string(c.inbound_link_count) + ",\n";
        out += "        \"outbound_link_count\": " + std::to_string(c.outbound_link_count) + ",\n";
        out += "        \"keyword_count\": " + std::to_string(c.keyword_count) + "\n";
        out += "      },\n";
        out += "      \"shares\": {\n";
        for (std::size_t cat = 0; cat < kCategories.size(); ++cat)
            out += "        \"" + std::string(kCategories[cat]) +
                   "\": " + format_number(shares.values[cat]) + ",\n";
        out += "        \"denominator\": " + std::to_string(shares.denominator) + "\n";
        out += "      },\n";
        out += "      \"scorm\": {\n";
        out += "        \"api_names_found\": [";
        std::size_t k = 0;
        for (const auto& name : site.scorm.api_names_found) {
            if (k++ > 0) out += ", ";
            out += '"' + json_escape(name) + '"';
        }
        out += "],\n";
        out += std::string("        \"looks_scorm\": ") +
               (site.scorm.looks_scorm ? "true" : "false") + "\n";
        out += "      }\n";
        out += i + 1 < report.entries.size() ? "    },\n" : "    }\n";
    }
    out += "  ]\n";
    out += "}\n";
    return out;
}

std::string export_csv(const ComparisonReport& report) {
    auto field = [](std::string_view s) {
        if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
        std::string quoted = "\"";
        for (char c : s) {
            if (c == '"') quoted += '"';
            quoted += c;
        }
        quoted += '"';
        return quoted;
    };

    std::string out = "label,category,share,count\n";
    for (const auto& entry : report.entries) {
        auto counts = category_counts(entry.site.census);
        for (std::size_t cat = 0; cat < kCategories.size(); ++cat) {
            out += field(entry.site.label);
            out += ',';
            out += kCategories[cat];
            out += ',';
            out += format_number(entry.shares.values[cat]);
            out += ',';
            out += std::to_string(counts[cat]);
            out += '\n';
        }
    }
    return out;
}

std::vector<SiteSummary> load_report(const std::filesystem::path& path) {
    auto fail = [&path](const std::string& what) -> void {
        throw ReportFormatError(path.string() + ": " + what);
    };

    std::ifstream in(path);
    if (!in) fail("cannot open report file");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        fail(std::string("not valid JSON: ") + e.what());
    }

    if (!doc.is_object() || !doc.contains("tool_version") || !doc["tool_version"].is_string())
        fail("missing tool_version");
    if (!doc.contains("sites") || !doc["sites"].is_array()) fail("missing sites array");

    static constexpr std::array<const char*, 11> kCounterKeys = {
        "word_count",        "image_count",          "audio_count",
        "video_count",       "active_content_count", "downloadable_content_count",
        "script_functions",  "form_control_count",   "inbound_link_count",
        "outbound_link_count", "keyword_count"};

    std::vector<SiteSummary> sites;
    for (const auto& js : doc["sites"]) {
        SiteSummary s;
        if (!js.is_object() || !js.contains("label") || !js["label"].is_string())
            fail("site entry missing label");
        s.label = js["label"].get<std::string>();
        if (!js.contains("seed_url") || !js["seed_url"].is_string())
            fail("site '" + s.label + "' missing seed_url");
        s.seed_url = js["seed_url"].get<std::string>();
        if (!js.contains("pages_visited") || !js["pages_visited"].is_number_unsigned())
            fail("site '" + s.label + "' missing pages_visited");
        s.pages_visited = js["pages_visited"].get<std::uint64_t>();
        if (!js.contains("pages_failed") || !js["pages_failed"].is_number_unsigned())
            fail("site '" + s.label + "' missing pages_failed");
        s.pages_failed = js["pages_failed"].get<std::uint64_t>();

        if (!js.contains("census") || !js["census"].is_object())
            fail("site '" + s.label + "' missing census");
        const auto& jc = js["census"];
        std::array<std::uint64_t, 11> counters{};
        for (std::size_t i = 0; i < kCounterKeys.size(); ++i) {
            if (!jc.contains(kCounterKeys[i]) || !jc[kCounterKeys[i]].is_number_unsigned())
                fail("site '" + s.label + "' census missing counter " + kCounterKeys[i]);
            counters[i] = jc[kCounterKeys[i]].get<std::uint64_t>();
        }
        s.census.word_count = counters[0];
        s.census.image_count = counters[1];
        s.census.audio_count = counters[2];
        s.census.video_count = counters[3];
        s.census.active_content_count = counters[4];
        s.census.downloadable_content_count = counters[5];
        s.census.script_functions = counters[6];
        s.census.form_control_count = counters[7];
        s.census.inbound_link_count = counters[8];
        s.census.outbound_link_count = counters[9];
        s.census.keyword_count = counters[10];
        s.census.pages_counted = s.pages_visited;

        if (!js.contains("shares") || !js["shares"].is_object())
            fail("site '" + s.label + "' missing shares");
        const auto& jsh = js["shares"];
        for (const char* key : kCategories)
            if (!jsh.contains(key) || !jsh[key].is_number())
                fail("site '" + s.label + "' shares missing " + std::string(key));
        if (!jsh.contains("denominator") || !jsh["denominator"].is_number_unsigned())
            fail("site '" + s.label + "' shares missing denominator");

        if (!js.contains("scorm") || !js["scorm"].is_object())
            fail("site '" + s.label + "' missing scorm");
        const auto& jsc = js["scorm"];
        if (!jsc.contains("api_names_found") || !jsc["api_names_found"].is_array())
            fail("site '" + s.label + "' scorm missing api_names_found");
        for (const auto& name : jsc["api_names_found"]) {
            if (!name.is_string()) fail("site '" + s.label + "' has a non-string scorm api name");
            s.scorm.api_names_found.insert(name.get<std::string>());
        }
        if (!jsc.contains("looks_scorm") || !jsc["looks_scorm"].is_boolean())
            fail("site '" + s.label + "' scorm missing looks_scorm");
        s.scorm.looks_scorm = jsc["looks_scorm"].get<bool>();

        sites.push_back(std::move(s));
    }
    return sites;
}

}  // namespace sitecensus::report
