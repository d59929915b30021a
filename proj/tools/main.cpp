#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "sitecensus/census.hpp"
#include "sitecensus/crawler.hpp"
#include "sitecensus/report.hpp"
#include "sitecensus/url.hpp"
#include "sitecensus/version.hpp"

namespace {

namespace fs = std::filesystem;
using sitecensus::census::ExtensionPolicy;
using sitecensus::census::Lexicon;
using sitecensus::crawler::CrawlConfig;
using sitecensus::report::ComparisonReport;
using sitecensus::report::SiteSummary;

struct CrawlFlags {
    CrawlConfig config;
    std::string offline_root;
    bool no_robots = false;
};

struct ExtFlags {
    std::vector<std::string> image, audio, video, active, downloadable;
};

bool write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return static_cast<bool>(out);
}

std::string derive_label(const std::string& target) {
    auto parsed = sitecensus::url::normalize_absolute(target);
    if (parsed && !parsed->host.empty()) return parsed->host;
    std::string path = parsed ? parsed->path : target;
    // last directory component, else the file stem
    std::size_t last_slash = path.rfind('/');
    std::string file = last_slash == std::string::npos ? path : path.substr(last_slash + 1);
    std::string dir = last_slash == std::string::npos ? "" : path.substr(0, last_slash);
    std::size_t dir_slash = dir.rfind('/');
    std::string dir_name = dir_slash == std::string::npos ? dir : dir.substr(dir_slash + 1);
    if (!dir_name.empty()) return dir_name;
    std::size_t dot = file.rfind('.');
    if (dot != std::string::npos && dot > 0) file.erase(dot);
    return file.empty() ? "site" : file;
}

// Explicit labels must be unique; derived ones get a numeric suffix.
int resolve_labels(const std::vector<std::string>& targets, const std::vector<std::string>& given,
                   std::vector<std::string>& out) {
    if (given.size() > targets.size()) {
        std::cerr << "error: more --label values than targets\n";
        return 1;
    }
    std::set<std::string> used;
    for (std::size_t i = 0; i < given.size(); ++i) {
        if (!used.insert(given[i]).second) {
            std::cerr << "error: duplicate label: " << given[i] << "\n";
            return 1;
        }
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (i < given.size()) {
            out.push_back(given[i]);
            continue;
        }
        std::string base = derive_label(targets[i]);
        std::string label = base;
        int n = 2;
        while (!used.insert(label).second) label = base + "-" + std::to_string(n++);
        out.push_back(label);
    }
    return 0;
}

int apply_ext_overrides(const ExtFlags& flags, ExtensionPolicy& policy) {
    auto to_set = [](const std::vector<std::string>& list) {
        std::unordered_set<std::string> out;
        for (std::string e : list) {
            for (char& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (!e.empty() && e.front() == '.') e.erase(0, 1);
            out.insert(std::move(e));
        }
        return out;
    };
    if (!flags.image.empty()) policy.image_exts = to_set(flags.image);
    if (!flags.audio.empty()) policy.audio_exts = to_set(flags.audio);
    if (!flags.video.empty()) policy.video_exts = to_set(flags.video);
    if (!flags.active.empty()) policy.active_exts = to_set(flags.active);
    if (!flags.downloadable.empty()) policy.downloadable_exts = to_set(flags.downloadable);
    try {
        policy.validate();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: bad extension policy: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

std::string render_format(const ComparisonReport& report, const std::string& format) {
    if (format == "json") return sitecensus::report::export_json(report);
    if (format == "csv") return sitecensus::report::export_csv(report);
    if (format == "svg") return sitecensus::report::render_svg(report);
    return sitecensus::report::render_ascii(report);
}

const char* format_extension(const std::string& format) {
    if (format == "ascii") return "txt";
    return format.c_str();
}

int run_scan(const std::vector<std::string>& targets, const std::vector<std::string>& given_labels,
             const CrawlFlags& flags, const ExtFlags& ext_flags,
             const std::string& lexicon_path, const std::string& out_dir,
             std::vector<std::string> formats) {
    std::vector<std::string> labels;
    if (int rc = resolve_labels(targets, given_labels, labels)) return rc;

    ExtensionPolicy policy;
    if (int rc = apply_ext_overrides(ext_flags, policy)) return rc;

    Lexicon lexicon;
    if (!lexicon_path.empty()) {
        try {
            lexicon = Lexicon::from_file(lexicon_path);
        } catch (const std::runtime_error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }

    // Validate every seed before crawling anything.
    std::vector<CrawlConfig> configs;
    for (const auto& target : targets) {
        CrawlConfig config = flags.config;
        config.seed_url = target;
        config.obey_robots = !flags.no_robots;
        if (!flags.offline_root.empty()) config.offline_root = fs::path(flags.offline_root);
        try {
            config.validate();
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        configs.push_back(std::move(config));
    }

    bool partial = false;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        sitecensus::crawler::SiteCensus site;
        try {
            site = sitecensus::crawler::crawl(configs[i], lexicon, policy);
        } catch (const std::exception& e) {
            std::cerr << "error: " << labels[i] << ": " << e.what() << "\n";
            return 1;
        }
        std::cerr << labels[i] << ": " << site.pages_visited << " pages censused, "
                  << site.pages_failed << " failed, " << site.links_skipped << " links skipped, "
                  << site.robots_skipped << " blocked by robots\n";
        if (site.pages_failed > 0) partial = true;

        ComparisonReport report =
            sitecensus::report::build_comparison({sitecensus::report::summarize(labels[i], site)});
        fs::path dir(out_dir);
        fs::path json_path = dir / (labels[i] + ".json");
        if (!write_file(json_path, sitecensus::report::export_json(report))) {
            std::cerr << "error: cannot write " << json_path.string() << "\n";
            return 1;
        }
        for (const auto& format : formats) {
            if (format == "json") continue;
            fs::path path = dir / (labels[i] + "." + format_extension(format));
            if (!write_file(path, render_format(report, format))) {
                std::cerr << "error: cannot write " << path.string() << "\n";
                return 1;
            }
        }
    }
    return partial ? 2 : 0;
}

int run_compare(const std::vector<std::string>& files, const std::vector<std::string>& labels,
                const std::string& out_path, std::vector<std::string> formats,
                const char* default_format) {
    if (labels.size() > files.size()) {
        std::cerr << "error: more --label values than report files\n";
        return 1;
    }
    std::vector<SiteSummary> sites;
    for (std::size_t i = 0; i < files.size(); ++i) {
        std::vector<SiteSummary> loaded;
        try {
            loaded = sitecensus::report::load_report(files[i]);
        } catch (const sitecensus::report::ReportFormatError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        if (loaded.empty()) {
            std::cerr << "error: " << files[i] << ": report holds no sites\n";
            return 1;
        }
        if (i < labels.size()) {
            if (loaded.size() != 1) {
                std::cerr << "error: " << files[i]
                          << ": --label needs a single-site report, this one has "
                          << loaded.size() << "\n";
                return 1;
            }
            loaded[0].label = labels[i];
        }
        for (auto& site : loaded) sites.push_back(std::move(site));
    }

    ComparisonReport report;
    try {
        report = sitecensus::report::build_comparison(sites);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    if (formats.empty()) formats.push_back(default_format);
    if (formats.size() > 1 && out_path.empty()) {
        std::cerr << "error: multiple formats need --out DIRECTORY\n";
        return 1;
    }

    // Render everything before writing anything so a failed render (too many
    // series for svg) leaves no partial output behind.
    std::vector<std::pair<std::string, std::string>> rendered;
    try {
        for (const auto& format : formats) rendered.emplace_back(format, render_format(report, format));
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    if (out_path.empty()) {
        std::cout << rendered[0].second;
        return 0;
    }
    if (rendered.size() == 1) {
        if (!write_file(out_path, rendered[0].second)) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return 1;
        }
        return 0;
    }
    for (const auto& [format, content] : rendered) {
        fs::path path = fs::path(out_path) / (std::string("comparison.") + format_extension(format));
        if (!write_file(path, content)) {
            std::cerr << "error: cannot write " << path.string() << "\n";
            return 1;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crawl websites and compare their interactive element usage"};
    app.set_version_flag("--version", sitecensus::kToolVersion);
    app.require_subcommand(1);

    CrawlFlags crawl_flags;
    ExtFlags ext_flags;
    std::vector<std::string> scan_targets, scan_labels, scan_formats;
    std::string scan_lexicon, scan_out = ".";

    auto add_format_option = [](CLI::App* cmd, std::vector<std::string>& var) {
        cmd->add_option("--format", var, "Output format (repeatable)")
            ->delimiter(',')
            ->check(CLI::IsMember({"json", "csv", "svg", "ascii"}));
    };

    CLI::App* scan = app.add_subcommand("scan", "Crawl sites and write one census report each");
    scan->add_option("targets", scan_targets, "Seed URLs (http, https or file)")->required();
    scan->add_option("--label", scan_labels, "Site label, one per target in order");
    scan->add_option("--out", scan_out, "Output directory")->capture_default_str();
    add_format_option(scan, scan_formats);
    scan->add_option("--lexicon", scan_lexicon, "Keyword lexicon file, one 1-3 word term per line");
    scan->add_option("--max-pages", crawl_flags.config.max_pages, "Page budget per site")->capture_default_str();
    scan->add_option("--max-depth", crawl_flags.config.max_depth, "Link depth from the seed")->capture_default_str();
    scan->add_option("--delay-ms", crawl_flags.config.delay_ms, "Per-host politeness delay")->capture_default_str();
    scan->add_option("--timeout-ms", crawl_flags.config.timeout_ms, "Fetch timeout")->capture_default_str();
    scan->add_option("--parallelism", crawl_flags.config.parallelism, "Concurrent fetches")->capture_default_str();
    scan->add_option("--user-agent", crawl_flags.config.user_agent, "User-Agent header")->capture_default_str();
    scan->add_flag("--subdomains-inbound", crawl_flags.config.treat_subdomains_inbound,
                   "Treat subdomains of the seed host as the same site");
    scan->add_flag("--no-robots", crawl_flags.no_robots, "Ignore robots.txt");
    scan->add_option("--offline-root", crawl_flags.offline_root,
                     "Serve file:// URLs from this directory instead of the network");
    scan->add_option("--ext-image", ext_flags.image, "Image extensions override")->delimiter(',');
    scan->add_option("--ext-audio", ext_flags.audio, "Audio extensions override")->delimiter(',');
    scan->add_option("--ext-video", ext_flags.video, "Video extensions override")->delimiter(',');
    scan->add_option("--ext-active", ext_flags.active, "Active content extensions override")
        ->delimiter(',');
    scan->add_option("--ext-downloadable", ext_flags.downloadable,
                     "Downloadable extensions override")
        ->delimiter(',');

    std::vector<std::string> compare_files, compare_labels, compare_formats;
    std::string compare_out;
    CLI::App* compare = app.add_subcommand("compare", "Combine census reports into one chart");
    compare->add_option("reports", compare_files, "Report JSON files from scan")->required();
    compare->add_option("--label", compare_labels, "Label override, one per report in order");
    compare->add_option("--out", compare_out, "Output file (or directory for multiple formats)");
    add_format_option(compare, compare_formats);

    std::vector<std::string> render_files, render_labels, render_formats;
    std::string render_out;
    CLI::App* render = app.add_subcommand("render", "Re-render charts from census reports");
    render->add_option("reports", render_files, "Report JSON files from scan")->required();
    render->add_option("--label", render_labels, "Label override, one per report in order");
    render->add_option("--out", render_out, "Output file (or directory for multiple formats)");
    add_format_option(render, render_formats);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (scan->parsed())
        return run_scan(scan_targets, scan_labels, crawl_flags, ext_flags, scan_lexicon, scan_out,
                        scan_formats);
    if (compare->parsed())
        return run_compare(compare_files, compare_labels, compare_out, compare_formats, "ascii");
    return run_compare(render_files, render_labels, render_out, render_formats, "svg");
}
