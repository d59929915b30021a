#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sitecensus::robots {

/// Minimal robots.txt rules: prefix Allow/Disallow from the best-matching
/// user-agent group, longest prefix wins, Allow wins length ties.
struct RobotsRules {
    struct Rule {
        bool allow = false;
        std::string prefix;
    };
    std::vector<Rule> rules;

    bool allows(std::string_view path) const;

    static RobotsRules parse(std::string_view body, std::string_view user_agent);
    static RobotsRules allow_all() { return {}; }
};

}  // namespace sitecensus::robots
