#include "sitecensus/robots.hpp"

#include <cctype>

namespace sitecensus::robots {

namespace {

std::string lowered(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trimmed(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

struct Group {
    std::vector<std::string> agents;
    std::vector<RobotsRules::Rule> rules;
};

}  // namespace

bool RobotsRules::allows(std::string_view path) const {
    std::size_t best_len = 0;
    bool best_allow = true;
    bool any = false;
    for (const auto& rule : rules) {
        if (!path.starts_with(rule.prefix)) continue;
        if (!any || rule.prefix.size() > best_len) {
            any = true;
            best_len = rule.prefix.size();
            best_allow = rule.allow;
        } else if (rule.prefix.size() == best_len && rule.allow) {
            best_allow = true;  // allow wins length ties
        }
    }
    return best_allow;
}

RobotsRules RobotsRules::parse(std::string_view body, std::string_view user_agent) {
    std::vector<Group> groups;
    bool in_agent_run = false;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        std::size_t eol = body.find('\n', pos);
        std::string_view line = body.substr(pos, eol == std::string_view::npos ? body.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? body.size() + 1 : eol + 1;

        std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trimmed(line);
        if (line.empty()) continue;

        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) continue;
        std::string key = lowered(trimmed(line.substr(0, colon)));
        std::string_view value = trimmed(line.substr(colon + 1));

        if (key == "user-agent") {
            // consecutive user-agent lines share one group
            if (!in_agent_run) groups.emplace_back();
            groups.back().agents.push_back(lowered(value));
            in_agent_run = true;
        } else {
            in_agent_run = false;
            if ((key == "allow" || key == "disallow") && !groups.empty() && !value.empty())
                groups.back().rules.push_back({key == "allow", std::string(value)});
        }
    }

    std::string ua = lowered(user_agent);
    const Group* star = nullptr;
    const Group* specific = nullptr;
    for (const auto& g : groups) {
        for (const auto& agent : g.agents) {
            if (agent == "*") {
                if (!star) star = &g;
            } else if (!agent.empty() && ua.find(agent) != std::string::npos) {
                if (!specific) specific = &g;
            }
        }
    }
    const Group* chosen = specific ? specific : star;
    RobotsRules out;
    if (chosen) out.rules = chosen->rules;
    return out;
}

}  // namespace sitecensus::robots
