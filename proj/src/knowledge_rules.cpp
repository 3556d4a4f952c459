#include "forager/knowledge/rules.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace forager::knowledge {

const char* region_name(RegionLabel r) {
    switch (r) {
        case RegionLabel::Center: return "center";
        case RegionLabel::Left: return "left";
        case RegionLabel::Right: return "right";
        case RegionLabel::Other: return "other";
    }
    return "?";
}

RegionLabel region_of(const PlaneBox& box) {
    if (box.cx < 1.0 / 3.0) return RegionLabel::Left;
    if (box.cx > 2.0 / 3.0) return RegionLabel::Right;
    return box.cy >= 0.5 ? RegionLabel::Center : RegionLabel::Other;
}

bool rule_matches(const Rule& rule, const detector::Detection& det, const KindCatalog& catalog) {
    if (region_of(det.box) != rule.region) return false;
    switch (rule.subject.type) {
        case SubjectType::Kind:
            return det.kind == rule.subject.kind;
        case SubjectType::Health:
            return catalog.is_food(det.kind) && catalog.health_of(det.kind) == rule.subject.health;
        case SubjectType::Obstacle:
            return catalog.is_obstacle(det.kind, rule.subject.obstacle);
    }
    return false;
}

namespace {

[[noreturn]] void parse_fail(int line_no, const std::string& what) {
    throw std::runtime_error("rules: line " + std::to_string(line_no) + ": " + what);
}

RegionLabel parse_region(const std::string& tok, int line_no) {
    if (tok == "left") return RegionLabel::Left;
    if (tok == "right") return RegionLabel::Right;
    if (tok == "center") return RegionLabel::Center;
    if (tok == "other") return RegionLabel::Other;
    parse_fail(line_no, "unknown region '" + tok + "'");
}

RuleSubject parse_subject(const std::string& tok, int line_no) {
    RuleSubject s;
    if (tok == "healthy" || tok == "unhealthy" || tok == "neutral") {
        s.type = SubjectType::Health;
        s.health = tok == "healthy"   ? env::HealthClass::Healthy
                   : tok == "unhealthy" ? env::HealthClass::Unhealthy
                                        : env::HealthClass::Neutral;
        return s;
    }
    if (tok == "wall" || tok == "low_barrier" || tok == "overhang") {
        s.type = SubjectType::Obstacle;
        s.obstacle = tok == "wall"          ? env::ObstacleType::Wall
                     : tok == "low_barrier" ? env::ObstacleType::LowBarrier
                                            : env::ObstacleType::Overhang;
        return s;
    }
    if (tok.rfind("kind", 0) == 0 && tok.size() > 4) {
        try {
            std::size_t used = 0;
            const int id = std::stoi(tok.substr(4), &used);
            if (used == tok.size() - 4 && id >= 0) {
                s.type = SubjectType::Kind;
                s.kind = id;
                return s;
            }
        } catch (const std::exception&) {
        }
    }
    parse_fail(line_no, "unknown subject '" + tok + "'");
}

} // namespace

std::vector<Rule> parse_rules(const std::string& text) {
    std::vector<Rule> rules;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue; // blank or comment-only
        if (word != "forbid") parse_fail(line_no, "expected 'forbid', got '" + word + "'");

        std::string actions_tok;
        if (!(ls >> actions_tok)) parse_fail(line_no, "missing action list");
        Rule rule;
        std::istringstream as(actions_tok);
        std::string a;
        while (std::getline(as, a, ',')) {
            if (a.empty()) parse_fail(line_no, "empty action in list");
            try {
                rule.forbidden.insert(env::action_from_name(a));
            } catch (const std::exception&) {
                parse_fail(line_no, "unknown action '" + a + "'");
            }
        }
        if (rule.forbidden.empty()) parse_fail(line_no, "empty action list");
        if (rule.forbidden.size() >= static_cast<std::size_t>(env::kNumActions))
            parse_fail(line_no, "a rule may not forbid every action");

        std::string kw, subject_tok, kw2, region_tok, extra;
        if (!(ls >> kw >> subject_tok >> kw2 >> region_tok))
            parse_fail(line_no, "expected 'when <subject> in <region>'");
        if (kw != "when") parse_fail(line_no, "expected 'when', got '" + kw + "'");
        if (kw2 != "in") parse_fail(line_no, "expected 'in', got '" + kw2 + "'");
        if (ls >> extra) parse_fail(line_no, "unexpected trailing token '" + extra + "'");
        rule.subject = parse_subject(subject_tok, line_no);
        rule.region = parse_region(region_tok, line_no);
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::vector<Rule> load_rules_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("rules: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_rules(ss.str());
}

std::string default_rules_text() {
    std::ostringstream out;
    out << "# Default rule set: keep away from unhealthy food, do not walk into\n"
           "# obstacles, and do not back off while something worthwhile is visible.\n"
           "\n"
           "# Unhealthy kinds: block the approach toward wherever they appear.\n";
    const int unhealthy[] = {0, 1, 2, 3, 4};
    for (int k : unhealthy) {
        out << "forbid turn_left when kind" << k << " in left\n";
        out << "forbid move_straight when kind" << k << " in left\n";
        out << "forbid move_straight when kind" << k << " in center\n";
        out << "forbid crouch,jump when kind" << k << " in center\n";
        out << "forbid turn_right when kind" << k << " in right\n";
        out << "forbid move_straight when kind" << k << " in right\n";
    }
    out << "\n# Obstacles: never walk into what cannot be passed head-on.\n"
           "forbid turn_left when wall in left\n"
           "forbid move_straight,jump,crouch when wall in center\n"
           "forbid turn_right when wall in right\n"
           "forbid turn_left when low_barrier in left\n"
           "forbid move_straight,crouch when low_barrier in center\n"
           "forbid turn_right when low_barrier in right\n"
           "forbid turn_left when overhang in left\n"
           "forbid move_straight,jump when overhang in center\n"
           "forbid turn_right when overhang in right\n"
           "\n# Anti-stall: no retreating while a healthy target is in sight.\n"
           "forbid move_back when healthy in left\n"
           "forbid move_back when healthy in center\n"
           "forbid move_back when healthy in right\n"
           "forbid move_back when healthy in other\n";
    return out.str();
}

} // namespace forager::knowledge
