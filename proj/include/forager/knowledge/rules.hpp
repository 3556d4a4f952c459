#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include "forager/detector/detector.hpp"

namespace forager::knowledge {

enum class RegionLabel { Center, Left, Right, Other };

const char* region_name(RegionLabel r);

// Image-plane discretization: the outer thirds are left/right, the middle
// third splits into a near center band (cy >= 0.5) and a far "other" band.
RegionLabel region_of(const PlaneBox& box);

// What a rule can refer to.
enum class SubjectType { Kind, Health, Obstacle };

struct RuleSubject {
    SubjectType type = SubjectType::Kind;
    int kind = 0;                                       // Kind
    env::HealthClass health = env::HealthClass::Neutral; // Health
    env::ObstacleType obstacle = env::ObstacleType::Wall; // Obstacle
};

struct Rule {
    RuleSubject subject;
    RegionLabel region = RegionLabel::Center;
    std::set<env::Action> forbidden; // proper subset of the action set
};

// Kind/health lookup the rule engine needs to resolve health-class subjects
// and obstacle classes on the shared class-id space.
struct KindCatalog {
    std::vector<env::FoodKind> foods;
    int n_food_kinds() const { return static_cast<int>(foods.size()); }

    bool is_food(int class_id) const { return class_id >= 0 && class_id < n_food_kinds(); }
    bool is_obstacle(int class_id, env::ObstacleType t) const {
        return class_id == n_food_kinds() + static_cast<int>(t);
    }
    env::HealthClass health_of(int class_id) const {
        return is_food(class_id) ? foods[class_id].health : env::HealthClass::Neutral;
    }
};

bool rule_matches(const Rule& rule, const detector::Detection& det, const KindCatalog& catalog);

// One rule per line:
//   forbid <action>[,<action>...] when <subject> in <region>
// subject: kind<N> | healthy | unhealthy | neutral | wall | low_barrier | overhang
// region:  left | center | right | other
// '#' starts a comment. Unknown tokens are rejected with their line number.
std::vector<Rule> parse_rules(const std::string& text);
std::vector<Rule> load_rules_file(const std::string& path);

// The shipped default rule set (43 rules) rendered as DSL text.
std::string default_rules_text();

} // namespace forager::knowledge
