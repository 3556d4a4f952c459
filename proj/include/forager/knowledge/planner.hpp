#pragma once

#include <deque>
#include <optional>

#include "forager/features/features.hpp"
#include "forager/knowledge/rules.hpp"

namespace forager::knowledge {

// The detection predicate that motivated a plan; the plan survives only
// while a matching detection is still present.
struct PlanReason {
    int kind = 0;
    RegionLabel region = RegionLabel::Center;
};

struct Plan {
    std::deque<env::Action> queue;
    std::optional<PlanReason> reason;

    bool empty() const { return queue.empty(); }
};

struct PriorityList {
    std::array<env::Action, env::kNumActions> order;
};

// Movement-first default, turn/turn/straight ahead of the rest.
PriorityList default_priority();

struct PlannerContext {
    std::vector<Rule> rules;
    PriorityList priority = default_priority();
    features::ObjectScoreTable table; // positive scores mark approach targets
    KindCatalog catalog;
    double plane_range = 12.0;
};

struct PlannerResult {
    env::Action action = env::Action::MoveStraight;
    Plan plan;
    bool fallback = false;  // every action was forbidden
    bool replanned = false;
    std::set<env::Action> survivors; // after the rule pass (empty if plan continued)
};

// Turn-then-advance sequence toward a detected target: the bearing rounds to
// 45-degree turns (ties toward no turn), the distance to whole steps.
std::vector<env::Action> estimate_turn_and_steps(const detector::Detection& target,
                                                 double plane_range);

// Keeps executing a still-justified plan; otherwise filters actions through
// the firing rules, picks by priority, and plans toward the best
// positive-score target when one is approachable.
PlannerResult planner_decide(const std::vector<detector::Detection>& dets,
                             const PlannerContext& ctx, const Plan& plan);

} // namespace forager::knowledge
