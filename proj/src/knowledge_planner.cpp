#include "forager/knowledge/planner.hpp"

#include <algorithm>
#include <cmath>

namespace forager::knowledge {

PriorityList default_priority() {
    using env::Action;
    return {{Action::TurnLeft, Action::TurnRight, Action::MoveStraight, Action::Crouch,
             Action::Jump, Action::MoveBack}};
}

std::vector<env::Action> estimate_turn_and_steps(const detector::Detection& target,
                                                 double plane_range) {
    const double bearing = plane_bearing(target.box.cx);
    const long n_turn = std::llround(bearing / (M_PI / 4.0));
    const long n_steps = std::max<long>(1, std::llround(plane_distance(target.box.cy, plane_range)));

    std::vector<env::Action> seq;
    const env::Action turn = n_turn < 0 ? env::Action::TurnLeft : env::Action::TurnRight;
    for (long i = 0; i < std::labs(n_turn); ++i) seq.push_back(turn);
    for (long i = 0; i < n_steps; ++i) seq.push_back(env::Action::MoveStraight);
    return seq;
}

namespace {

bool reason_holds(const PlanReason& reason, const std::vector<detector::Detection>& dets) {
    for (const detector::Detection& d : dets)
        if (d.kind == reason.kind && region_of(d.box) == reason.region) return true;
    return false;
}

} // namespace

PlannerResult planner_decide(const std::vector<detector::Detection>& dets,
                             const PlannerContext& ctx, const Plan& plan) {
    PlannerResult res;

    // Re-check the pending plan before anything else.
    if (!plan.empty() && plan.reason && reason_holds(*plan.reason, dets)) {
        res.plan = plan;
        res.action = res.plan.queue.front();
        res.plan.queue.pop_front();
        return res;
    }
    res.replanned = true;

    // Rule pass: every firing rule shrinks the survivor set.
    std::set<env::Action> survivors;
    for (int i = 0; i < env::kNumActions; ++i) survivors.insert(static_cast<env::Action>(i));
    for (const Rule& rule : ctx.rules) {
        for (const detector::Detection& d : dets) {
            if (rule_matches(rule, d, ctx.catalog)) {
                for (env::Action a : rule.forbidden) survivors.erase(a);
                break;
            }
        }
    }
    if (survivors.empty()) {
        survivors.insert(ctx.priority.order[0]);
        res.fallback = true;
    }
    res.survivors = survivors;

    // Targets in descending desirability: score first, then nearness.
    std::vector<const detector::Detection*> targets;
    for (const detector::Detection& d : dets)
        if (ctx.table.score_of(d.kind) > 0.0) targets.push_back(&d);
    std::sort(targets.begin(), targets.end(),
              [&](const detector::Detection* a, const detector::Detection* b) {
                  const double sa = ctx.table.score_of(a->kind);
                  const double sb = ctx.table.score_of(b->kind);
                  if (sa != sb) return sa > sb;
                  if (a->box.cy != b->box.cy) return a->box.cy > b->box.cy;
                  return a->box.cx < b->box.cx;
              });

    // Approach the best target whose opening move survived the rules; the
    // decision is then the new plan's head. Later queue entries are not
    // re-filtered, only re-justified on the following steps.
    for (const detector::Detection* target : targets) {
        std::vector<env::Action> seq = estimate_turn_and_steps(*target, ctx.plane_range);
        if (seq.empty() || !survivors.count(seq.front())) continue;
        res.plan.queue.assign(seq.begin(), seq.end());
        res.plan.reason = PlanReason{target->kind, region_of(target->box)};
        res.action = res.plan.queue.front();
        res.plan.queue.pop_front();
        return res;
    }

    // No approachable target: highest-priority survivor, no plan.
    for (env::Action a : ctx.priority.order) {
        if (survivors.count(a)) {
            res.action = a;
            return res;
        }
    }
    res.action = ctx.priority.order[0];
    return res;
}

} // namespace forager::knowledge
