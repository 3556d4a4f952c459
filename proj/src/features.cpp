#include "forager/features/features.hpp"

#include <cmath>
#include <stdexcept>

namespace forager::features {

ObjectScoreTable default_score_table(const std::vector<env::FoodKind>& kinds, int n_classes) {
    ObjectScoreTable t;
    t.scores.assign(n_classes, 0.0);
    for (const env::FoodKind& k : kinds) {
        if (k.health == env::HealthClass::Healthy) {
            t.scores[k.id] = 5.0;
            t.tracked.insert(k.id);
        } else if (k.health == env::HealthClass::Unhealthy) {
            t.scores[k.id] = -15.0;
            t.tracked.insert(k.id);
        }
    }
    return t;
}

PresenceVector presence(const std::vector<detector::Detection>& dets,
                        const ObjectScoreTable& table) {
    const std::vector<int> tracked = table.tracked_sorted();
    PresenceVector pv;
    pv.flags.assign(tracked.size(), false);
    for (const detector::Detection& d : dets) {
        for (std::size_t i = 0; i < tracked.size(); ++i) {
            if (tracked[i] == d.kind) {
                pv.flags[i] = true;
                break;
            }
        }
    }
    return pv;
}

int plane_cell(double u, int k) {
    const double x = u * k;
    int j = static_cast<int>(std::floor(x));
    if (j > 0 && x == std::floor(x)) --j; // border belongs to the lower cell
    if (j < 0) j = 0;
    if (j >= k) j = k - 1;
    return j;
}

AreaGrid area_scores(const std::vector<detector::Detection>& dets, int k,
                     const ObjectScoreTable& table, const FeatureFilter& filter) {
    if (k < 1) throw std::invalid_argument("area_scores: k must be >= 1");
    AreaGrid grid;
    grid.k = k;
    grid.scores.assign(static_cast<std::size_t>(k) * k, 0.0);
    grid.region_mask = filter.mask;

    for (const detector::Detection& d : dets) {
        if (d.confidence < filter.min_confidence) continue;
        if (!filter.mask.contains(d.box.cy)) continue;
        if (plane_distance(d.box.cy, filter.plane_range) > filter.max_distance) continue;
        const double s = table.score_of(d.kind);
        if (s == 0.0) continue;
        const int row = plane_cell(d.box.cy, k);
        const int col = plane_cell(d.box.cx, k);
        grid.scores[static_cast<std::size_t>(row) * k + col] += s;
    }
    return grid;
}

void FeatureStack::reset() {
    for (auto& f : frames_) std::fill(f.begin(), f.end(), 0.0);
}

std::vector<double> FeatureStack::flattened() const {
    std::vector<double> out;
    out.reserve(flat_size());
    for (const auto& f : frames_) out.insert(out.end(), f.begin(), f.end());
    return out;
}

FeatureStack push_frame(const FeatureStack& stack, const AreaGrid& grid) {
    if (grid.k != stack.k_)
        throw std::invalid_argument("push_frame: grid k does not match stack k");
    FeatureStack next = stack;
    next.frames_[2] = stack.frames_[1];
    next.frames_[1] = stack.frames_[0];
    next.frames_[0] = grid.scores;
    return next;
}

} // namespace forager::features
