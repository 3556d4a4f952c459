#pragma once

#include <set>
#include <vector>

#include "forager/detector/detector.hpp"

namespace forager::features {

// Per-kind object scores plus the set of kinds the features care about.
// Untracked kinds score 0 and never appear in presence vectors.
struct ObjectScoreTable {
    std::vector<double> scores; // indexed by object class id
    std::set<int> tracked;

    double score_of(int kind) const {
        if (!tracked.count(kind)) return 0.0;
        return kind >= 0 && kind < static_cast<int>(scores.size()) ? scores[kind] : 0.0;
    }
    std::vector<int> tracked_sorted() const { return {tracked.begin(), tracked.end()}; }
};

// Shipped default: healthy kinds +5, unhealthy -15, everything else 0 and
// untracked.
ObjectScoreTable default_score_table(const std::vector<env::FoodKind>& kinds, int n_classes);

struct PresenceVector {
    std::vector<bool> flags; // one per tracked kind, ascending kind id

    std::vector<double> as_input() const {
        return std::vector<double>(flags.begin(), flags.end());
    }
};

// cy interval of the image plane that is scored; [0, 1] scores everything,
// [0.5, 1] restricts to the near (bottom) half.
struct RegionMask {
    double lo = 0.0;
    double hi = 1.0;
    bool contains(double cy) const { return cy >= lo && cy <= hi; }
    bool full() const { return lo <= 0.0 && hi >= 1.0; }
};

struct FeatureFilter {
    double min_confidence = 0.25;
    double max_distance = 9.0;     // cells
    double plane_range = 12.0;     // max visible distance used to invert cy
    RegionMask mask;
};

struct AreaGrid {
    int k = 0;
    std::vector<double> scores; // k*k, row-major, row 0 = top of the plane
    RegionMask region_mask;
};

PresenceVector presence(const std::vector<detector::Detection>& dets,
                        const ObjectScoreTable& table);

// Sums the score of each surviving detection into the k x k cell holding its
// box center. Border ties round toward the lower-index cell.
AreaGrid area_scores(const std::vector<detector::Detection>& dets, int k,
                     const ObjectScoreTable& table, const FeatureFilter& filter);

// Current grid plus the two previous ones, flattened [t, t-1, t-2].
// Missing history is zero-filled.
class FeatureStack {
public:
    explicit FeatureStack(int k) : k_(k), frames_(3, std::vector<double>(k * k, 0.0)) {}

    int k() const { return k_; }
    std::size_t flat_size() const { return static_cast<std::size_t>(3) * k_ * k_; }

    void reset();
    std::vector<double> flattened() const;

private:
    friend FeatureStack push_frame(const FeatureStack& stack, const AreaGrid& grid);
    int k_;
    std::vector<std::vector<double>> frames_; // [current, t-1, t-2]
};

// Shifts history down one slot and installs the new grid. Throws on k mismatch.
FeatureStack push_frame(const FeatureStack& stack, const AreaGrid& grid);

// Grid cell index of a plane coordinate; exact border values belong to the
// lower-index cell.
int plane_cell(double u, int k);

} // namespace forager::features
