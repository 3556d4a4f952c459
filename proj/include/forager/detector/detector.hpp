#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "forager/env/plane.hpp"
#include "forager/env/world.hpp"
#include "forager/rng.hpp"

namespace forager::detector {

struct Detection {
    int kind = 0; // object class id (food kind or obstacle class)
    PlaneBox box;
    double confidence = 0.0;
};

// Clamped-normal confidence parameters for real and spurious detections.
struct ConfidenceLaw {
    double true_mean = 0.78;
    double true_sd = 0.12;
    double fp_mean = 0.40;
    double fp_sd = 0.18;
};

struct DetectorConfig {
    double p_miss = 0.05;               // per-object miss probability
    double fp_rate = 0.70;              // Poisson mean of spurious detections per frame
    std::vector<std::pair<int, int>> confusion_pairs{{0, 1}};
    double confusion_swap = 0.20;       // label swap probability within a pair
    double box_jitter = 0.02;           // plane-space sd on box center
    ConfidenceLaw confidence_law;
    int n_food_kinds = 20;              // spurious labels are drawn from food kinds
    std::uint64_t rng_seed = 0;

    void validate() const;
};

// Emits each true object with probability 1 - p_miss (jittered box, sampled
// confidence, possible label swap inside a confusion pair), then appends
// Poisson(fp_rate) spurious detections at uniform plane positions.
std::vector<Detection> detect(const std::vector<env::ProjectedObject>& truth,
                              const DetectorConfig& cfg, Rng& rng);

struct ErrorMix {
    double fp_share = 0.0;
    double fn_share = 0.0;
    long false_positives = 0;
    long false_negatives = 0;
    long true_positives = 0;
};

struct CalibrationReport {
    ErrorMix mix;
    std::vector<double> per_kind_precision; // TP / (TP + FP) per food kind
};

using FrameSampler = std::function<std::vector<env::ProjectedObject>()>;

// Runs the detector over sampled frames and matches detections to truth by
// greedy class-aware box overlap. Unmatched detections are false positives,
// unmatched truths false negatives; shares are (0,0) when no errors occur.
ErrorMix measure_error_mix(const DetectorConfig& cfg, long n_frames, const FrameSampler& sampler,
                           std::uint64_t seed = 1);

CalibrationReport calibrate(const DetectorConfig& cfg, long n_frames, const FrameSampler& sampler,
                            std::uint64_t seed = 1);

// Intersection-over-union of two plane boxes.
double box_iou(const PlaneBox& a, const PlaneBox& b);

// Frame source used for calibration: observations of a uniformly random
// agent in a world built from cfg, one step per frame.
FrameSampler random_agent_sampler(const env::WorldConfig& cfg, std::uint64_t seed);

} // namespace forager::detector
