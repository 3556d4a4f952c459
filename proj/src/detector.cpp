#include "forager/detector/detector.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace forager::detector {

void DetectorConfig::validate() const {
    if (p_miss < 0.0 || p_miss > 1.0) throw std::invalid_argument("DetectorConfig: p_miss out of [0,1]");
    if (fp_rate < 0.0) throw std::invalid_argument("DetectorConfig: fp_rate must be >= 0");
    if (confusion_swap < 0.0 || confusion_swap > 1.0)
        throw std::invalid_argument("DetectorConfig: confusion_swap out of [0,1]");
    if (box_jitter < 0.0) throw std::invalid_argument("DetectorConfig: box_jitter must be >= 0");
    if (n_food_kinds <= 0) throw std::invalid_argument("DetectorConfig: n_food_kinds must be > 0");
}

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

int maybe_swap_label(int kind, const DetectorConfig& cfg, Rng& rng) {
    for (const auto& [a, b] : cfg.confusion_pairs) {
        if (kind == a || kind == b) {
            if (rng.bernoulli(cfg.confusion_swap)) return kind == a ? b : a;
            return kind;
        }
    }
    return kind;
}

} // namespace

std::vector<Detection> detect(const std::vector<env::ProjectedObject>& truth,
                              const DetectorConfig& cfg, Rng& rng) {
    std::vector<Detection> out;
    out.reserve(truth.size());
    for (const env::ProjectedObject& obj : truth) {
        if (rng.bernoulli(cfg.p_miss)) continue;
        Detection d;
        d.kind = maybe_swap_label(obj.kind, cfg, rng);
        PlaneBox b = obj.box;
        b.cx += rng.normal(0.0, cfg.box_jitter);
        b.cy += rng.normal(0.0, cfg.box_jitter);
        d.box = clamp_box(b);
        d.confidence = clamp01(rng.normal(cfg.confidence_law.true_mean, cfg.confidence_law.true_sd));
        out.push_back(d);
    }
    const int n_spurious = rng.poisson(cfg.fp_rate);
    for (int i = 0; i < n_spurious; ++i) {
        Detection d;
        d.kind = static_cast<int>(rng.uniform_int(cfg.n_food_kinds));
        PlaneBox b;
        b.w = b.h = rng.uniform(0.02, 0.10);
        b.cx = rng.uniform01();
        b.cy = rng.uniform01();
        d.box = clamp_box(b);
        d.confidence = clamp01(rng.normal(cfg.confidence_law.fp_mean, cfg.confidence_law.fp_sd));
        out.push_back(d);
    }
    return out;
}

double box_iou(const PlaneBox& a, const PlaneBox& b) {
    const double ax0 = a.cx - a.w / 2, ax1 = a.cx + a.w / 2;
    const double ay0 = a.cy - a.h / 2, ay1 = a.cy + a.h / 2;
    const double bx0 = b.cx - b.w / 2, bx1 = b.cx + b.w / 2;
    const double by0 = b.cy - b.h / 2, by1 = b.cy + b.h / 2;
    const double iw = std::min(ax1, bx1) - std::max(ax0, bx0);
    const double ih = std::min(ay1, by1) - std::max(ay0, by0);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.w * a.h + b.w * b.h - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

struct MatchCounts {
    long tp = 0;
    long fp = 0;
    long fn = 0;
};

// Greedy same-class matching by descending IoU; any positive overlap counts.
MatchCounts match_frame(const std::vector<env::ProjectedObject>& truth,
                        const std::vector<Detection>& dets,
                        std::vector<long>* tp_per_kind, std::vector<long>* fp_per_kind) {
    MatchCounts c;
    std::vector<bool> truth_used(truth.size(), false);
    std::vector<bool> det_used(dets.size(), false);

    struct Cand {
        double iou;
        std::size_t ti;
        std::size_t di;
    };
    std::vector<Cand> cands;
    for (std::size_t ti = 0; ti < truth.size(); ++ti)
        for (std::size_t di = 0; di < dets.size(); ++di)
            if (truth[ti].kind == dets[di].kind) {
                const double iou = box_iou(truth[ti].box, dets[di].box);
                if (iou > 0.0) cands.push_back({iou, ti, di});
            }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.ti != b.ti) return a.ti < b.ti;
        return a.di < b.di;
    });
    for (const Cand& cd : cands) {
        if (truth_used[cd.ti] || det_used[cd.di]) continue;
        truth_used[cd.ti] = true;
        det_used[cd.di] = true;
        ++c.tp;
        if (tp_per_kind && dets[cd.di].kind < static_cast<int>(tp_per_kind->size()))
            ++(*tp_per_kind)[dets[cd.di].kind];
    }
    for (std::size_t ti = 0; ti < truth.size(); ++ti)
        if (!truth_used[ti]) ++c.fn;
    for (std::size_t di = 0; di < dets.size(); ++di)
        if (!det_used[di]) {
            ++c.fp;
            if (fp_per_kind && dets[di].kind < static_cast<int>(fp_per_kind->size()))
                ++(*fp_per_kind)[dets[di].kind];
        }
    return c;
}

} // namespace

ErrorMix measure_error_mix(const DetectorConfig& cfg, long n_frames, const FrameSampler& sampler,
                           std::uint64_t seed) {
    return calibrate(cfg, n_frames, sampler, seed).mix;
}

CalibrationReport calibrate(const DetectorConfig& cfg, long n_frames, const FrameSampler& sampler,
                            std::uint64_t seed) {
    if (n_frames < 1) throw std::invalid_argument("measure_error_mix: n_frames must be >= 1");
    cfg.validate();
    Rng rng(mix_seed(cfg.rng_seed, mix_seed(seed, 0xD37EC7)));
    CalibrationReport rep;
    rep.per_kind_precision.assign(cfg.n_food_kinds, 0.0);
    std::vector<long> tp_per_kind(cfg.n_food_kinds, 0), fp_per_kind(cfg.n_food_kinds, 0);

    for (long f = 0; f < n_frames; ++f) {
        const std::vector<env::ProjectedObject> truth = sampler();
        const std::vector<Detection> dets = detect(truth, cfg, rng);
        const MatchCounts c = match_frame(truth, dets, &tp_per_kind, &fp_per_kind);
        rep.mix.true_positives += c.tp;
        rep.mix.false_positives += c.fp;
        rep.mix.false_negatives += c.fn;
    }
    const long errors = rep.mix.false_positives + rep.mix.false_negatives;
    if (errors > 0) {
        rep.mix.fp_share = static_cast<double>(rep.mix.false_positives) / errors;
        rep.mix.fn_share = static_cast<double>(rep.mix.false_negatives) / errors;
    }
    for (int k = 0; k < cfg.n_food_kinds; ++k) {
        const long denom = tp_per_kind[k] + fp_per_kind[k];
        rep.per_kind_precision[k] = denom > 0 ? static_cast<double>(tp_per_kind[k]) / denom : 0.0;
    }
    return rep;
}

FrameSampler random_agent_sampler(const env::WorldConfig& cfg, std::uint64_t seed) {
    auto world = std::make_shared<env::World>(cfg);
    auto rng = std::make_shared<Rng>(mix_seed(seed, 0xA6E47));
    auto episode = std::make_shared<long>(0);
    world->reset(mix_seed(seed, static_cast<std::uint64_t>(*episode)));
    return [world, rng, episode, seed]() {
        if (world->done()) {
            ++*episode;
            world->reset(mix_seed(seed, static_cast<std::uint64_t>(*episode)));
        }
        const env::Observation obs = world->observe();
        world->step(static_cast<env::Action>(rng->uniform_int(env::kNumActions)));
        return obs.visible_objects;
    };
}

} // namespace forager::detector
