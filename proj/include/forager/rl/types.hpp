#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "forager/rng.hpp"

namespace forager::rl {

using Vec = std::vector<double>;

struct Transition {
    Vec s;
    int a = 0;
    double r = 0.0;
    Vec s_next;
    bool done = false;
};

// Fixed-capacity ring with overwrite-oldest and uniform sampling.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity) : capacity_(capacity) {
        if (capacity_ == 0) throw std::invalid_argument("ReplayMemory: capacity must be > 0");
    }

    void push(Transition t) {
        if (buf_.size() < capacity_) {
            buf_.push_back(std::move(t));
        } else {
            buf_[head_] = std::move(t);
        }
        head_ = (head_ + 1) % capacity_;
    }

    std::size_t size() const { return buf_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return buf_[i]; }

    // Independent uniform draws over current contents.
    std::vector<Transition> sample(std::size_t n, Rng& rng) const {
        if (buf_.empty()) throw std::logic_error("ReplayMemory: sample from empty memory");
        std::vector<Transition> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(buf_[rng.uniform_int(buf_.size())]);
        return out;
    }

private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<Transition> buf_;
};

// Linear interpolation from start to end over `steps` calls, then flat.
struct LinearSchedule {
    double start = 1.0;
    double end = 0.1;
    long steps = 1;

    double value(long t) const {
        if (t >= steps || steps <= 0) return end;
        const double f = static_cast<double>(t) / static_cast<double>(steps);
        return start + f * (end - start);
    }
};

enum class ExplorationKind { Boltzmann, EpsilonGreedy };

struct ExplorationPolicy {
    ExplorationKind kind = ExplorationKind::EpsilonGreedy;
    LinearSchedule schedule;
};

struct RLSettings {
    double gamma = 1.0;
    long target_sync_period = 500;
    int batch_size = 32;
};

} // namespace forager::rl
