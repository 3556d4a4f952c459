#include "forager/env/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace forager::env {

namespace {

constexpr const char* kActionNames[kNumActions] = {
    "turn_left", "turn_right", "crouch", "jump", "move_straight", "move_back"};

// 0 = N, clockwise in 45-degree steps.
constexpr int kStepX[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kStepY[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

} // namespace

const char* action_name(Action a) { return kActionNames[static_cast<int>(a)]; }

Action action_from_name(const std::string& name) {
    for (int i = 0; i < kNumActions; ++i)
        if (name == kActionNames[i]) return static_cast<Action>(i);
    throw std::invalid_argument("unknown action: " + name);
}

std::vector<FoodKind> make_food_kinds(int n_kinds) {
    if (n_kinds <= 0 || n_kinds % 4 != 0)
        throw std::invalid_argument("make_food_kinds: kind count must be a positive multiple of 4");
    std::vector<FoodKind> kinds(n_kinds);
    const double step = 4.0 / n_kinds;
    const int half = n_kinds / 2;
    const int quarter = n_kinds / 4;
    for (int i = 0; i < n_kinds; ++i) {
        kinds[i].id = i;
        // Lattice -2..+2 with 0 skipped: lower half descends from -step*half.
        kinds[i].reward = i < half ? -2.0 + step * i : step * (i - half + 1);
        if (i < quarter)
            kinds[i].health = HealthClass::Unhealthy;
        else if (i >= n_kinds - quarter)
            kinds[i].health = HealthClass::Healthy;
        else
            kinds[i].health = HealthClass::Neutral;
    }
    return kinds;
}

void WorldConfig::validate() const {
    if (grid_w < 3 || grid_h < 3) throw std::invalid_argument("WorldConfig: grid too small");
    if (n_food_kinds <= 0) throw std::invalid_argument("WorldConfig: need at least one food kind");
    if (n_food_items < 0 || n_obstacles < 0) throw std::invalid_argument("WorldConfig: negative count");
    if (n_food_items % n_food_kinds != 0)
        throw std::invalid_argument("WorldConfig: n_food_items must divide equally among kinds");
    if (episode_len <= 0) throw std::invalid_argument("WorldConfig: episode_len must be > 0");
    if (fov_depth < 1 || fov_halfwidth < 0) throw std::invalid_argument("WorldConfig: bad fov");
    if (max_visible_distance < 1.0)
        throw std::invalid_argument("WorldConfig: max_visible_distance must be >= 1");
    // Each obstacle occupies up to 3 cells; one more cell for the agent.
    if (n_food_items + 3 * n_obstacles + 1 > grid_w * grid_h)
        throw std::invalid_argument("WorldConfig: requested counts exceed grid capacity");
}

std::array<double, 2> heading_vec(int heading) {
    const double inv = (kStepX[heading] != 0 && kStepY[heading] != 0) ? 1.0 / std::sqrt(2.0) : 1.0;
    return {kStepX[heading] * inv, kStepY[heading] * inv};
}

std::array<double, 2> right_vec(int heading) {
    const auto h = heading_vec(heading);
    return {-h[1], h[0]};
}

std::array<int, 2> heading_step(int heading) { return {kStepX[heading], kStepY[heading]}; }

World::World(const WorldConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    kinds_ = make_food_kinds(cfg_.n_food_kinds);
    reset(cfg_.rng_seed);
}

bool World::is_wall(Cell c) const {
    auto it = obstacle_cells_.find(cell_index(c));
    return it != obstacle_cells_.end() && it->second == ObstacleType::Wall;
}

bool World::has_obstacle(Cell c, ObstacleType t) const {
    auto it = obstacle_cells_.find(cell_index(c));
    return it != obstacle_cells_.end() && it->second == t;
}

void World::reset(std::uint64_t seed) {
    food_.clear();
    obstacle_cells_.clear();
    obstacle_entities_.clear();
    step_count_ = 0;
    cum_reward_ = 0.0;
    Rng rng(mix_seed(seed, 0x57524c44));
    place_all(rng);
}

void World::place_all(Rng& rng) {
    // Obstacles first: straight 3-cell segments, types cycling so every run
    // contains each subtype when n_obstacles >= 3.
    const int max_attempts = 1000;
    for (int i = 0; i < cfg_.n_obstacles; ++i) {
        const ObstacleType type = static_cast<ObstacleType>(i % 3);
        bool placed = false;
        for (int attempt = 0; attempt < max_attempts && !placed; ++attempt) {
            const int x = static_cast<int>(rng.uniform_int(cfg_.grid_w));
            const int y = static_cast<int>(rng.uniform_int(cfg_.grid_h));
            const bool horizontal = rng.bernoulli(0.5);
            std::vector<Cell> cells;
            bool ok = true;
            for (int j = 0; j < 3; ++j) {
                Cell c{horizontal ? x + j : x, horizontal ? y : y + j};
                if (!in_bounds(c) || obstacle_cells_.count(cell_index(c))) {
                    ok = false;
                    break;
                }
                cells.push_back(c);
            }
            if (!ok) continue;
            for (Cell c : cells) obstacle_cells_[cell_index(c)] = type;
            obstacle_entities_.push_back({type, cells});
            placed = true;
        }
        if (!placed)
            throw std::runtime_error("World::reset: obstacle placement failed, grid too crowded");
    }

    // Food: sample distinct free cells, then deal kinds out equally.
    std::vector<int> free_cells;
    free_cells.reserve(static_cast<std::size_t>(cfg_.grid_w) * cfg_.grid_h);
    for (int idx = 0; idx < cfg_.grid_w * cfg_.grid_h; ++idx)
        if (!obstacle_cells_.count(idx)) free_cells.push_back(idx);
    if (static_cast<int>(free_cells.size()) < cfg_.n_food_items + 1)
        throw std::runtime_error("World::reset: not enough free cells for food placement");

    // Partial Fisher-Yates: the first n_food_items entries become the food
    // cells, the next one the agent.
    for (int i = 0; i <= cfg_.n_food_items; ++i) {
        const std::size_t j = i + rng.uniform_int(free_cells.size() - i);
        std::swap(free_cells[i], free_cells[j]);
    }
    const int per_kind = cfg_.n_food_kinds > 0 ? cfg_.n_food_items / cfg_.n_food_kinds : 0;
    for (int i = 0; i < cfg_.n_food_items; ++i) food_[free_cells[i]] = per_kind > 0 ? i / per_kind : 0;

    const int agent_idx = free_cells[cfg_.n_food_items];
    agent_ = {agent_idx % cfg_.grid_w, agent_idx / cfg_.grid_w};
    heading_ = static_cast<int>(rng.uniform_int(8));
}

void World::set_agent(Cell c, int heading) {
    if (!in_bounds(c)) throw std::invalid_argument("set_agent: out of bounds");
    if (obstacle_cells_.count(cell_index(c)))
        throw std::invalid_argument("set_agent: cell is occupied by an obstacle");
    if (heading < 0 || heading > 7) throw std::invalid_argument("set_agent: bad heading");
    agent_ = c;
    heading_ = heading;
}

void World::add_food(Cell c, int kind) {
    if (!in_bounds(c)) throw std::invalid_argument("add_food: out of bounds");
    if (kind < 0 || kind >= cfg_.n_food_kinds) throw std::invalid_argument("add_food: bad kind");
    if (obstacle_cells_.count(cell_index(c)))
        throw std::invalid_argument("add_food: cell is occupied by an obstacle");
    food_[cell_index(c)] = kind;
}

void World::add_obstacle(ObstacleType type, const std::vector<Cell>& cells) {
    for (Cell c : cells) {
        if (!in_bounds(c)) throw std::invalid_argument("add_obstacle: out of bounds");
        if (c == agent_) throw std::invalid_argument("add_obstacle: cell holds the agent");
        food_.erase(cell_index(c));
        obstacle_cells_[cell_index(c)] = type;
    }
    obstacle_entities_.push_back({type, cells});
}

void World::clear_items() {
    food_.clear();
    obstacle_cells_.clear();
    obstacle_entities_.clear();
}

bool World::blocked_for_walk(Cell c) const {
    return !in_bounds(c) || obstacle_cells_.count(cell_index(c)) != 0;
}

bool World::blocked_for_crouch(Cell c) const {
    if (!in_bounds(c)) return true;
    auto it = obstacle_cells_.find(cell_index(c));
    return it != obstacle_cells_.end() && it->second != ObstacleType::Overhang;
}

void World::enter_cell(Cell c, StepResult& r) {
    agent_ = c;
    auto it = food_.find(cell_index(c));
    if (it != food_.end()) {
        r.reward = kinds_[it->second].reward;
        r.picked_food = true;
        r.picked_kind = it->second;
        food_.erase(it);
    }
}

StepResult World::step(Action action) {
    if (done()) throw std::logic_error("World::step: episode already finished");
    StepResult r;
    const auto d = heading_step(heading_);
    const bool under_overhang = has_obstacle(agent_, ObstacleType::Overhang);

    switch (action) {
        case Action::TurnLeft:
            heading_ = (heading_ + 7) % 8;
            break;
        case Action::TurnRight:
            heading_ = (heading_ + 1) % 8;
            break;
        case Action::MoveStraight: {
            const Cell to{agent_.x + d[0], agent_.y + d[1]};
            if (!under_overhang && !blocked_for_walk(to)) enter_cell(to, r);
            break;
        }
        case Action::MoveBack: {
            const Cell to{agent_.x - d[0], agent_.y - d[1]};
            if (!under_overhang && !blocked_for_walk(to)) enter_cell(to, r);
            break;
        }
        case Action::Crouch: {
            // The only action that passes under an overhang, in or out.
            const Cell to{agent_.x + d[0], agent_.y + d[1]};
            if (!blocked_for_crouch(to)) enter_cell(to, r);
            break;
        }
        case Action::Jump: {
            const Cell mid{agent_.x + d[0], agent_.y + d[1]};
            const Cell to{agent_.x + 2 * d[0], agent_.y + 2 * d[1]};
            // Clears a low barrier in the first cell; walls and overhangs
            // stop the jump, and the landing cell must be walkable.
            const bool mid_ok = in_bounds(mid) && !is_wall(mid) &&
                                !has_obstacle(mid, ObstacleType::Overhang);
            if (!under_overhang && mid_ok && !blocked_for_walk(to)) enter_cell(to, r);
            break;
        }
    }

    ++step_count_;
    cum_reward_ += r.reward;
    r.done = done();
    return r;
}

bool World::line_of_sight(Cell from, Cell to) const {
    const double dx = to.x - from.x;
    const double dy = to.y - from.y;
    const double dist = std::hypot(dx, dy);
    const int samples = std::max(1, static_cast<int>(std::ceil(dist * 4.0)));
    for (int i = 1; i < samples; ++i) {
        const double t = static_cast<double>(i) / samples;
        const Cell c{static_cast<int>(std::llround(from.x + dx * t)),
                     static_cast<int>(std::llround(from.y + dy * t))};
        if (c == from || c == to) continue;
        if (in_bounds(c) && is_wall(c)) return false;
    }
    return true;
}

Observation World::observe() const {
    Observation obs;
    obs.depth = cfg_.fov_depth;
    obs.width = 2 * cfg_.fov_halfwidth + 1;
    obs.channels = 4 + cfg_.n_food_kinds;
    obs.occupancy.assign(static_cast<std::size_t>(obs.depth) * obs.width * obs.channels, 0.0);

    const auto h = heading_vec(heading_);
    const auto rv = right_vec(heading_);

    for (int d = 1; d <= cfg_.fov_depth; ++d) {
        for (int l = -cfg_.fov_halfwidth; l <= cfg_.fov_halfwidth; ++l) {
            const Cell c{agent_.x + static_cast<int>(std::llround(d * h[0] + l * rv[0])),
                         agent_.y + static_cast<int>(std::llround(d * h[1] + l * rv[1]))};
            const std::size_t base =
                (static_cast<std::size_t>(d - 1) * obs.width + (l + cfg_.fov_halfwidth)) *
                obs.channels;
            if (!in_bounds(c)) {
                // The arena boundary reads as wall.
                obs.occupancy[base + 1] = 1.0;
                continue;
            }
            if (!line_of_sight(agent_, c)) continue; // occluded: all-zero
            auto ob = obstacle_cells_.find(cell_index(c));
            if (ob != obstacle_cells_.end()) {
                obs.occupancy[base + 1 + static_cast<int>(ob->second)] = 1.0;
                continue;
            }
            auto fd = food_.find(cell_index(c));
            if (fd != food_.end()) {
                obs.occupancy[base + 4 + fd->second] = 1.0;
            } else {
                obs.occupancy[base + 0] = 1.0;
            }
        }
    }

    // Objects: wedge test in the agent frame, euclidean range cut, then
    // wall occlusion; projection per plane.hpp.
    auto consider = [&](Cell c, int kind) {
        const double rx = c.x - agent_.x;
        const double ry = c.y - agent_.y;
        const double fwd = rx * h[0] + ry * h[1];
        if (fwd <= 1e-9 || fwd > cfg_.fov_depth + 1e-9) return;
        const double lat = rx * rv[0] + ry * rv[1];
        if (std::abs(lat) > cfg_.fov_halfwidth + 1e-9) return;
        const double dist = std::hypot(rx, ry);
        if (dist > cfg_.max_visible_distance) return;
        if (!line_of_sight(agent_, c)) return;
        ProjectedObject po;
        po.kind = kind;
        po.box = project_to_plane(fwd, lat, dist, cfg_.max_visible_distance);
        po.distance = dist;
        po.cell = c;
        obs.visible_objects.push_back(po);
    };

    for (const auto& [idx, kind] : food_)
        consider({idx % cfg_.grid_w, idx / cfg_.grid_w}, kind);
    for (const auto& [idx, type] : obstacle_cells_)
        consider({idx % cfg_.grid_w, idx / cfg_.grid_w},
                 cfg_.n_food_kinds + static_cast<int>(type));
    return obs;
}

} // namespace forager::env
