#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "forager/env/plane.hpp"
#include "forager/rng.hpp"

namespace forager::env {

enum class Action : int {
    TurnLeft = 0,
    TurnRight = 1,
    Crouch = 2,
    Jump = 3,
    MoveStraight = 4,
    MoveBack = 5,
};
constexpr int kNumActions = 6;

const char* action_name(Action a);
Action action_from_name(const std::string& name); // throws on unknown name

enum class ObstacleType : int { Wall = 0, LowBarrier = 1, Overhang = 2 };

enum class HealthClass { Healthy, Unhealthy, Neutral };

struct FoodKind {
    int id = 0;
    double reward = 0.0;
    HealthClass health = HealthClass::Neutral;
};

// Rewards are an even lattice over [-2, +2] with 0 excluded; they sum to 0.
// The top quarter of kinds is healthy, the bottom quarter unhealthy.
std::vector<FoodKind> make_food_kinds(int n_kinds);

struct WorldConfig {
    int grid_w = 40;
    int grid_h = 40;
    int n_food_items = 200;
    int n_food_kinds = 20;
    int n_obstacles = 4;
    int episode_len = 70;
    int fov_depth = 12;
    int fov_halfwidth = 6;
    double max_visible_distance = 12.0;
    std::uint64_t rng_seed = 0;

    void validate() const; // throws std::invalid_argument
};

// Object class ids on the image plane: food kinds first, then obstacles.
inline int obstacle_class(const WorldConfig& cfg, ObstacleType t) {
    return cfg.n_food_kinds + static_cast<int>(t);
}
inline bool is_food_class(const WorldConfig& cfg, int kind) {
    return kind >= 0 && kind < cfg.n_food_kinds;
}

struct Cell {
    int x = 0;
    int y = 0;
    bool operator==(const Cell&) const = default;
    bool operator<(const Cell& o) const { return y != o.y ? y < o.y : x < o.x; }
};

struct ObstacleEntity {
    ObstacleType type;
    std::vector<Cell> cells;
};

struct ProjectedObject {
    int kind = 0;      // food kind id or obstacle class id
    PlaneBox box;
    double distance = 0.0; // cells, euclidean
    Cell cell;
};

// One-hot occupancy over the forward field of view plus the projected
// objects. Channel order: empty, wall, low barrier, overhang, then one
// channel per food kind.
struct Observation {
    int depth = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> occupancy; // depth * width * channels, row-major
    std::vector<ProjectedObject> visible_objects;

    std::size_t size() const { return occupancy.size(); }
    double at(int d, int l, int c) const {
        return occupancy[(static_cast<std::size_t>(d) * width + l) * channels + c];
    }
};

struct StepResult {
    double reward = 0.0;
    bool done = false;
    bool picked_food = false;
    int picked_kind = -1;
};

class World {
public:
    explicit World(const WorldConfig& cfg);

    void reset(std::uint64_t seed);
    StepResult step(Action action);
    Observation observe() const;

    // Controlled placement for scenario setups; the usual invariants are
    // enforced (in-bounds, agent never inside a wall, one item per cell).
    void set_agent(Cell c, int heading);
    void add_food(Cell c, int kind);
    void add_obstacle(ObstacleType type, const std::vector<Cell>& cells);
    void clear_items();

    const WorldConfig& config() const { return cfg_; }
    const std::vector<FoodKind>& kinds() const { return kinds_; }
    const std::map<int, int>& food_map() const { return food_; } // cell index -> kind
    const std::vector<ObstacleEntity>& obstacles() const { return obstacle_entities_; }
    Cell agent_pos() const { return agent_; }
    int heading() const { return heading_; } // 0..7, 45-degree steps, 0 = north
    int step_count() const { return step_count_; }
    double cum_reward() const { return cum_reward_; }
    bool done() const { return step_count_ >= cfg_.episode_len; }

    int cell_index(Cell c) const { return c.y * cfg_.grid_w + c.x; }
    bool in_bounds(Cell c) const {
        return c.x >= 0 && c.x < cfg_.grid_w && c.y >= 0 && c.y < cfg_.grid_h;
    }
    bool is_wall(Cell c) const;
    bool has_obstacle(Cell c, ObstacleType t) const;

    // True when no wall cell lies strictly between the two cell centers.
    bool line_of_sight(Cell from, Cell to) const;

private:
    void place_all(Rng& rng);
    bool blocked_for_walk(Cell c) const;   // wall / barrier / overhang / OOB
    bool blocked_for_crouch(Cell c) const; // wall / barrier / OOB
    void enter_cell(Cell c, StepResult& r);

    WorldConfig cfg_;
    std::vector<FoodKind> kinds_;
    std::map<int, int> food_;                       // cell index -> kind id
    std::map<int, ObstacleType> obstacle_cells_;    // cell index -> type
    std::vector<ObstacleEntity> obstacle_entities_;
    Cell agent_{};
    int heading_ = 0;
    int step_count_ = 0;
    double cum_reward_ = 0.0;
};

// Heading unit vectors (x right, y down). Cardinal entries are exact.
std::array<double, 2> heading_vec(int heading);
std::array<double, 2> right_vec(int heading);
std::array<int, 2> heading_step(int heading); // integer cell step

} // namespace forager::env
