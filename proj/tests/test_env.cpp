#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "forager/env/world.hpp"

using namespace forager;
using env::Action;
using env::Cell;
using env::ObstacleType;
using env::World;
using env::WorldConfig;

namespace {

WorldConfig tiny_config() {
    WorldConfig cfg;
    cfg.grid_w = 15;
    cfg.grid_h = 15;
    cfg.n_food_items = 0;
    cfg.n_obstacles = 0;
    cfg.episode_len = 200;
    cfg.fov_depth = 6;
    cfg.fov_halfwidth = 3;
    cfg.max_visible_distance = 8.0;
    return cfg;
}

// Empty board with the agent placed by hand.
World scenario(Cell agent, int heading) {
    World world(tiny_config());
    world.reset(1);
    world.clear_items();
    world.set_agent(agent, heading);
    return world;
}

} // namespace

TEST_CASE("food kinds: zero-sum lattice in [-2,2], quartile health classes") {
    const auto kinds = env::make_food_kinds(20);
    REQUIRE(kinds.size() == 20);
    double sum = 0.0;
    for (const auto& k : kinds) {
        sum += k.reward;
        CHECK(k.reward >= -2.0);
        CHECK(k.reward <= 2.0);
        CHECK(k.reward != 0.0);
    }
    CHECK(sum == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(kinds[0].reward == doctest::Approx(-2.0));
    CHECK(kinds[19].reward == doctest::Approx(2.0));
    int healthy = 0, unhealthy = 0;
    for (const auto& k : kinds) {
        healthy += k.health == env::HealthClass::Healthy;
        unhealthy += k.health == env::HealthClass::Unhealthy;
    }
    CHECK(healthy == 5);
    CHECK(unhealthy == 5);
    CHECK(kinds[19].health == env::HealthClass::Healthy);
    CHECK(kinds[0].health == env::HealthClass::Unhealthy);
}

TEST_CASE("reset: default config places exactly 200 food cells and 4 obstacles") {
    WorldConfig cfg;
    cfg.rng_seed = 7;
    World world(cfg);
    CHECK(world.food_map().size() == 200);
    CHECK(world.obstacles().size() == 4);
    CHECK(world.step_count() == 0);
    CHECK(world.food_map().count(world.cell_index(world.agent_pos())) == 0);
    CHECK_FALSE(world.is_wall(world.agent_pos()));
}

TEST_CASE("reset: same seed twice gives identical layouts") {
    WorldConfig cfg;
    World a(cfg), b(cfg);
    a.reset(123);
    b.reset(123);
    CHECK(a.food_map() == b.food_map());
    CHECK(a.agent_pos() == b.agent_pos());
    CHECK(a.heading() == b.heading());
    a.reset(124);
    CHECK(a.food_map() != b.food_map());
}

TEST_CASE("reset: zero food items gives an empty food map") {
    WorldConfig cfg;
    cfg.n_food_items = 0;
    World world(cfg);
    world.reset(3);
    CHECK(world.food_map().empty());
}

TEST_CASE("reset: failure when the grid cannot hold the requested counts") {
    WorldConfig cfg;
    cfg.grid_w = 5;
    cfg.grid_h = 4;
    cfg.n_food_items = 20;
    cfg.n_food_kinds = 20;
    cfg.n_obstacles = 4;
    CHECK_THROWS(World{cfg});
}

TEST_CASE("config invariants rejected") {
    WorldConfig bad_items;
    bad_items.n_food_items = 7; // not divisible by 20 kinds
    CHECK_THROWS(bad_items.validate());
    WorldConfig bad_len;
    bad_len.episode_len = 0;
    CHECK_THROWS(bad_len.validate());
    WorldConfig bad_fov;
    bad_fov.fov_depth = 0;
    CHECK_THROWS(bad_fov.validate());
}

TEST_CASE("turns rotate the heading in 45-degree steps") {
    World world = scenario({7, 7}, 0);
    world.step(Action::TurnRight);
    CHECK(world.heading() == 1);
    world.step(Action::TurnLeft);
    world.step(Action::TurnLeft);
    CHECK(world.heading() == 7);
}

TEST_CASE("move straight: one cell along the heading; arena boundary blocks") {
    World world = scenario({7, 7}, 2); // facing east
    CHECK(world.step(Action::MoveStraight).reward == 0.0);
    CHECK(world.agent_pos() == Cell{8, 7});

    World edge = scenario({14, 7}, 2); // east edge, facing out
    edge.step(Action::MoveStraight);
    CHECK(edge.agent_pos() == Cell{14, 7});

    World diag = scenario({7, 7}, 1); // northeast
    diag.step(Action::MoveStraight);
    CHECK(diag.agent_pos() == Cell{8, 6});
    diag.step(Action::MoveBack);
    CHECK(diag.agent_pos() == Cell{7, 7});
}

TEST_CASE("food of reward +2 directly ahead: picked up and removed") {
    World world = scenario({5, 7}, 2);
    world.add_food({6, 7}, 19); // top kind, reward +2
    const auto r = world.step(Action::MoveStraight);
    CHECK(r.reward == doctest::Approx(2.0));
    CHECK(r.picked_food);
    CHECK(r.picked_kind == 19);
    CHECK(world.food_map().empty());
    CHECK(world.agent_pos() == Cell{6, 7});
    CHECK(world.cum_reward() == doctest::Approx(2.0));
}

TEST_CASE("wall directly ahead: move is a no-op with reward 0") {
    World world = scenario({5, 7}, 2);
    world.add_obstacle(ObstacleType::Wall, {{6, 7}});
    const auto r = world.step(Action::MoveStraight);
    CHECK(r.reward == 0.0);
    CHECK(world.agent_pos() == Cell{5, 7});
}

TEST_CASE("jump clears a low barrier but not walls or overhangs") {
    World world = scenario({5, 7}, 2);
    world.add_obstacle(ObstacleType::LowBarrier, {{6, 7}});
    world.step(Action::Jump);
    CHECK(world.agent_pos() == Cell{7, 7});

    World walled = scenario({5, 7}, 2);
    walled.add_obstacle(ObstacleType::Wall, {{6, 7}});
    walled.step(Action::Jump);
    CHECK(walled.agent_pos() == Cell{5, 7});

    // Landing on a barrier is blocked too.
    World land = scenario({5, 7}, 2);
    land.add_obstacle(ObstacleType::LowBarrier, {{7, 7}});
    land.step(Action::Jump);
    CHECK(land.agent_pos() == Cell{5, 7});

    // Jump over food does not pick it up; landing on food does.
    World overfood = scenario({5, 7}, 2);
    overfood.add_food({6, 7}, 10);
    overfood.add_food({7, 7}, 19);
    const auto r = overfood.step(Action::Jump);
    CHECK(r.reward == doctest::Approx(2.0));
    CHECK(overfood.food_map().size() == 1);
}

TEST_CASE("crouch is the only way through an overhang") {
    World world = scenario({5, 7}, 2);
    world.add_obstacle(ObstacleType::Overhang, {{6, 7}});
    world.step(Action::MoveStraight);
    CHECK(world.agent_pos() == Cell{5, 7});
    world.step(Action::Jump);
    CHECK(world.agent_pos() == Cell{5, 7});
    world.step(Action::Crouch);
    CHECK(world.agent_pos() == Cell{6, 7});
    // Under the overhang only crouching (or turning) moves.
    world.step(Action::MoveStraight);
    CHECK(world.agent_pos() == Cell{6, 7});
    world.step(Action::Crouch);
    CHECK(world.agent_pos() == Cell{7, 7});
}

TEST_CASE("low barrier blocks walking and crouching") {
    World world = scenario({5, 7}, 2);
    world.add_obstacle(ObstacleType::LowBarrier, {{6, 7}});
    world.step(Action::MoveStraight);
    CHECK(world.agent_pos() == Cell{5, 7});
    world.step(Action::Crouch);
    CHECK(world.agent_pos() == Cell{5, 7});
}

TEST_CASE("horizon: the step at episode_len reports done and further steps throw") {
    WorldConfig cfg = tiny_config();
    cfg.episode_len = 3;
    World world(cfg);
    world.reset(5);
    CHECK_FALSE(world.step(Action::TurnLeft).done);
    CHECK_FALSE(world.step(Action::TurnLeft).done);
    CHECK(world.step(Action::TurnLeft).done);
    CHECK(world.done());
    CHECK_THROWS_AS(world.step(Action::TurnLeft), std::logic_error);
}

TEST_CASE("random-agent episodes conserve reward as the sum of removed kinds") {
    WorldConfig cfg;
    cfg.grid_w = 20;
    cfg.grid_h = 20;
    cfg.n_food_items = 60;
    cfg.episode_len = 70;
    World world(cfg);
    Rng rng(99);
    for (int ep = 0; ep < 5; ++ep) {
        world.reset(1000 + ep);
        const auto before = world.food_map();
        double total = 0.0;
        while (!world.done())
            total += world.step(static_cast<Action>(rng.uniform_int(env::kNumActions))).reward;
        double removed_sum = 0.0;
        for (const auto& [idx, kind] : before)
            if (!world.food_map().count(idx)) removed_sum += world.kinds()[kind].reward;
        CHECK(total == doctest::Approx(removed_sum).epsilon(1e-12));
        CHECK(world.cum_reward() == doctest::Approx(total));
    }
}

TEST_CASE("trajectories are deterministic given config, seed, and actions") {
    WorldConfig cfg;
    cfg.n_food_items = 100;
    World a(cfg), b(cfg);
    a.reset(77);
    b.reset(77);
    Rng actions(5);
    for (int i = 0; i < 70; ++i) {
        const auto act = static_cast<Action>(actions.uniform_int(6));
        const auto sa = a.step(act);
        const auto sb = b.step(act);
        CHECK(sa.reward == sb.reward);
        CHECK(a.agent_pos() == b.agent_pos());
    }
    CHECK(a.observe().occupancy == b.observe().occupancy);
}

TEST_CASE("observation: empty field of view is background only, no objects") {
    World world = scenario({7, 7}, 0);
    const auto obs = world.observe();
    CHECK(obs.visible_objects.empty());
    bool saw_empty = false;
    for (int d = 0; d < obs.depth; ++d)
        for (int l = 0; l < obs.width; ++l) {
            double sum = 0.0;
            for (int c = 0; c < obs.channels; ++c) sum += obs.at(d, l, c);
            CHECK(sum <= 1.0 + 1e-12);
            if (obs.at(d, l, 0) == 1.0) saw_empty = true;
        }
    CHECK(saw_empty);
}

TEST_CASE("observation: an object directly behind the agent is absent") {
    World world = scenario({7, 7}, 0); // facing north
    world.add_food({7, 9}, 19);        // two cells south, behind
    const auto obs = world.observe();
    CHECK(obs.visible_objects.empty());
    // Turning around brings it into view.
    world.step(Action::TurnRight);
    world.step(Action::TurnRight);
    world.step(Action::TurnRight);
    world.step(Action::TurnRight); // now facing south
    const auto obs2 = world.observe();
    REQUIRE(obs2.visible_objects.size() == 1);
    CHECK(obs2.visible_objects[0].kind == 19);
    CHECK(obs2.visible_objects[0].box.cx == doctest::Approx(0.5));
}

TEST_CASE("observation: two identical objects at d and 2d, second box half the height") {
    World world = scenario({2, 7}, 2);
    world.add_food({5, 7}, 10); // 3 cells ahead
    world.add_food({8, 7}, 10); // 6 cells ahead
    const auto obs = world.observe();
    REQUIRE(obs.visible_objects.size() == 2);
    const auto& near = obs.visible_objects[0].distance < obs.visible_objects[1].distance
                           ? obs.visible_objects[0]
                           : obs.visible_objects[1];
    const auto& far = obs.visible_objects[0].distance < obs.visible_objects[1].distance
                          ? obs.visible_objects[1]
                          : obs.visible_objects[0];
    CHECK(near.distance == doctest::Approx(3.0));
    CHECK(far.distance == doctest::Approx(6.0));
    CHECK(far.box.h == doctest::Approx(near.box.h / 2.0));
    CHECK(far.box.cy < near.box.cy);
}

TEST_CASE("observation: a wall occludes the food behind it") {
    World world = scenario({2, 7}, 2);
    world.add_obstacle(ObstacleType::Wall, {{5, 7}});
    world.add_food({7, 7}, 19); // straight behind the wall
    const auto obs = world.observe();
    // Only the wall is visible.
    REQUIRE(obs.visible_objects.size() == 1);
    CHECK(obs.visible_objects[0].kind == world.config().n_food_kinds + 0);
    // The occupancy slot behind the wall is all-zero.
    bool found_zero_behind = false;
    for (int d = 0; d < obs.depth; ++d) {
        double sum = 0.0;
        for (int c = 0; c < obs.channels; ++c) sum += obs.at(d, obs.width / 2, c);
        if (d >= 4 && sum == 0.0) found_zero_behind = true;
    }
    CHECK(found_zero_behind);
}

TEST_CASE("observation invariants on random worlds: one-hot cells, boxes inside the plane") {
    WorldConfig cfg;
    cfg.grid_w = 25;
    cfg.grid_h = 25;
    cfg.n_food_items = 80;
    cfg.n_obstacles = 6;
    cfg.episode_len = 40;
    World world(cfg);
    Rng rng(31);
    for (int ep = 0; ep < 3; ++ep) {
        world.reset(500 + ep);
        while (!world.done()) {
            const auto obs = world.observe();
            for (int d = 0; d < obs.depth; ++d)
                for (int l = 0; l < obs.width; ++l) {
                    double sum = 0.0;
                    for (int c = 0; c < obs.channels; ++c) {
                        const double v = obs.at(d, l, c);
                        CHECK((v == 0.0 || v == 1.0));
                        sum += v;
                    }
                    CHECK(sum <= 1.0);
                }
            for (const auto& po : obs.visible_objects) {
                CHECK(po.box.cx - po.box.w / 2 >= -1e-12);
                CHECK(po.box.cx + po.box.w / 2 <= 1.0 + 1e-12);
                CHECK(po.box.cy - po.box.h / 2 >= -1e-12);
                CHECK(po.box.cy + po.box.h / 2 <= 1.0 + 1e-12);
                CHECK(po.distance <= cfg.max_visible_distance + 1e-9);
                CHECK(world.line_of_sight(world.agent_pos(), po.cell));
            }
            world.step(static_cast<Action>(rng.uniform_int(6)));
        }
    }
}

TEST_CASE("random agent mean episode reward is near zero (300-episode smoke)") {
    WorldConfig cfg; // paper-scale defaults
    World world(cfg);
    Rng rng(808);
    double total = 0.0;
    const int episodes = 300;
    for (int e = 0; e < episodes; ++e) {
        world.reset(mix_seed(4000, e));
        while (!world.done()) world.step(static_cast<Action>(rng.uniform_int(6)));
        total += world.cum_reward();
    }
    CHECK(std::abs(total / episodes) <= 0.5); // acceptance runs 1000 episodes at 0.3
}
