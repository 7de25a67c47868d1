#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "apa/bench.hpp"
#include "apa/errors.hpp"
#include "apa/simulation.hpp"

using namespace apa;

namespace {

Scenario load(const char* name) { return load_scenario(std::filesystem::path(APA_SCENARIO_DIR) / name); }

// Two corridors through the wall at x = 90..110: y 20..35 and y 65..80.
PriorPath corridor_path(double y) {
    return subdivide_path(PriorPath({{20.0, 50.0}, {85.0, y}, {115.0, y}, {180.0, 50.0}}), 5.0);
}

ReplanConfig replan_config() {
    ReplanConfig c;
    c.field.mode = FieldMode::prior;
    return c;
}

SimConfig small_sim(std::uint64_t seed) {
    SimConfig c;
    c.optimizer.ga.pop_size = 20;
    c.optimizer.ga.seed = seed;
    c.optimizer.rrt.seed = seed;
    c.optimizer.path_iterations = 3;
    c.optimizer.field.max_steps = 1500;
    c.initial_generations = 3;
    c.reoptimize_every = 25;
    c.time_cap = 60.0;
    return c;
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Replan, UsesStoredAlternateWithoutRrt) {
    Scenario s = load("two_corridor.json");
    World w = s.world;
    PathBank bank(s.start, s.goal);
    PriorPath upper = corridor_path(72.5);
    PriorPath lower = corridor_path(27.5);
    ASSERT_TRUE(bank.insert(upper, w, kDefaultInflation).ok());
    ASSERT_TRUE(bank.insert(lower, w, kDefaultInflation).ok());

    w.add_obstacle(Circle({100.0, 72.5}, 6.0));
    bank.invalidate(w, kDefaultInflation);
    ASSERT_EQ(bank.size(), 1u);

    ForceWeights fw = ForceWeights::defaults(w.obstacle_count(), FieldMode::prior);
    ReplanResult r = replan({s.start, 0.0, 0.0}, w, bank, fw, replan_config(), &upper);
    EXPECT_TRUE(r.succeeded);
    EXPECT_FALSE(r.used_rrt);
    EXPECT_EQ(r.attempts, 1);
    ASSERT_TRUE(r.path);
    EXPECT_EQ(*r.path, lower);
    EXPECT_TRUE(r.plan.reached());
}

TEST(Replan, FullBlockageRunsOneRrt) {
    Scenario s = load("two_corridor.json");
    World w = s.world;
    PathBank bank(s.start, s.goal);
    PriorPath upper = corridor_path(72.5);
    ASSERT_TRUE(bank.insert(upper, w, kDefaultInflation).ok());
    w.add_obstacle(Circle({100.0, 72.5}, 6.0));
    bank.invalidate(w, kDefaultInflation);
    ASSERT_TRUE(bank.snapshot()[0].trivial);

    ForceWeights fw = ForceWeights::defaults(w.obstacle_count(), FieldMode::prior);
    ReplanResult r = replan({s.start, 0.0, 0.0}, w, bank, fw, replan_config(), &upper);
    EXPECT_TRUE(r.used_rrt);
    EXPECT_TRUE(r.succeeded);
    EXPECT_EQ(r.attempts, 1);
    auto entries = bank.snapshot();
    ASSERT_EQ(entries.size(), 1u);
    EXPECT_FALSE(entries[0].trivial);
    EXPECT_EQ(entries[0].path, *r.path);
}

TEST(Replan, UnchangedWorldReproducesActivePlan) {
    Scenario s = load("two_corridor.json");
    PathBank bank(s.start, s.goal);
    PriorPath lower = corridor_path(27.5);
    ASSERT_TRUE(bank.insert(lower, s.world, kDefaultInflation).ok());
    ForceWeights fw = ForceWeights::defaults(s.world.obstacle_count(), FieldMode::prior);
    ReplanConfig cfg = replan_config();
    State start{s.start, 0.0, 0.0};
    Plan active = generate_plan(start, s.goal, s.world, &lower, fw, cfg.field);
    ASSERT_TRUE(active.reached());

    ReplanResult r = replan(start, s.world, bank, fw, cfg, &lower);
    EXPECT_FALSE(r.used_rrt);
    ASSERT_EQ(r.plan.states.size(), active.states.size());
    for (std::size_t i = 0; i < active.states.size(); ++i) {
        EXPECT_EQ(r.plan.states[i].position, active.states[i].position);
    }
}

TEST(Replan, RobotInCollisionFails) {
    Scenario s = load("two_corridor.json");
    PathBank bank(s.start, s.goal);
    ForceWeights fw = ForceWeights::defaults(s.world.obstacle_count(), FieldMode::prior);
    ReplanResult r = replan({{100.0, 50.0}}, s.world, bank, fw, replan_config());
    EXPECT_FALSE(r.succeeded);
}

TEST(Simulation, NoEventsReachesGoalWithoutReplans) {
    Scenario s = load("open.json");
    SimTrace t = run_simulation(s, small_sim(1));
    EXPECT_EQ(t.outcome, SimOutcome::reached);
    EXPECT_TRUE(t.replans.empty());
    ASSERT_GT(t.ticks.size(), 2u);
    for (std::size_t i = 1; i < t.ticks.size(); ++i) {
        EXPECT_NEAR(t.ticks[i].t - t.ticks[i - 1].t, 0.1, 1e-9);
        EXPECT_LE(distance(t.ticks[i].state.position, t.ticks[i - 1].state.position), 1.0 + 1e-12);
    }
    EXPECT_LE(distance(t.ticks.back().state.position, s.goal), 2.0);
}

TEST(Simulation, DroppedObstacleTriggersOneReplan) {
    Scenario s = load("two_corridor.json");
    s.events.clear();
    SimConfig cfg = small_sim(2);
    // The sim drives the optimizer's first best plan until the first GA round.
    Optimizer opt(s.world, s.start, s.goal, cfg.optimizer);
    opt.run(cfg.initial_generations);
    const Plan& active = opt.best().plan;
    ASSERT_GT(active.states.size(), 40u);
    Point2 ahead = active.states[30].position;
    s.events.push_back({1.0, AddObstacle{Circle(ahead, 3.0)}});
    s.validate();

    SimTrace t = run_simulation(s, cfg);
    EXPECT_EQ(t.outcome, SimOutcome::reached);
    ASSERT_EQ(t.replans.size(), 1u);
    EXPECT_EQ(t.replans[0].trigger, "event");
    EXPECT_TRUE(t.replans[0].succeeded);
    EXPECT_GE(t.replans[0].latency, 0.0);
    bool matched = false;
    for (const auto& k : t.ticks) {
        if (std::abs(k.t - t.replans[0].t) < 1e-9) {
            EXPECT_TRUE(k.event);
            EXPECT_TRUE(k.invalidated);
            EXPECT_TRUE(k.replanned);
            matched = true;
        }
        EXPECT_GT(clearance(k.state.position, World(200.0, 100.0, {Circle(ahead, 3.0)})), kDefaultInflation);
    }
    EXPECT_TRUE(matched);
}

TEST(Simulation, DeterministicTrace) {
    Scenario s = load("two_corridor.json");
    SimTrace a = run_simulation(s, small_sim(4));
    SimTrace b = run_simulation(s, small_sim(4));
    EXPECT_EQ(trace_ticks_csv(a), trace_ticks_csv(b));
    EXPECT_EQ(trace_replans_csv(a, false), trace_replans_csv(b, false));
    EXPECT_EQ(a.outcome, b.outcome);
}

TEST(Simulation, TimeCapEndsRun) {
    Scenario s = load("open.json");
    SimConfig cfg = small_sim(1);
    cfg.time_cap = 0.5;
    SimTrace t = run_simulation(s, cfg);
    EXPECT_EQ(t.outcome, SimOutcome::time_cap);
    EXPECT_LE(t.ticks.back().t, 0.5 + 1e-9);
    cfg.time_cap = 0.0;
    EXPECT_THROW(run_simulation(s, cfg), ConfigError);
}

TEST(Simulation, CsvHeaders) {
    SimTrace t;
    t.ticks.push_back({0.0, {{1.0, 2.0}}, 0});
    t.replans.push_back({0.5, "event", 0.001, true, false});
    EXPECT_EQ(trace_ticks_csv(t).substr(0, 51), "t,x,y,heading,plan_id,event,invalidated,replanned\n0");
    EXPECT_EQ(trace_replans_csv(t), "t,trigger,latency_s,succeeded,used_rrt\n0.5,event,0.001,1,0\n");
    EXPECT_EQ(trace_replans_csv(t, false), "t,trigger,succeeded,used_rrt\n0.5,event,1,0\n");
}

TEST(Bench, ReplanTrialCount) {
    Scenario s = load("cluttered.json");
    ReplanBenchConfig cfg;
    cfg.optimizer.ga.pop_size = 20;
    cfg.generations = 2;
    cfg.trials = 4;
    cfg.repeats = 1;
    ReplanBench b = bench_replan(s, cfg);
    ASSERT_EQ(b.trials.size(), 4u);
    EXPECT_EQ(count_lines(replan_bench_csv(b)), 5);
    EXPECT_EQ(count_lines(replan_bench_csv(b, false)), 5);
    EXPECT_LE(b.apa.min, b.apa.mean);
    EXPECT_LE(b.apa.mean, b.apa.max);
    EXPECT_EQ(replan_bench_csv(b, false).substr(0, 19), "trial,obstacle_x,ob");
}

TEST(Bench, NodeRows) {
    Scenario s = load("cluttered.json");
    NodeBenchConfig cfg;
    cfg.runs = 3;
    cfg.iters = 4;
    auto rows = bench_nodes(s, cfg);
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].iteration, static_cast<int>(i) + 1);
        EXPECT_LE(double(rows[i].min), rows[i].mean);
        EXPECT_LE(rows[i].mean, double(rows[i].max));
    }
    std::string csv = node_bench_csv(rows);
    EXPECT_EQ(count_lines(csv), 5);
    EXPECT_EQ(csv.substr(0, 36), "iteration,mean_nodes,min_nodes,max_n");
}

TEST(Bench, Summarize) {
    LatencyStats s = summarize({3.0, 1.0, 2.0});
    EXPECT_DOUBLE_EQ(s.mean, 2.0);
    EXPECT_EQ(s.min, 1.0);
    EXPECT_EQ(s.max, 3.0);
}
