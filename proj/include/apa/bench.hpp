#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "apa/scenario.hpp"
#include "apa/simulation.hpp"

namespace apa {

struct LatencyStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

LatencyStats summarize(const std::vector<double>& values);

struct ReplanTrial {
    int trial;
    Point2 obstacle_center;
    double apa_latency;       ///< replan from the path bank, seconds
    double rrt_latency;       ///< same replan with an empty bank (fresh RRT), seconds
    double bare_rrt_latency;  ///< rrt_plan + simplify_path alone, seconds
    bool apa_succeeded;
    bool apa_used_rrt;
    int apa_attempts;
    std::size_t valid_paths;  ///< bank entries left after invalidation
    bool rrt_succeeded;
};

struct ReplanBenchConfig {
    OptimizerConfig optimizer;
    int generations = 5;
    int trials = 20;
    double obstacle_radius = 3.0;
    /// The robot sits this far along the plan (fraction of its states).
    double robot_fraction_lo = 0.1;
    double robot_fraction_hi = 0.4;
    /// The new obstacle lands this many plan steps ahead of the robot.
    int lookahead_steps = 40;
    /// Each latency is the fastest of this many identical runs.
    int repeats = 3;
    std::uint64_t seed = 1;
};

struct ReplanBench {
    std::vector<ReplanTrial> trials;
    LatencyStats apa;
    LatencyStats rrt;
    LatencyStats bare_rrt;

    double ratio() const { return rrt.mean > 0.0 ? apa.mean / rrt.mean : 0.0; }
};

/// Drops a fresh obstacle on the optimized plan ahead of the robot and times
/// (a) a replan from the path bank against (b) the same replan starting from
/// an empty bank, which has to run a fresh RRT. The bare RRT time is
/// reported as well.
ReplanBench bench_replan(const Scenario& scenario, const ReplanBenchConfig& cfg);

/// trial,obstacle_x,obstacle_y,apa_latency_s,rrt_latency_s,bare_rrt_latency_s,apa_succeeded,apa_used_rrt,apa_attempts,valid_paths,rrt_succeeded
std::string replan_bench_csv(const ReplanBench& bench, bool with_latency = true);

struct NodeCountRow {
    int iteration;  ///< 1-based
    double mean;
    std::size_t min;
    std::size_t max;
};

struct NodeBenchConfig {
    RRTConfig rrt;
    int runs = 50;
    int iters = 10;
    std::uint64_t seed = 1;
};

/// Runs `iterate_paths` `runs` times with seeds seed, seed+1, ... and
/// reports node counts per iteration.
std::vector<NodeCountRow> bench_nodes(const Scenario& scenario, const NodeBenchConfig& cfg);

/// iteration,mean_nodes,min_nodes,max_nodes
std::string node_bench_csv(const std::vector<NodeCountRow>& rows);

/// generation,best_cost,mean_cost,feasible_count
std::string history_csv(const std::vector<GenerationStats>& history);

}  // namespace apa
