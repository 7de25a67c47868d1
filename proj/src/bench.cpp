#include "apa/bench.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <sstream>

#include "apa/errors.hpp"

namespace apa {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Fastest of `repeats` runs of `fn`; the last result is kept in `keep`.
template <class Fn, class T>
double timed(int repeats, Fn&& fn, T& keep) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < repeats; ++i) {
        auto t0 = Clock::now();
        keep = fn();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

}  // namespace

LatencyStats summarize(const std::vector<double>& values) {
    if (values.empty()) {
        return {};
    }
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return {std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size()), *lo, *hi};
}

ReplanBench bench_replan(const Scenario& scenario, const ReplanBenchConfig& cfg) {
    if (cfg.trials < 1) {
        throw ConfigError("bench_replan: trials must be at least 1");
    }
    if (!(cfg.obstacle_radius > 0.0) || cfg.lookahead_steps < 1 || cfg.repeats < 1 || !(cfg.robot_fraction_lo >= 0.0) ||
        !(cfg.robot_fraction_hi >= cfg.robot_fraction_lo) || !(cfg.robot_fraction_hi < 1.0)) {
        throw ConfigError("bench_replan: bad obstacle placement parameters");
    }
    Optimizer opt(scenario.world, scenario.start, scenario.goal, cfg.optimizer);
    opt.run(cfg.generations);
    const Individual& best = opt.best();
    if (!best.plan.reached()) {
        throw PlanningError("bench_replan: the optimized plan does not reach the goal");
    }
    const FieldConfig& field = opt.config().field;
    const auto& states = best.plan.states;
    const auto n = static_cast<double>(states.size());
    ForceWeights weights = best.chromosome.weights();
    double mean_beta = weights.betas.empty()
                           ? kPriorDefaultBeta
                           : std::accumulate(weights.betas.begin(), weights.betas.end(), 0.0) /
                                 static_cast<double>(weights.betas.size());
    weights.betas.push_back(mean_beta);

    Rng rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(cfg.robot_fraction_lo * n),
                                                    static_cast<std::size_t>(cfg.robot_fraction_hi * n));
    ReplanBench out;
    std::vector<double> apa_lat;
    std::vector<double> rrt_lat;
    std::vector<double> bare_lat;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        std::optional<World> world;
        std::size_t j = 0;
        Point2 center;
        for (int tries = 0; tries < 1000 && !world; ++tries) {
            j = pick(rng);
            std::size_t target = std::min(j + static_cast<std::size_t>(cfg.lookahead_steps), states.size() - 2);
            center = states[target].position;
            World w = scenario.world;
            w.add_obstacle(Circle(center, cfg.obstacle_radius));
            double margin = field.inflation + 1.0;
            if (clearance(states[j].position, w) > margin && clearance(scenario.goal, w) > margin) {
                world = std::move(w);
            }
        }
        if (!world) {
            throw PlanningError("bench_replan: no room to place an obstacle on the plan");
        }
        const State& robot = states[j];
        std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(trial);

        PathBank stored = opt.bank();
        stored.invalidate(*world, field.inflation);
        std::size_t valid = stored.size();
        ReplanConfig rcfg{field, cfg.optimizer.rrt, 10};
        rcfg.rrt.seed = seed;
        ReplanResult r;
        double apa = timed(cfg.repeats, [&] {
            PathBank bank = stored;
            return replan(robot, *world, bank, weights, rcfg, &best.prior_path.path);
        }, r);

        // Same replan with nothing stored: goes straight to a fresh RRT.
        ReplanResult f;
        double scratch = timed(cfg.repeats, [&] {
            PathBank empty(scenario.start, scenario.goal, stored.capacity(), field.goal_radius);
            return replan(robot, *world, empty, weights, rcfg, nullptr);
        }, f);

        RRTConfig rrt = rcfg.rrt;
        double room = std::min(clearance(robot.position, *world), clearance(scenario.goal, *world));
        rrt.inflation = std::max(field.inflation, std::min(rrt.inflation, 0.99 * room));
        RRTResult bare;
        double bare_time = timed(cfg.repeats, [&] {
            Rng rrt_rng(seed);
            RRTResult res = rrt_plan(robot.position, scenario.goal, *world, SamplingRegion(world->bounds()), rrt,
                                     rrt_rng);
            if (res.path) {
                simplify_path(*res.path, *world, rrt.inflation);
            }
            return res;
        }, bare);

        out.trials.push_back({trial, center, apa, scratch, bare_time, r.succeeded, r.used_rrt, r.attempts, valid,
                              f.succeeded});
        apa_lat.push_back(apa);
        rrt_lat.push_back(scratch);
        bare_lat.push_back(bare_time);
    }
    out.apa = summarize(apa_lat);
    out.rrt = summarize(rrt_lat);
    out.bare_rrt = summarize(bare_lat);
    return out;
}

std::string replan_bench_csv(const ReplanBench& bench, bool with_latency) {
    std::ostringstream os;
    os.precision(17);
    os << "trial,obstacle_x,obstacle_y,";
    if (with_latency) {
        os << "apa_latency_s,rrt_latency_s,bare_rrt_latency_s,";
    }
    os << "apa_succeeded,apa_used_rrt,apa_attempts,valid_paths,rrt_succeeded\n";
    for (const auto& t : bench.trials) {
        os << t.trial << ',' << t.obstacle_center.x << ',' << t.obstacle_center.y << ',';
        if (with_latency) {
            os << t.apa_latency << ',' << t.rrt_latency << ',' << t.bare_rrt_latency << ',';
        }
        os << int(t.apa_succeeded) << ',' << int(t.apa_used_rrt) << ',' << t.apa_attempts << ','
           << t.valid_paths << ',' << int(t.rrt_succeeded) << '\n';
    }
    return os.str();
}

std::vector<NodeCountRow> bench_nodes(const Scenario& scenario, const NodeBenchConfig& cfg) {
    if (cfg.runs < 1 || cfg.iters < 1) {
        throw ConfigError("bench_nodes: runs and iters must be at least 1");
    }
    const auto iters = static_cast<std::size_t>(cfg.iters);
    std::vector<std::vector<std::size_t>> counts(iters);
    for (int r = 0; r < cfg.runs; ++r) {
        RRTConfig rrt = cfg.rrt;
        rrt.seed = cfg.seed + static_cast<std::uint64_t>(r);
        auto its = iterate_paths(scenario.start, scenario.goal, scenario.world, cfg.iters, rrt);
        for (std::size_t k = 0; k < iters; ++k) {
            counts[k].push_back(its[k].node_count);
        }
    }
    std::vector<NodeCountRow> rows;
    for (std::size_t k = 0; k < iters; ++k) {
        const auto& c = counts[k];
        auto [lo, hi] = std::minmax_element(c.begin(), c.end());
        double mean = static_cast<double>(std::accumulate(c.begin(), c.end(), std::size_t{0})) /
                      static_cast<double>(c.size());
        rows.push_back({static_cast<int>(k + 1), mean, *lo, *hi});
    }
    return rows;
}

std::string node_bench_csv(const std::vector<NodeCountRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "iteration,mean_nodes,min_nodes,max_nodes\n";
    for (const auto& r : rows) {
        os << r.iteration << ',' << r.mean << ',' << r.min << ',' << r.max << '\n';
    }
    return os.str();
}

std::string history_csv(const std::vector<GenerationStats>& history) {
    std::ostringstream os;
    os.precision(17);
    os << "generation,best_cost,mean_cost,feasible_count\n";
    for (const auto& h : history) {
        os << h.generation << ',' << h.best_cost << ',' << h.mean_cost << ',' << h.feasible_count << '\n';
    }
    return os.str();
}

}  // namespace apa
