#pragma once

#include <optional>
#include <string>
#include <vector>

#include "apa/evolution.hpp"
#include "apa/path_bank.hpp"
#include "apa/potential_field.hpp"
#include "apa/scenario.hpp"

namespace apa {

struct ReplanConfig {
    FieldConfig field;   ///< mode is forced to prior
    RRTConfig rrt;       ///< used by the fallback search
    int max_bank_attempts = 10;
};

struct ReplanResult {
    Plan plan;
    std::optional<PriorPath> path;  ///< prior path behind `plan`
    bool succeeded = false;
    bool used_rrt = false;
    int attempts = 0;
};

/// Regenerates a plan from `state`. Tries `preferred` first when it is still
/// collision-free, then the valid bank paths shortest first. When none of
/// them reaches the goal, runs one RRT from the robot over the whole world,
/// stores it in the bank and tries again. The bank is expected to be
/// invalidated against `world` already.
ReplanResult replan(const State& state, const World& world, PathBank& bank, const ForceWeights& weights,
                    const ReplanConfig& cfg, const PriorPath* preferred = nullptr);

struct SimConfig {
    OptimizerConfig optimizer;
    int initial_generations = 5;
    double time_cap = 120.0;
    /// Ticks between GA rounds; 0 disables reoptimization while driving.
    int reoptimize_every = 25;
    int generations_per_round = 1;
    int max_bank_attempts = 10;
};

enum class SimOutcome { reached, time_cap, unresolved };

std::string_view to_string(SimOutcome o);

struct SimTick {
    double t;
    State state;
    int plan_id;
    bool event = false;       ///< a world event was applied at this tick
    bool invalidated = false; ///< the active plan collided with the new world
    bool replanned = false;
};

struct ReplanRecord {
    double t;
    std::string trigger;  ///< "event" or "plan_end"
    double latency;       ///< wall-clock seconds
    bool succeeded;
    bool used_rrt;
};

struct SimTrace {
    std::vector<SimTick> ticks;
    std::vector<ReplanRecord> replans;
    SimOutcome outcome = SimOutcome::time_cap;
};

SimTrace run_simulation(const Scenario& scenario, const SimConfig& cfg);

/// t,x,y,heading,plan_id,event,invalidated,replanned
std::string trace_ticks_csv(const SimTrace& trace);
/// t,trigger,latency_s,succeeded,used_rrt (latency omitted when `with_latency` is false)
std::string trace_replans_csv(const SimTrace& trace, bool with_latency = true);

}  // namespace apa
