#include "apa/simulation.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "apa/errors.hpp"

namespace apa {

namespace {

std::optional<Plan> try_plan(const State& state, Point2 goal, const World& world, const PriorPath& path,
                             const ForceWeights& w, const FieldConfig& field) {
    try {
        return generate_plan(state, goal, world, &path, w, field);
    } catch (const PlanningError&) {
        return std::nullopt;
    }
}

bool plan_collides_from(const Plan& plan, std::size_t from, const World& world, double inflation) {
    for (std::size_t i = from; i + 1 < plan.states.size(); ++i) {
        Point2 a = plan.states[i].position;
        Point2 b = plan.states[i + 1].position;
        if (a != b && !segment_collision_free(Segment(a, b), world, inflation)) {
            return true;
        }
    }
    return false;
}

Plan remaining(const Plan& plan, std::size_t from) {
    Plan rest;
    rest.outcome = plan.outcome;
    rest.states.assign(plan.states.begin() + static_cast<std::ptrdiff_t>(from), plan.states.end());
    return rest;
}

}  // namespace

ReplanResult replan(const State& state, const World& world, PathBank& bank, const ForceWeights& weights,
                    const ReplanConfig& cfg, const PriorPath* preferred) {
    FieldConfig field = cfg.field;
    field.mode = FieldMode::prior;
    const Point2 goal = bank.goal();
    ReplanResult out;
    double best_gap = std::numeric_limits<double>::infinity();

    auto attempt = [&](const PriorPath& path) {
        ++out.attempts;
        auto plan = try_plan(state, goal, world, path, weights, field);
        if (!plan) {
            return false;
        }
        double gap = distance(plan->states.back().position, goal);
        if (plan->reached() || gap < best_gap) {
            best_gap = gap;
            out.plan = std::move(*plan);
            out.path = path;
        }
        out.succeeded = out.plan.reached();
        return out.succeeded;
    };

    // Stored paths start where they were planned; join them to the robot.
    RRTConfig rrt = cfg.rrt;
    double room = std::min(clearance(state.position, world), clearance(goal, world));
    if (room <= field.inflation) {
        return out;
    }
    rrt.inflation = std::max(field.inflation, std::min(rrt.inflation, 0.99 * room));
    auto join = [&](const PriorPath& p) {
        return splice_path(state.position, p, world, rrt.inflation, rrt.max_piece);
    };

    int tried = 0;
    if (preferred != nullptr && path_collision_free(*preferred, world, field.inflation)) {
        ++tried;
        if (auto p = join(*preferred); p && attempt(*p)) {
            return out;
        }
    }
    for (const auto& e : bank.snapshot()) {
        if (tried >= cfg.max_bank_attempts) {
            break;
        }
        if (e.trivial || (preferred != nullptr && e.path == *preferred) ||
            !path_collision_free(e.path, world, field.inflation)) {
            continue;
        }
        ++tried;
        if (auto p = join(e.path); p && attempt(*p)) {
            return out;
        }
    }

    out.used_rrt = true;
    Rng rng(rrt.seed);
    RRTResult r;
    try {
        r = rrt_plan(state.position, goal, world, SamplingRegion(world.bounds()), rrt, rng);
    } catch (const ConfigError&) {
        return out;
    }
    if (!r.path) {
        return out;
    }
    PriorPath guide = subdivide_path(simplify_path(*r.path, world, rrt.inflation), rrt.max_piece);
    bank.reanchor(state.position, world, rrt.inflation, rrt.max_piece);
    bank.insert(guide, world, field.inflation);
    attempt(guide);
    return out;
}

std::string_view to_string(SimOutcome o) {
    switch (o) {
        case SimOutcome::reached:
            return "reached";
        case SimOutcome::time_cap:
            return "time_cap";
        case SimOutcome::unresolved:
            return "unresolved";
    }
    return "unknown";
}

SimTrace run_simulation(const Scenario& scenario, const SimConfig& cfg) {
    scenario.validate();
    if (cfg.initial_generations < 0 || cfg.reoptimize_every < 0 || cfg.generations_per_round < 0 ||
        !(cfg.time_cap > 0.0)) {
        throw ConfigError("simulation: negative budget or non-positive time cap");
    }
    World world = scenario.world;
    Optimizer opt(world, scenario.start, scenario.goal, cfg.optimizer);
    opt.run(cfg.initial_generations);

    const FieldConfig& field = opt.config().field;
    const double dt = field.dt;
    ReplanConfig rcfg{field, cfg.optimizer.rrt, cfg.max_bank_attempts};

    Plan active = opt.best().plan;
    PriorPath active_path = opt.best().prior_path.path;
    std::size_t idx = 0;
    int plan_id = 0;
    State state = active.states.front();

    SimTrace trace;
    trace.ticks.push_back({0.0, state, plan_id});
    std::size_t next_event = 0;

    auto do_replan = [&](double t, const char* trigger) {
        ForceWeights w = opt.best().chromosome.weights();
        auto t0 = std::chrono::steady_clock::now();
        ReplanResult r = replan(state, world, opt.bank(), w, rcfg, &active_path);
        auto t1 = std::chrono::steady_clock::now();
        trace.replans.push_back(
            {t, trigger, std::chrono::duration<double>(t1 - t0).count(), r.succeeded, r.used_rrt});
        if (r.succeeded) {
            active = std::move(r.plan);
            active_path = std::move(*r.path);
            idx = 0;
            ++plan_id;
        }
        return r.succeeded;
    };

    for (long k = 1;; ++k) {
        if (distance(state.position, scenario.goal) <= field.goal_radius) {
            trace.outcome = SimOutcome::reached;
            break;
        }
        double t = static_cast<double>(k) * dt;
        if (t > cfg.time_cap + 1e-9) {
            trace.outcome = SimOutcome::time_cap;
            break;
        }
        SimTick tick{t, state, plan_id};

        if (idx + 1 >= active.states.size()) {
            // Plan ran out short of the goal: wait in place for a new one.
            if (!do_replan(t, "plan_end")) {
                tick.replanned = true;
                trace.ticks.push_back(tick);
                trace.outcome = SimOutcome::unresolved;
                break;
            }
            tick.replanned = true;
        }
        ++idx;
        state = active.states[idx];
        state.t = t;
        tick.state = state;

        while (next_event < scenario.events.size() && scenario.events[next_event].t <= t + 1e-9) {
            const auto& ev = scenario.events[next_event++];
            WorldChange change{};
            if (const auto* add = std::get_if<AddObstacle>(&ev.action)) {
                world.add_obstacle(add->obstacle);
                change = {WorldChange::Kind::added, world.obstacle_count() - 1};
            } else {
                std::size_t i = std::get<RemoveObstacle>(ev.action).index;
                world.remove_obstacle(i);
                change = {WorldChange::Kind::removed, i};
            }
            opt.apply_world_change(world, change);
            tick.event = true;
        }

        bool round = cfg.reoptimize_every > 0 && k % cfg.reoptimize_every == 0;
        if (tick.event || round) {
            opt.rebase(state);
        }
        if (tick.event && plan_collides_from(active, idx, world, field.inflation)) {
            tick.invalidated = true;
            tick.replanned = true;
            if (!do_replan(t, "event")) {
                tick.plan_id = plan_id;
                trace.ticks.push_back(tick);
                trace.outcome = SimOutcome::unresolved;
                break;
            }
        } else if (round && cfg.generations_per_round > 0) {
            opt.run(cfg.generations_per_round);
            const Individual& cand = opt.best();
            Evaluation rest = evaluate_plan(remaining(active, idx), scenario.goal, world, dt);
            if (cand.plan.reached() && opt.reference().cost(cand.evaluation) < opt.reference().cost(rest)) {
                active = cand.plan;
                active_path = cand.prior_path.path;
                idx = 0;
                ++plan_id;
            }
        }
        tick.plan_id = plan_id;
        trace.ticks.push_back(tick);
    }
    return trace;
}

std::string trace_ticks_csv(const SimTrace& trace) {
    std::ostringstream os;
    os.precision(17);
    os << "t,x,y,heading,plan_id,event,invalidated,replanned\n";
    for (const auto& k : trace.ticks) {
        os << k.t << ',' << k.state.position.x << ',' << k.state.position.y << ',' << k.state.heading << ','
           << k.plan_id << ',' << int(k.event) << ',' << int(k.invalidated) << ',' << int(k.replanned) << '\n';
    }
    return os.str();
}

std::string trace_replans_csv(const SimTrace& trace, bool with_latency) {
    std::ostringstream os;
    os.precision(17);
    os << (with_latency ? "t,trigger,latency_s,succeeded,used_rrt\n" : "t,trigger,succeeded,used_rrt\n");
    for (const auto& r : trace.replans) {
        os << r.t << ',' << r.trigger << ',';
        if (with_latency) {
            os << r.latency << ',';
        }
        os << int(r.succeeded) << ',' << int(r.used_rrt) << '\n';
    }
    return os.str();
}

}  // namespace apa
