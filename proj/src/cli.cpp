#include "apa/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "apa/bench.hpp"
#include "apa/errors.hpp"
#include "apa/scenario.hpp"
#include "apa/simulation.hpp"
#include "apa/svg.hpp"

namespace apa {

namespace {

struct Options {
    std::string scenario;
    std::uint64_t seed = 1;
    std::string mode = "prior";
    std::string out;
    int generations = -1;  // < 0: per-command default
    int pop = 200;
    int threads = 1;
    int max_steps = 5000;
    int path_iterations = 1;
    int trials = 20;
    int runs = 50;
    int iters = 10;
    double time_cap = 120.0;
    int reoptimize_every = 25;
    std::string replans_out;
    std::string plan_out;
    std::vector<std::string> plans;
    double glyph_spacing = 0.0;
    bool no_latency = false;
};

/// Thrown for a failure that maps to exit code 1.
struct DomainFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const Options& o, const std::string& text, std::ostream& out) {
    if (o.out.empty() || o.out == "-") {
        out << text;
    } else {
        write_text(o.out, text);
    }
}

FieldMode parse_mode(const std::string& m) { return m == "naive" ? FieldMode::naive : FieldMode::prior; }

FieldConfig field_config(const Options& o) {
    FieldConfig f;
    f.max_steps = o.max_steps;
    f.mode = parse_mode(o.mode);
    return f;
}

RRTConfig rrt_config(const Options& o) {
    RRTConfig r;
    r.seed = o.seed;
    return r;
}

OptimizerConfig optimizer_config(const Options& o) {
    OptimizerConfig c;
    c.ga.pop_size = o.pop;
    c.ga.seed = o.seed;
    c.ga.threads = o.threads;
    c.field = field_config(o);
    c.field.mode = FieldMode::prior;
    c.rrt = rrt_config(o);
    return c;
}

State start_state(const Scenario& s) {
    return {s.start, std::atan2(s.goal.y - s.start.y, s.goal.x - s.start.x), 0.0};
}

/// Last guide path found in `iterations` path-generator runs.
std::optional<PriorPath> guide_path(const Scenario& s, const Options& o) {
    PathGenerator gen(s.start, s.goal, s.world, rrt_config(o));
    std::optional<PriorPath> guide;
    for (int k = 0; k < o.path_iterations; ++k) {
        PathIteration it = gen.next();
        if (it.guide) {
            guide = std::move(it.guide);
        }
    }
    return guide;
}

int cmd_plan(const Options& o, std::ostream& out, std::ostream& err) {
    Scenario s = load_scenario(o.scenario);
    FieldConfig f = field_config(o);
    std::optional<PriorPath> path;
    if (f.mode == FieldMode::prior) {
        path = guide_path(s, o);
        if (!path) {
            throw DomainFailure("no prior path found");
        }
    }
    Plan plan = generate_plan(start_state(s), s.goal, s.world, path ? &*path : nullptr,
                              ForceWeights::defaults(s.world.obstacle_count(), f.mode), f);
    emit(o, plan_to_json(plan), out);
    if (!plan.reached()) {
        err << "plan outcome: " << to_string(plan.outcome) << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_optimize(const Options& o, std::ostream& out, std::ostream& err) {
    Scenario s = load_scenario(o.scenario);
    OptimizeResult r = optimize(s.world, s.start, s.goal, optimizer_config(o), o.generations < 0 ? 30 : o.generations);
    emit(o, history_csv(r.history), out);
    if (!o.plan_out.empty()) {
        write_text(o.plan_out, plan_to_json(r.best.plan));
    }
    if (!r.feasible) {
        err << "no feasible plan: best outcome " << to_string(r.best.plan.outcome) << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
    Scenario s = load_scenario(o.scenario);
    SimConfig cfg;
    cfg.optimizer = optimizer_config(o);
    cfg.initial_generations = o.generations < 0 ? 5 : o.generations;
    cfg.time_cap = o.time_cap;
    cfg.reoptimize_every = o.reoptimize_every;
    SimTrace trace = run_simulation(s, cfg);
    emit(o, trace_ticks_csv(trace), out);
    if (!o.replans_out.empty()) {
        write_text(o.replans_out, trace_replans_csv(trace, !o.no_latency));
    }
    if (trace.outcome != SimOutcome::reached) {
        err << "simulation ended: " << to_string(trace.outcome) << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_bench_replan(const Options& o, std::ostream& out, std::ostream& err) {
    Scenario s = load_scenario(o.scenario);
    ReplanBenchConfig cfg;
    cfg.optimizer = optimizer_config(o);
    cfg.generations = o.generations < 0 ? 5 : o.generations;
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    ReplanBench b = bench_replan(s, cfg);
    emit(o, replan_bench_csv(b, !o.no_latency), out);
    err << "apa mean " << b.apa.mean * 1e3 << " ms, fresh rrt mean " << b.rrt.mean * 1e3 << " ms (bare rrt "
        << b.bare_rrt.mean * 1e3 << " ms), ratio " << b.ratio() << "\n";
    return kExitOk;
}

int cmd_bench_nodes(const Options& o, std::ostream& out, std::ostream&) {
    Scenario s = load_scenario(o.scenario);
    NodeBenchConfig cfg;
    cfg.rrt = rrt_config(o);
    cfg.runs = o.runs;
    cfg.iters = o.iters;
    cfg.seed = o.seed;
    emit(o, node_bench_csv(bench_nodes(s, cfg)), out);
    return kExitOk;
}

int cmd_render(const Options& o, std::ostream& out, std::ostream&) {
    Scenario s = load_scenario(o.scenario);
    SvgScene scene;
    scene.start = s.start;
    scene.goal = s.goal;
    for (const auto& file : o.plans) {
        std::ifstream in(file);
        if (!in) {
            throw LoadError("plan", "cannot open " + file);
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        scene.plans.push_back(plan_from_json(ss.str()));
    }
    FieldMode mode = parse_mode(o.mode);
    std::optional<PriorPath> path;
    if (mode == FieldMode::prior) {
        path = guide_path(s, o);
        if (path) {
            scene.prior_paths.push_back(*path);
        }
    }
    if (o.glyph_spacing > 0.0 && (mode == FieldMode::naive || path)) {
        scene.glyphs = GlyphField{s.goal, ForceWeights::defaults(s.world.obstacle_count(), mode), field_config(o),
                                  path, o.glyph_spacing};
    }
    emit(o, render_svg(s.world, scene), out);
    return kExitOk;
}

int cmd_dump(const Options& o, std::ostream& out, std::ostream&) {
    Scenario s = load_scenario(o.scenario);
    RRTConfig rrt = rrt_config(o);
    PathGenerator gen(s.start, s.goal, s.world, rrt);
    PathBank bank(s.start, s.goal);
    for (int k = 0; k < std::max(1, o.path_iterations); ++k) {
        PathIteration it = gen.next();
        if (it.guide) {
            bank.insert(*it.guide, s.world, kDefaultInflation);
        }
    }
    std::ostringstream os;
    os.precision(17);
    os << "rank,length,vertices,trivial\n";
    auto entries = bank.snapshot();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        os << i << ',' << entries[i].length << ',' << entries[i].path.vertices().size() << ','
           << int(entries[i].trivial) << '\n';
    }
    emit(o, os.str(), out);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adaptive prior-path artificial potential field planner"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--scenario", o.scenario, "Scenario JSON file");
    app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
    app.add_option("--mode", o.mode, "Force field: naive or prior")
        ->check(CLI::IsMember({"naive", "prior"}))
        ->capture_default_str();
    app.add_option("--out", o.out, "Output file (default: stdout)");
    app.add_option("--generations", o.generations, "GA generations")->check(CLI::NonNegativeNumber);

    auto* plan = app.add_subcommand("plan", "Generate one plan from the scenario start");
    plan->add_option("--max-steps", o.max_steps, "Step budget")->check(CLI::PositiveNumber)->capture_default_str();
    plan->add_option("--path-iterations", o.path_iterations, "Prior-path iterations")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* opt = app.add_subcommand("optimize", "Evolve force weights and write the convergence history");
    opt->add_option("--pop", o.pop, "Population size")->check(CLI::PositiveNumber)->capture_default_str();
    opt->add_option("--threads", o.threads, "Evaluation threads")->check(CLI::PositiveNumber);
    opt->add_option("--max-steps", o.max_steps, "Step budget per plan")->check(CLI::PositiveNumber);
    opt->add_option("--plan-out", o.plan_out, "Write the best plan as JSON");

    auto* sim = app.add_subcommand("simulate", "Drive the robot through the scenario events");
    sim->add_option("--pop", o.pop, "Population size")->check(CLI::PositiveNumber)->capture_default_str();
    sim->add_option("--threads", o.threads, "Evaluation threads")->check(CLI::PositiveNumber);
    sim->add_option("--max-steps", o.max_steps, "Step budget per plan")->check(CLI::PositiveNumber);
    sim->add_option("--time-cap", o.time_cap, "Simulated seconds")->check(CLI::PositiveNumber);
    sim->add_option("--reoptimize-every", o.reoptimize_every, "Ticks between GA rounds (0: never)")
        ->check(CLI::NonNegativeNumber);
    sim->add_option("--replans-out", o.replans_out, "Write the replan log as CSV");
    sim->add_flag("--no-latency", o.no_latency, "Omit wall-clock columns");

    auto* br = app.add_subcommand("bench-replan", "Replan latency: path bank vs RRT from scratch");
    br->add_option("--trials", o.trials, "Trials")->check(CLI::PositiveNumber)->capture_default_str();
    br->add_option("--pop", o.pop, "Population size")->check(CLI::PositiveNumber)->capture_default_str();
    br->add_option("--max-steps", o.max_steps, "Step budget per plan")->check(CLI::PositiveNumber);
    br->add_flag("--no-latency", o.no_latency, "Omit wall-clock columns");

    auto* bn = app.add_subcommand("bench-nodes", "RRT node counts per path iteration");
    bn->add_option("--runs", o.runs, "Seeded runs")->check(CLI::PositiveNumber)->capture_default_str();
    bn->add_option("--iters", o.iters, "Iterations per run")->check(CLI::PositiveNumber)->capture_default_str();

    auto* render = app.add_subcommand("render", "Draw the scenario as SVG");
    render->add_option("--plan", o.plans, "Plan JSON to overlay (repeatable)");
    render->add_option("--glyphs", o.glyph_spacing, "Force glyph spacing in meters (0: none)")
        ->check(CLI::NonNegativeNumber);
    render->add_option("--path-iterations", o.path_iterations, "Prior-path iterations")->check(CLI::PositiveNumber);

    auto* dump = app.add_subcommand("dump", "Fill a path bank and list its entries");
    dump->add_option("--path-iterations", o.path_iterations, "Prior-path iterations")->check(CLI::PositiveNumber);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }
    if (o.scenario.empty()) {
        err << "error: --scenario is required\n" << app.help();
        return kExitUsage;
    }

    using Handler = int (*)(const Options&, std::ostream&, std::ostream&);
    const std::map<const CLI::App*, Handler> handlers{
        {plan, cmd_plan},         {opt, cmd_optimize},         {sim, cmd_simulate}, {br, cmd_bench_replan},
        {bn, cmd_bench_nodes},    {render, cmd_render},        {dump, cmd_dump},
    };
    try {
        return handlers.at(app.get_subcommands().front())(o, out, err);
    } catch (const LoadError& e) {
        err << "error: invalid scenario: " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return kExitFailure;
}

}  // namespace apa
