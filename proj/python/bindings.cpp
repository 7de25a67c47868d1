#include <sstream>

#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "apa/bench.hpp"
#include "apa/cli.hpp"
#include "apa/errors.hpp"
#include "apa/evolution.hpp"
#include "apa/geometry.hpp"
#include "apa/path_bank.hpp"
#include "apa/potential_field.hpp"
#include "apa/prior_path.hpp"
#include "apa/scenario.hpp"
#include "apa/simulation.hpp"
#include "apa/svg.hpp"

namespace py = pybind11;
using namespace apa;

namespace {

Vec2 to_vec(const py::handle& h) {
    if (py::isinstance<Vec2>(h)) {
        return h.cast<Vec2>();
    }
    auto seq = h.cast<py::sequence>();
    if (seq.size() != 2) {
        throw py::value_error("expected a point (x, y)");
    }
    return {seq[0].cast<double>(), seq[1].cast<double>()};
}

std::vector<Point2> to_points(const py::iterable& it) {
    std::vector<Point2> out;
    for (auto h : it) {
        out.push_back(to_vec(h));
    }
    return out;
}

Obstacle to_obstacle(const py::handle& h) {
    if (py::isinstance<Circle>(h)) {
        return h.cast<Circle>();
    }
    if (py::isinstance<ConvexPolygon>(h)) {
        return h.cast<ConvexPolygon>();
    }
    throw py::type_error("obstacle must be a Circle or a ConvexPolygon");
}

py::object from_obstacle(const Obstacle& ob) {
    return std::visit([](const auto& o) { return py::cast(o); }, ob);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Prior-path artificial potential field planner";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<PlanningError>(m, "PlanningError", PyExc_RuntimeError);
    py::register_exception<RegionTooSmall>(m, "RegionTooSmall", PyExc_RuntimeError);
    py::register_exception<LoadError>(m, "LoadError", PyExc_ValueError);

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0)
        .def(py::init([](const py::sequence& s) { return to_vec(s); }))
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("norm", &Vec2::norm)
        .def("dot", &Vec2::dot)
        .def(py::self + py::self)
        .def(py::self - py::self)
        .def(py::self * double())
        .def(py::self == py::self)
        .def("__iter__", [](const Vec2& v) { return py::iter(py::make_tuple(v.x, v.y)); })
        .def("__repr__", [](const Vec2& v) {
            std::ostringstream os;
            os.precision(17);
            os << "Vec2(" << v.x << ", " << v.y << ")";
            return os.str();
        });
    py::implicitly_convertible<py::tuple, Vec2>();
    py::implicitly_convertible<py::list, Vec2>();

    py::class_<Segment>(m, "Segment")
        .def(py::init<Point2, Point2>())
        .def_property_readonly("start", &Segment::start)
        .def_property_readonly("end", &Segment::end)
        .def_property_readonly("length", &Segment::length);

    py::class_<PriorPath>(m, "PriorPath")
        .def(py::init([](const py::iterable& pts) { return PriorPath(to_points(pts)); }))
        .def_property_readonly("vertices", &PriorPath::vertices)
        .def_property_readonly("total_length", &PriorPath::total_length)
        .def("segment_count", &PriorPath::segment_count)
        .def("distance_to", &PriorPath::distance_to)
        .def(py::self == py::self);

    py::class_<Circle>(m, "Circle")
        .def(py::init<Point2, double>(), py::arg("center"), py::arg("radius"))
        .def_readonly("center", &Circle::center)
        .def_readonly("radius", &Circle::radius);

    py::class_<ConvexPolygon>(m, "ConvexPolygon")
        .def(py::init([](const py::iterable& pts) { return ConvexPolygon(to_points(pts)); }))
        .def_property_readonly("vertices", &ConvexPolygon::vertices)
        .def_static("box", &ConvexPolygon::box);

    py::class_<World>(m, "World")
        .def(py::init([](double w, double h, const py::iterable& obs) {
                 std::vector<Obstacle> v;
                 for (auto o : obs) {
                     v.push_back(to_obstacle(o));
                 }
                 return World(w, h, std::move(v));
             }),
             py::arg("width"), py::arg("height"), py::arg("obstacles") = py::list())
        .def_property_readonly("width", [](const World& w) { return w.bounds().width(); })
        .def_property_readonly("height", [](const World& w) { return w.bounds().height(); })
        .def_property_readonly("obstacles",
                               [](const World& w) {
                                   py::list out;
                                   for (const auto& o : w.obstacles()) {
                                       out.append(from_obstacle(o));
                                   }
                                   return out;
                               })
        .def("add_obstacle", [](World& w, const py::handle& o) { w.add_obstacle(to_obstacle(o)); })
        .def("remove_obstacle", &World::remove_obstacle);

    m.def("elliptic_distance", [](Point2 s, Point2 a, Point2 b) { return elliptic_distance(s, Segment(a, b)); });
    m.def("clearance", &clearance);
    m.def("path_collision_free", &path_collision_free, py::arg("path"), py::arg("world"),
          py::arg("inflation") = kDefaultInflation);
    m.attr("DEFAULT_INFLATION") = kDefaultInflation;

    py::enum_<FieldMode>(m, "FieldMode").value("naive", FieldMode::naive).value("prior", FieldMode::prior);
    py::enum_<Kinematics>(m, "Kinematics")
        .value("holonomic", Kinematics::holonomic)
        .value("heading_limited", Kinematics::heading_limited);
    py::enum_<PlanOutcome>(m, "PlanOutcome")
        .value("Reached", PlanOutcome::reached)
        .value("Trapped", PlanOutcome::trapped)
        .value("Collided", PlanOutcome::collided)
        .value("ExhaustedSteps", PlanOutcome::exhausted_steps);

    py::class_<ForceWeights>(m, "ForceWeights")
        .def(py::init<>())
        .def_readwrite("alpha", &ForceWeights::alpha)
        .def_readwrite("betas", &ForceWeights::betas)
        .def_readwrite("gamma", &ForceWeights::gamma)
        .def_static("uniform", &ForceWeights::uniform)
        .def_static("defaults", &ForceWeights::defaults);

    py::class_<FieldConfig>(m, "FieldConfig")
        .def(py::init<>())
        .def_readwrite("dt", &FieldConfig::dt)
        .def_readwrite("speed", &FieldConfig::speed)
        .def_readwrite("goal_radius", &FieldConfig::goal_radius)
        .def_readwrite("max_steps", &FieldConfig::max_steps)
        .def_readwrite("trap_window", &FieldConfig::trap_window)
        .def_readwrite("trap_progress", &FieldConfig::trap_progress)
        .def_readwrite("min_force", &FieldConfig::min_force)
        .def_readwrite("min_dist", &FieldConfig::min_dist)
        .def_readwrite("inflation", &FieldConfig::inflation)
        .def_readwrite("mode", &FieldConfig::mode)
        .def_readwrite("kinematics", &FieldConfig::kinematics)
        .def_readwrite("max_turn_rate", &FieldConfig::max_turn_rate)
        .def_readwrite("substeps", &FieldConfig::substeps);

    py::class_<State>(m, "State")
        .def(py::init<Point2, double, double>(), py::arg("position"), py::arg("heading") = 0.0, py::arg("t") = 0.0)
        .def_readwrite("position", &State::position)
        .def_readwrite("heading", &State::heading)
        .def_readwrite("t", &State::t);

    py::class_<Plan>(m, "Plan")
        .def_readonly("states", &Plan::states)
        .def_readonly("outcome", &Plan::outcome)
        .def_property_readonly("reached", &Plan::reached)
        .def("to_json", &plan_to_json)
        .def_static("from_json", &plan_from_json);

    m.def("total_force",
          [](Point2 s, Point2 goal, const World& world, std::optional<PriorPath> path, const ForceWeights& w,
             const FieldConfig& cfg) { return total_force(s, goal, world, path ? &*path : nullptr, w, cfg); },
          py::arg("s"), py::arg("goal"), py::arg("world"), py::arg("path"), py::arg("weights"), py::arg("config"));
    m.def("generate_plan",
          [](const State& start, Point2 goal, const World& world, std::optional<PriorPath> path,
             const ForceWeights& w, const FieldConfig& cfg) {
              py::gil_scoped_release release;
              return generate_plan(start, goal, world, path ? &*path : nullptr, w, cfg);
          },
          py::arg("start"), py::arg("goal"), py::arg("world"), py::arg("path"), py::arg("weights"),
          py::arg("config"));

    py::class_<Rng>(m, "Rng").def(py::init<std::uint64_t>(), py::arg("seed") = 1);

    py::class_<RRTConfig>(m, "RRTConfig")
        .def(py::init<>())
        .def_readwrite("step_size", &RRTConfig::step_size)
        .def_readwrite("goal_bias", &RRTConfig::goal_bias)
        .def_readwrite("max_iters", &RRTConfig::max_iters)
        .def_readwrite("goal_radius", &RRTConfig::goal_radius)
        .def_readwrite("inflation", &RRTConfig::inflation)
        .def_readwrite("max_piece", &RRTConfig::max_piece)
        .def_readwrite("seed", &RRTConfig::seed);

    py::class_<RRTResult>(m, "RRTResult")
        .def_readonly("path", &RRTResult::path)
        .def_readonly("node_count", &RRTResult::node_count)
        .def_readonly("iterations_used", &RRTResult::iterations_used);

    m.def("rrt_plan",
          [](Point2 start, Point2 goal, const World& world, const RRTConfig& cfg) {
              Rng rng(cfg.seed);
              return rrt_plan(start, goal, world, SamplingRegion(world.bounds()), cfg, rng);
          },
          py::arg("start"), py::arg("goal"), py::arg("world"), py::arg("config") = RRTConfig{});
    m.def("simplify_path", &simplify_path, py::arg("path"), py::arg("world"), py::arg("inflation"));
    m.def("subdivide_path", &subdivide_path, py::arg("path"), py::arg("max_piece"));
    m.def("iterate_paths",
          [](Point2 start, Point2 goal, const World& world, int iters, const RRTConfig& cfg) {
              py::list out;
              for (auto& it : iterate_paths(start, goal, world, iters, cfg)) {
                  out.append(py::make_tuple(it.path, it.node_count));
              }
              return out;
          },
          py::arg("start"), py::arg("goal"), py::arg("world"), py::arg("iters"), py::arg("config") = RRTConfig{});

    py::class_<BankEntry>(m, "BankEntry")
        .def_readonly("path", &BankEntry::path)
        .def_readonly("length", &BankEntry::length)
        .def_readonly("trivial", &BankEntry::trivial);

    py::class_<PathBank>(m, "PathBank")
        .def(py::init<Point2, Point2, std::size_t, double>(), py::arg("start"), py::arg("goal"),
             py::arg("capacity") = PathBank::kDefaultCapacity, py::arg("goal_radius") = 2.0)
        .def("insert",
             [](PathBank& b, const PriorPath& p, const World& w, double inflation) {
                 return b.insert(p, w, inflation).ok();
             },
             py::arg("path"), py::arg("world"), py::arg("inflation") = kDefaultInflation)
        .def("select_roulette", &PathBank::select_roulette)
        .def("invalidate", &PathBank::invalidate, py::arg("world"), py::arg("inflation") = kDefaultInflation)
        .def("entries", &PathBank::snapshot)
        .def("__len__", &PathBank::size);

    py::class_<GAConfig>(m, "GAConfig")
        .def(py::init<>())
        .def_readwrite("pop_size", &GAConfig::pop_size)
        .def_readwrite("pc", &GAConfig::pc)
        .def_readwrite("pm", &GAConfig::pm)
        .def_readwrite("elite_count", &GAConfig::elite_count)
        .def_readwrite("sigma_rel", &GAConfig::sigma_rel)
        .def_readwrite("generations", &GAConfig::generations)
        .def_readwrite("seed", &GAConfig::seed)
        .def_readwrite("threads", &GAConfig::threads);

    py::class_<OptimizerConfig>(m, "OptimizerConfig")
        .def(py::init<>())
        .def_readwrite("ga", &OptimizerConfig::ga)
        .def_readwrite("field", &OptimizerConfig::field)
        .def_readwrite("rrt", &OptimizerConfig::rrt)
        .def_readwrite("bank_capacity", &OptimizerConfig::bank_capacity)
        .def_readwrite("path_iterations", &OptimizerConfig::path_iterations);

    py::class_<GenerationStats>(m, "GenerationStats")
        .def_readonly("generation", &GenerationStats::generation)
        .def_readonly("best_cost", &GenerationStats::best_cost)
        .def_readonly("mean_cost", &GenerationStats::mean_cost)
        .def_readonly("feasible_count", &GenerationStats::feasible_count);

    py::class_<OptimizeResult>(m, "OptimizeResult")
        .def_property_readonly("plan", [](const OptimizeResult& r) { return r.best.plan; })
        .def_property_readonly("genes", [](const OptimizeResult& r) { return r.best.chromosome.genes; })
        .def_property_readonly("prior_path", [](const OptimizeResult& r) { return r.best.prior_path.path; })
        .def_readonly("history", &OptimizeResult::history)
        .def_readonly("feasible", &OptimizeResult::feasible)
        .def("history_csv", [](const OptimizeResult& r) { return history_csv(r.history); });

    m.def("optimize",
          [](const World& world, Point2 start, Point2 goal, const OptimizerConfig& cfg, int generations) {
              py::gil_scoped_release release;
              return optimize(world, start, goal, cfg, generations);
          },
          py::arg("world"), py::arg("start"), py::arg("goal"), py::arg("config") = OptimizerConfig{},
          py::arg("generations") = 30);

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("world", &Scenario::world)
        .def_readonly("start", &Scenario::start)
        .def_readonly("goal", &Scenario::goal)
        .def_property_readonly("event_count", [](const Scenario& s) { return s.events.size(); })
        .def("to_json", &scenario_to_json);
    m.def("load_scenario", &load_scenario);
    m.def("parse_scenario", &parse_scenario);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("optimizer", &SimConfig::optimizer)
        .def_readwrite("initial_generations", &SimConfig::initial_generations)
        .def_readwrite("time_cap", &SimConfig::time_cap)
        .def_readwrite("reoptimize_every", &SimConfig::reoptimize_every)
        .def_readwrite("generations_per_round", &SimConfig::generations_per_round);

    py::class_<ReplanRecord>(m, "ReplanRecord")
        .def_readonly("t", &ReplanRecord::t)
        .def_readonly("trigger", &ReplanRecord::trigger)
        .def_readonly("latency", &ReplanRecord::latency)
        .def_readonly("succeeded", &ReplanRecord::succeeded)
        .def_readonly("used_rrt", &ReplanRecord::used_rrt);

    py::class_<SimTrace>(m, "SimTrace")
        .def_property_readonly("outcome", [](const SimTrace& t) { return std::string(to_string(t.outcome)); })
        .def_property_readonly("tick_count", [](const SimTrace& t) { return t.ticks.size(); })
        .def_property_readonly("final_position",
                               [](const SimTrace& t) { return t.ticks.back().state.position; })
        .def_readonly("replans", &SimTrace::replans)
        .def("ticks_csv", &trace_ticks_csv)
        .def("replans_csv", &trace_replans_csv, py::arg("with_latency") = true);

    m.def("run_simulation",
          [](const Scenario& s, const SimConfig& cfg) {
              py::gil_scoped_release release;
              return run_simulation(s, cfg);
          },
          py::arg("scenario"), py::arg("config") = SimConfig{});

    m.def("bench_nodes",
          [](const Scenario& s, int runs, int iters, std::uint64_t seed) {
              NodeBenchConfig cfg;
              cfg.runs = runs;
              cfg.iters = iters;
              cfg.seed = seed;
              py::gil_scoped_release release;
              return node_bench_csv(bench_nodes(s, cfg));
          },
          py::arg("scenario"), py::arg("runs") = 50, py::arg("iters") = 10, py::arg("seed") = 1);

    m.def("render_svg",
          [](const World& world, const std::vector<PriorPath>& paths, const std::vector<Plan>& plans) {
              SvgScene scene;
              scene.prior_paths = paths;
              scene.plans = plans;
              return render_svg(world, scene);
          },
          py::arg("world"), py::arg("paths") = std::vector<PriorPath>{}, py::arg("plans") = std::vector<Plan>{});

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    });
}
