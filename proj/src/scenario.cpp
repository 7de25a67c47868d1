#include "apa/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "apa/errors.hpp"

namespace apa {

namespace {

using nlohmann::json;

const json& member(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) {
        throw LoadError(path, "expected an object");
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw LoadError(path.empty() ? key : path + "." + key, "missing");
    }
    return *it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) {
        throw LoadError(path, "expected a number");
    }
    double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw LoadError(path, "must be finite");
    }
    return v;
}

Point2 point(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) {
        throw LoadError(path, "expected [x, y]");
    }
    return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

Obstacle obstacle(const json& j, const std::string& path) {
    const json& kind = member(j, "kind", path);
    if (kind == "circle") {
        Point2 c = point(member(j, "c", path), path + ".c");
        double r = number(member(j, "r", path), path + ".r");
        if (!(r > 0.0)) {
            throw LoadError(path + ".r", "radius must be positive");
        }
        return Circle(c, r);
    }
    if (kind == "poly") {
        const json& pts = member(j, "pts", path);
        if (!pts.is_array()) {
            throw LoadError(path + ".pts", "expected an array of points");
        }
        std::vector<Point2> v;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            v.push_back(point(pts[i], path + ".pts[" + std::to_string(i) + "]"));
        }
        try {
            return ConvexPolygon(std::move(v));
        } catch (const ConfigError& e) {
            throw LoadError(path + ".pts", e.what());
        }
    }
    throw LoadError(path + ".kind", "expected \"circle\" or \"poly\"");
}

json to_json(Point2 p) { return json::array({p.x, p.y}); }

json to_json(const Obstacle& ob) {
    if (const auto* c = std::get_if<Circle>(&ob)) {
        return {{"kind", "circle"}, {"c", to_json(c->center)}, {"r", c->radius}};
    }
    json pts = json::array();
    for (Point2 p : std::get<ConvexPolygon>(ob).vertices()) {
        pts.push_back(to_json(p));
    }
    return {{"kind", "poly"}, {"pts", pts}};
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw LoadError("json", e.what());
    }
}

std::string read_text(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw LoadError("file", "cannot open " + file.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void Scenario::validate() const {
    const Rect& b = world.bounds();
    auto check_endpoint = [&](Point2 p, const char* name) {
        if (!b.contains(p)) {
            throw LoadError(name, "outside the world bounds");
        }
        if (clearance(p, world) <= kDefaultInflation) {
            throw LoadError(name, "in collision with an obstacle");
        }
    };
    check_endpoint(start, "start");
    check_endpoint(goal, "goal");

    std::size_t count = world.obstacle_count();
    double last = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& ev = events[i];
        std::string path = "events[" + std::to_string(i) + "]";
        if (!std::isfinite(ev.t) || ev.t < 0.0) {
            throw LoadError(path + ".t", "must be a non-negative time");
        }
        if (ev.t < last) {
            throw LoadError(path + ".t", "event times must be non-decreasing");
        }
        last = ev.t;
        if (const auto* rm = std::get_if<RemoveObstacle>(&ev.action)) {
            if (rm->index >= count) {
                throw LoadError(path + ".remove", "no obstacle with index " + std::to_string(rm->index));
            }
            --count;
        } else {
            ++count;
        }
    }
}

Scenario parse_scenario(const std::string& json_text) {
    json j = parse_json(json_text);
    if (!j.is_object()) {
        throw LoadError("json", "top level must be an object");
    }
    const json& bounds = member(j, "bounds", "");
    double w = number(member(bounds, "w", "bounds"), "bounds.w");
    double h = number(member(bounds, "h", "bounds"), "bounds.h");
    if (!(w > 0.0) || !(h > 0.0)) {
        throw LoadError("bounds", "width and height must be positive");
    }

    std::vector<Obstacle> obstacles;
    if (auto it = j.find("obstacles"); it != j.end()) {
        if (!it->is_array()) {
            throw LoadError("obstacles", "expected an array");
        }
        for (std::size_t i = 0; i < it->size(); ++i) {
            obstacles.push_back(obstacle((*it)[i], "obstacles[" + std::to_string(i) + "]"));
        }
    }

    Scenario s{World(w, h, std::move(obstacles)), point(member(j, "start", ""), "start"),
               point(member(j, "goal", ""), "goal"), {}};

    if (auto it = j.find("events"); it != j.end()) {
        if (!it->is_array()) {
            throw LoadError("events", "expected an array");
        }
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& ev = (*it)[i];
            std::string path = "events[" + std::to_string(i) + "]";
            double t = number(member(ev, "t", path), path + ".t");
            bool has_add = ev.contains("add");
            bool has_remove = ev.contains("remove");
            if (has_add == has_remove) {
                throw LoadError(path, "needs exactly one of \"add\" or \"remove\"");
            }
            if (has_add) {
                s.events.push_back({t, AddObstacle{obstacle(ev["add"], path + ".add")}});
            } else {
                const json& idx = ev["remove"];
                if (!idx.is_number_unsigned() && !(idx.is_number_integer() && idx.get<long long>() >= 0)) {
                    throw LoadError(path + ".remove", "expected a non-negative obstacle index");
                }
                s.events.push_back({t, RemoveObstacle{idx.get<std::size_t>()}});
            }
        }
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& file) { return parse_scenario(read_text(file)); }

std::string scenario_to_json(const Scenario& s) {
    json obstacles = json::array();
    for (const auto& ob : s.world.obstacles()) {
        obstacles.push_back(to_json(ob));
    }
    json events = json::array();
    for (const auto& ev : s.events) {
        json e{{"t", ev.t}};
        if (const auto* add = std::get_if<AddObstacle>(&ev.action)) {
            e["add"] = to_json(add->obstacle);
        } else {
            e["remove"] = std::get<RemoveObstacle>(ev.action).index;
        }
        events.push_back(std::move(e));
    }
    json j{{"bounds", {{"w", s.world.bounds().width()}, {"h", s.world.bounds().height()}}},
           {"obstacles", obstacles},
           {"start", to_json(s.start)},
           {"goal", to_json(s.goal)},
           {"events", events}};
    return j.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::filesystem::path& file) { write_text(file, scenario_to_json(s)); }

std::string plan_to_json(const Plan& plan) {
    json states = json::array();
    for (const auto& st : plan.states) {
        states.push_back(json::array({st.position.x, st.position.y, st.heading, st.t}));
    }
    json j{{"states", states}, {"outcome", std::string(to_string(plan.outcome))}};
    return j.dump() + "\n";
}

Plan plan_from_json(const std::string& json_text) {
    json j = parse_json(json_text);
    Plan plan;
    const json& states = member(j, "states", "");
    if (!states.is_array()) {
        throw LoadError("states", "expected an array");
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
        std::string path = "states[" + std::to_string(i) + "]";
        const json& s = states[i];
        if (!s.is_array() || s.size() != 4) {
            throw LoadError(path, "expected [x, y, heading, t]");
        }
        plan.states.push_back({{number(s[0], path + "[0]"), number(s[1], path + "[1]")},
                               number(s[2], path + "[2]"),
                               number(s[3], path + "[3]")});
    }
    const json& outcome = member(j, "outcome", "");
    auto o = outcome.is_string() ? outcome_from_string(outcome.get<std::string>()) : std::nullopt;
    if (!o) {
        throw LoadError("outcome", "unknown plan outcome");
    }
    plan.outcome = *o;
    return plan;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out || !(out << text) || !out.flush()) {
        throw std::runtime_error("cannot write " + file.string());
    }
}

}  // namespace apa
