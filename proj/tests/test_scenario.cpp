#include <cstring>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "apa/errors.hpp"
#include "apa/scenario.hpp"
#include "apa/svg.hpp"

using namespace apa;

namespace {

std::string field_of(const std::string& json) {
    try {
        parse_scenario(json);
    } catch (const LoadError& e) {
        return e.field();
    }
    return "<no error>";
}

const char* kMinimal = R"({"bounds":{"w":100,"h":50},"obstacles":[],"start":[5,5],"goal":[90,40]})";

// Every start tag has a matching end tag, in order.
bool tags_balanced(const std::string& xml) {
    std::vector<std::string> stack;
    std::regex tag(R"(<(/?)([A-Za-z_][\w.-]*)[^>]*?(/?)>)");
    for (auto it = std::sregex_iterator(xml.begin(), xml.end(), tag); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        if (m[3].length() > 0) {
            continue;
        }
        if (m[1].length() == 0) {
            stack.push_back(m[2]);
        } else {
            if (stack.empty() || stack.back() != m[2]) {
                return false;
            }
            stack.pop_back();
        }
    }
    return stack.empty();
}

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) {
        ++n;
    }
    return n;
}

}  // namespace

TEST(Scenario, MinimalIsValid) {
    Scenario s = parse_scenario(kMinimal);
    EXPECT_EQ(s.world.obstacle_count(), 0u);
    EXPECT_TRUE(s.events.empty());
    EXPECT_EQ(s.start, Point2(5.0, 5.0));
    EXPECT_DOUBLE_EQ(s.world.bounds().width(), 100.0);
}

TEST(Scenario, ErrorsNameTheField) {
    EXPECT_EQ(field_of(R"({"bounds":{"w":100,"h":50},"obstacles":[{"kind":"circle","c":[50,25],"r":5}],
                           "start":[50,25],"goal":[90,40]})"),
              "start");
    EXPECT_EQ(field_of(R"({"bounds":{"w":100,"h":50},"start":[5,5],"goal":[190,40]})"), "goal");
    EXPECT_EQ(field_of(R"({"bounds":{"w":-1,"h":50},"start":[5,5],"goal":[90,40]})"), "bounds");
    EXPECT_EQ(field_of(R"({"bounds":{"h":50},"start":[5,5],"goal":[90,40]})"), "bounds.w");
    EXPECT_EQ(field_of(R"({"bounds":{"w":100,"h":50},"obstacles":[{"kind":"circle","c":[50,25],"r":5},
                           {"kind":"circle","c":[70,25],"r":-2}],"start":[5,5],"goal":[90,40]})"),
              "obstacles[1].r");
    EXPECT_EQ(field_of(R"({"bounds":{"w":100,"h":50},"obstacles":[{"kind":"blob"}],"start":[5,5],"goal":[90,40]})"),
              "obstacles[0].kind");
    EXPECT_EQ(field_of(R"({"bounds":{"w":100,"h":50},"obstacles":[{"kind":"poly","pts":[[0,0],[1,0],[2,0]]}],
                           "start":[5,5],"goal":[90,40]})"),
              "obstacles[0].pts");
    EXPECT_EQ(field_of(R"({"bounds":{"w":100,"h":50},"start":[5,5],"goal":[90,40],
                           "events":[{"t":2,"add":{"kind":"circle","c":[50,25],"r":1}},
                                     {"t":1,"add":{"kind":"circle","c":[50,25],"r":1}}]})"),
              "events[1].t");
    EXPECT_EQ(field_of(R"({"bounds":{"w":100,"h":50},"start":[5,5],"goal":[90,40],"events":[{"t":2,"remove":0}]})"),
              "events[0].remove");
    EXPECT_EQ(field_of(R"({"bounds":{"w":100,"h":50},"start":[5,"x"],"goal":[90,40]})"), "start[1]");
    EXPECT_EQ(field_of("{not json"), "json");
    EXPECT_THROW(load_scenario("/nonexistent/file.json"), LoadError);
}

TEST(Scenario, RoundTripIsBitExact) {
    Scenario s = parse_scenario(kMinimal);
    s.world.add_obstacle(Circle({0.1 + 0.2, 1.0 / 3.0}, std::sqrt(2.0)));
    s.world.add_obstacle(ConvexPolygon({{10.0 / 7.0, 20.0}, {30.123456789012345, 21.5}, {25.0, 33.0 + 1e-13}}));
    s.start = {5.000000000000001, 4.9};
    s.events.push_back({0.1 * 3, AddObstacle{Circle({60.0, 10.0 / 3.0}, 2.5)}});
    s.events.push_back({7.25, RemoveObstacle{1}});
    s.validate();

    auto dir = std::filesystem::temp_directory_path() / "apa_roundtrip_test";
    std::filesystem::create_directories(dir);
    save_scenario(s, dir / "s.json");
    Scenario r = load_scenario(dir / "s.json");

    EXPECT_EQ(r.start, s.start);
    EXPECT_EQ(r.goal, s.goal);
    ASSERT_EQ(r.world.obstacle_count(), 2u);
    const auto& c0 = std::get<Circle>(r.world.obstacles()[0]);
    EXPECT_EQ(c0.center, Point2(0.1 + 0.2, 1.0 / 3.0));
    EXPECT_EQ(c0.radius, std::sqrt(2.0));
    EXPECT_EQ(std::get<ConvexPolygon>(r.world.obstacles()[1]).vertices(),
              std::get<ConvexPolygon>(s.world.obstacles()[1]).vertices());
    ASSERT_EQ(r.events.size(), 2u);
    EXPECT_EQ(r.events[0].t, 0.1 * 3);
    EXPECT_EQ(std::get<Circle>(std::get<AddObstacle>(r.events[0].action).obstacle).center.y, 10.0 / 3.0);
    EXPECT_EQ(std::get<RemoveObstacle>(r.events[1].action).index, 1u);
    EXPECT_EQ(scenario_to_json(r), scenario_to_json(s));
    std::filesystem::remove_all(dir);
}

TEST(Scenario, ShippedScenariosLoad) {
    for (const char* name : {"u_trap.json", "open.json", "two_corridor.json", "cluttered.json"}) {
        EXPECT_NO_THROW(load_scenario(std::filesystem::path(APA_SCENARIO_DIR) / name)) << name;
    }
}

TEST(PlanJson, RoundTrip) {
    Plan p;
    p.states = {{{1.0 / 3.0, 2.0}, 0.25, 0.0}, {{1.5, 2.5}, -3.0, 0.1}};
    p.outcome = PlanOutcome::trapped;
    std::string j = plan_to_json(p);
    EXPECT_NE(j.find("\"outcome\""), std::string::npos);
    EXPECT_NE(j.find("Trapped"), std::string::npos);
    Plan q = plan_from_json(j);
    ASSERT_EQ(q.states.size(), 2u);
    EXPECT_EQ(q.states[0].position, p.states[0].position);
    EXPECT_EQ(q.states[1].heading, -3.0);
    EXPECT_EQ(q.states[1].t, 0.1);
    EXPECT_EQ(q.outcome, PlanOutcome::trapped);
    EXPECT_THROW(plan_from_json(R"({"states":[[1,2]],"outcome":"Reached"})"), LoadError);
    EXPECT_THROW(plan_from_json(R"({"states":[],"outcome":"Nope"})"), LoadError);
}

TEST(Svg, EmptyWorldOnlyBounds) {
    World w(300.0, 300.0);
    std::string svg = render_svg(w, SvgScene{});
    EXPECT_TRUE(tags_balanced(svg));
    EXPECT_EQ(count(svg, "<rect"), 1u);
    EXPECT_NE(svg.find("id=\"bounds\""), std::string::npos);
    for (const char* el : {"<circle", "<polygon", "<polyline", "<text", "<g"}) {
        EXPECT_EQ(svg.find(el), std::string::npos) << el;
    }
}

TEST(Svg, FullSceneWellFormed) {
    Scenario s = load_scenario(std::filesystem::path(APA_SCENARIO_DIR) / "u_trap.json");
    SvgScene scene;
    scene.start = s.start;
    scene.goal = s.goal;
    scene.prior_paths.push_back(PriorPath({s.start, {85.0, 170.0}, s.goal}));
    Plan p;
    p.states = {{s.start}, {{45.0, 101.0}}};
    scene.plans.push_back(p);
    scene.glyphs = GlyphField{s.goal, ForceWeights::defaults(3, FieldMode::naive), FieldConfig{}, std::nullopt, 20.0};
    std::string svg = render_svg(s.world, scene);
    EXPECT_TRUE(tags_balanced(svg));
    EXPECT_EQ(count(svg, "class=\"obstacle\""), 3u);
    EXPECT_EQ(count(svg, "class=\"prior-path\""), 1u);
    EXPECT_EQ(count(svg, "class=\"plan\""), 1u);
    EXPECT_GT(count(svg, "class=\"glyph\""), 0u);
    for (const char* item : {">obstacle<", ">prior path<", ">plan<", ">start<", ">goal<", ">force direction<"}) {
        EXPECT_NE(svg.find(item), std::string::npos) << item;
    }
    EXPECT_THROW(export_svg(s.world, scene, "/nonexistent/dir/out.svg"), std::runtime_error);
}

TEST(Glyphs, MatchTotalForce) {
    World w(100.0, 100.0, {Circle({50.0, 50.0}, 10.0)});
    Point2 goal{90.0, 90.0};
    GlyphField g{goal, ForceWeights::uniform(1, 1.0, 500.0, 0.0), FieldConfig{}, std::nullopt, 10.0};
    auto glyphs = force_glyphs(w, g);
    // 100 lattice points, those inside the circle are skipped.
    EXPECT_LT(glyphs.size(), 100u);
    EXPECT_GT(glyphs.size(), 80u);
    for (const auto& gl : glyphs) {
        EXPECT_TRUE(std::isfinite(gl.direction.x) && std::isfinite(gl.direction.y));
        EXPECT_NEAR(gl.direction.norm(), 1.0, 1e-12);
        Vec2 f = total_force(gl.at, goal, w, nullptr, g.weights, g.field);
        EXPECT_NEAR(gl.direction.cross(f), 0.0, 1e-9 * f.norm());
        EXPECT_GT(gl.direction.dot(f), 0.0);
        EXPECT_GT(clearance(gl.at, w), 0.0);
    }
}

TEST(Glyphs, EmptyWorldPointsAtGoal) {
    World w(100.0, 100.0);
    Point2 goal{33.0, 71.0};
    GlyphField g{goal, ForceWeights::uniform(0, 1.0, 0.0, 0.0), FieldConfig{}, std::nullopt, 25.0};
    auto glyphs = force_glyphs(w, g);
    ASSERT_EQ(glyphs.size(), 16u);
    for (const auto& gl : glyphs) {
        Vec2 d = goal - gl.at;
        d = d / d.norm();
        EXPECT_NEAR(gl.direction.x, d.x, 1e-12);
        EXPECT_NEAR(gl.direction.y, d.y, 1e-12);
    }
}
