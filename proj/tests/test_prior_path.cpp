#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "apa/errors.hpp"
#include "apa/prior_path.hpp"

using namespace apa;

namespace {

World clutter() {
    return World(100.0, 100.0,
                 {Circle({30.0, 50.0}, 10.0), Circle({60.0, 30.0}, 8.0), ConvexPolygon::box({55.0, 55.0}, {75.0, 90.0}),
                  ConvexPolygon({{20.0, 75.0}, {35.0, 70.0}, {30.0, 88.0}})});
}

RRTConfig small_cfg(std::uint64_t seed) {
    RRTConfig c;
    c.seed = seed;
    c.inflation = 1.0;
    return c;
}

void expect_tree_valid(const RRTResult& r, const World& w, double inflation, int max_iters) {
    const auto& nodes = r.tree.nodes;
    ASSERT_FALSE(nodes.empty());
    EXPECT_FALSE(nodes[0].parent.has_value());
    EXPECT_EQ(r.node_count, nodes.size());
    EXPECT_LE(r.node_count, static_cast<std::size_t>(max_iters) + 1);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        ASSERT_TRUE(nodes[i].parent.has_value());
        EXPECT_LT(*nodes[i].parent, i);
        EXPECT_TRUE(segment_collision_free(Segment(nodes[*nodes[i].parent].point, nodes[i].point), w, inflation));
    }
}

}  // namespace

TEST(Rrt, EmptyWorldFindsPath) {
    World w(100.0, 100.0);
    Rng rng(1);
    RRTConfig cfg = small_cfg(1);
    auto r = rrt_plan({5.0, 5.0}, {95.0, 90.0}, w, SamplingRegion(w.bounds()), cfg, rng);
    ASSERT_TRUE(r.path);
    EXPECT_GE(r.path->total_length(), distance({5.0, 5.0}, {95.0, 90.0}));
    EXPECT_EQ(r.path->front(), Point2(5.0, 5.0));
    EXPECT_EQ(r.path->back(), Point2(95.0, 90.0));
}

TEST(Rrt, SealedGoalExhaustsIterations) {
    World w(100.0, 100.0,
            {ConvexPolygon::box({60.0, 60.0}, {90.0, 62.0}), ConvexPolygon::box({60.0, 88.0}, {90.0, 90.0}),
             ConvexPolygon::box({60.0, 62.0}, {62.0, 88.0}), ConvexPolygon::box({88.0, 62.0}, {90.0, 88.0})});
    RRTConfig cfg = small_cfg(3);
    cfg.max_iters = 500;
    Rng rng(3);
    auto r = rrt_plan({10.0, 10.0}, {75.0, 75.0}, w, SamplingRegion(w.bounds()), cfg, rng);
    EXPECT_FALSE(r.path);
    EXPECT_EQ(r.iterations_used, cfg.max_iters);
    expect_tree_valid(r, w, cfg.inflation, cfg.max_iters);
}

TEST(Rrt, SameSeedSameResult) {
    World w = clutter();
    RRTConfig cfg = small_cfg(7);
    Rng a(7);
    Rng b(7);
    auto ra = rrt_plan({5.0, 5.0}, {95.0, 95.0}, w, SamplingRegion(w.bounds()), cfg, a);
    auto rb = rrt_plan({5.0, 5.0}, {95.0, 95.0}, w, SamplingRegion(w.bounds()), cfg, b);
    ASSERT_TRUE(ra.path && rb.path);
    EXPECT_EQ(*ra.path, *rb.path);
    EXPECT_EQ(ra.node_count, rb.node_count);
    EXPECT_EQ(ra.iterations_used, rb.iterations_used);
}

TEST(Rrt, TreeAndPathCollisionFree) {
    World w = clutter();
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RRTConfig cfg = small_cfg(seed);
        Rng rng(seed);
        auto r = rrt_plan({5.0, 5.0}, {95.0, 95.0}, w, SamplingRegion(w.bounds()), cfg, rng);
        expect_tree_valid(r, w, cfg.inflation, cfg.max_iters);
        ASSERT_TRUE(r.path);
        EXPECT_TRUE(path_collision_free(*r.path, w, cfg.inflation));
    }
}

TEST(Rrt, RejectsBadEndpoints) {
    World w = clutter();
    RRTConfig cfg = small_cfg(1);
    Rng rng(1);
    EXPECT_THROW(rrt_plan({30.0, 50.0}, {95.0, 95.0}, w, SamplingRegion(w.bounds()), cfg, rng), ConfigError);
    EXPECT_THROW(rrt_plan({5.0, 5.0}, {150.0, 95.0}, w, SamplingRegion(w.bounds()), cfg, rng), ConfigError);
    cfg.goal_bias = 1.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Simplify, EmptyWorldZigZagBecomesStraight) {
    World w(100.0, 100.0);
    PriorPath zig({{0.0, 0.0}, {10.0, 20.0}, {20.0, 0.0}, {30.0, 20.0}, {40.0, 0.0}});
    PriorPath s = simplify_path(zig, w, 1.0);
    EXPECT_EQ(s, PriorPath({{0.0, 0.0}, {40.0, 0.0}}));
    EXPECT_EQ(simplify_path(s, w, 1.0), s);
}

TEST(Simplify, ShorterCollisionFreeIdempotent) {
    World w = clutter();
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RRTConfig cfg = small_cfg(seed);
        Rng rng(seed);
        auto r = rrt_plan({5.0, 5.0}, {95.0, 95.0}, w, SamplingRegion(w.bounds()), cfg, rng);
        ASSERT_TRUE(r.path);
        PriorPath s = simplify_path(*r.path, w, cfg.inflation);
        EXPECT_LE(s.total_length(), r.path->total_length());
        EXPECT_TRUE(path_collision_free(s, w, cfg.inflation));
        EXPECT_EQ(s.front(), r.path->front());
        EXPECT_EQ(s.back(), r.path->back());
        EXPECT_EQ(simplify_path(s, w, cfg.inflation), s);
        EXPECT_GE(s.total_length(), distance(s.front(), s.back()));
    }
}

TEST(Subdivide, KeepsPolylineAndBalancesCorners) {
    PriorPath p({{0.0, 0.0}, {12.0, 0.0}, {12.0, 3.0}, {30.0, 3.0}});
    PriorPath g = subdivide_path(p, 5.0);
    EXPECT_NEAR(g.total_length(), p.total_length(), 1e-9);
    for (std::size_t i = 0; i < g.segment_count(); ++i) {
        EXPECT_LE(g.segment_length(i), 5.0 + 1e-9);
        // Every new vertex lies on the original polyline.
        EXPECT_NEAR(p.distance_to(g.vertices()[i]), 0.0, 1e-9);
    }
    // Pieces on both sides of an original vertex have equal length.
    for (std::size_t i = 1; i + 1 < g.vertices().size(); ++i) {
        Point2 v = g.vertices()[i];
        if (v == Point2(12.0, 0.0) || v == Point2(12.0, 3.0)) {
            EXPECT_NEAR(g.segment_length(i - 1), g.segment_length(i), 1e-9);
        }
    }
    EXPECT_THROW(subdivide_path(p, 0.0), ConfigError);
}

TEST(Splice, ConnectsToVisibleVertex) {
    World w(100.0, 100.0, {ConvexPolygon::box({40.0, 0.0}, {45.0, 60.0})});
    PriorPath p = subdivide_path(PriorPath({{10.0, 50.0}, {42.5, 80.0}, {90.0, 50.0}}), 5.0);
    auto s = splice_path({20.0, 30.0}, p, w, 2.0, 5.0);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->front(), Point2(20.0, 30.0));
    EXPECT_EQ(s->back(), p.back());
    EXPECT_TRUE(path_collision_free(*s, w, 2.0));
    for (std::size_t i = 0; i < s->segment_count(); ++i) {
        EXPECT_LE(s->segment_length(i), 5.0 + 1e-9);
    }
    // A start already on the path keeps the rest of the path.
    auto on = splice_path(p.vertices()[3], p, w, 2.0, 5.0);
    ASSERT_TRUE(on);
    EXPECT_EQ(on->vertices().size(), p.vertices().size() - 3);
}

TEST(Splice, NothingVisible) {
    World w(100.0, 100.0,
            {ConvexPolygon::box({0.0, 20.0}, {100.0, 25.0})});
    PriorPath p({{10.0, 50.0}, {90.0, 50.0}});
    EXPECT_FALSE(splice_path({10.0, 10.0}, p, w, 1.0, 5.0));
}

TEST(ShrinkRegion, Examples) {
    Rect base{{0.0, 0.0}, {100.0, 100.0}};
    SamplingRegion r(base);
    Point2 a{20.0, 50.0};
    Point2 b{80.0, 50.0};
    SamplingRegion tight = shrink_region(r, 60.0, a, b);
    EXPECT_TRUE(tight.contains({50.0, 50.0}));
    EXPECT_FALSE(tight.contains({50.0, 50.001}));
    EXPECT_THROW(shrink_region(r, 59.0, a, b), ConfigError);

    SamplingRegion loose = shrink_region(r, base.diagonal() + 60.0, a, b);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-10.0, 110.0);
    for (int i = 0; i < 10000; ++i) {
        Point2 p{u(rng), u(rng)};
        EXPECT_EQ(loose.contains(p), r.contains(p));
    }
}

TEST(ShrinkRegion, RejectionOracle) {
    SamplingRegion r(Rect{{0.0, 0.0}, {100.0, 100.0}});
    Point2 a{10.0, 20.0};
    Point2 b{90.0, 70.0};
    SamplingRegion s = shrink_region(r, 110.0, a, b);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-10.0, 110.0);
    for (int i = 0; i < 10000; ++i) {
        Point2 p{u(rng), u(rng)};
        if (s.contains(p)) {
            EXPECT_TRUE(r.contains(p));
            EXPECT_LE(distance(p, a) + distance(p, b), 110.0);
        }
    }
}

TEST(SampleRegion, UniformOverBase) {
    SamplingRegion r(Rect{{0.0, 0.0}, {30.0, 10.0}});
    Rng rng(12345);
    constexpr int kDraws = 100000;
    std::array<int, 100> counts{};
    for (int i = 0; i < kDraws; ++i) {
        Point2 p = sample_region(r, rng);
        ASSERT_TRUE(r.contains(p));
        int cx = std::min(9, static_cast<int>(p.x / 3.0));
        int cy = std::min(9, static_cast<int>(p.y / 1.0));
        ++counts[static_cast<std::size_t>(cy * 10 + cx)];
    }
    double expected = kDraws / 100.0;
    double chi2 = 0.0;
    for (int c : counts) {
        chi2 += (c - expected) * (c - expected) / expected;
    }
    // 99 degrees of freedom: the 0.99 quantile is 134.642.
    EXPECT_LT(chi2, 134.642);
}

TEST(SampleRegion, InsideEveryEllipseAndDeterministic) {
    SamplingRegion r = SamplingRegion(Rect{{0.0, 0.0}, {100.0, 100.0}})
                           .intersected(EllipseRegion({10.0, 10.0}, {90.0, 90.0}, 130.0))
                           .intersected(EllipseRegion({10.0, 90.0}, {90.0, 10.0}, 125.0));
    Rng a(5);
    Rng b(5);
    for (int i = 0; i < 2000; ++i) {
        Point2 p = sample_region(r, a);
        EXPECT_EQ(p, sample_region(r, b));
        for (const auto& e : r.ellipses()) {
            EXPECT_TRUE(point_in_ellipse(p, e));
        }
    }
}

TEST(SampleRegion, DegenerateRegionThrows) {
    SamplingRegion r = SamplingRegion(Rect{{0.0, 0.0}, {100.0, 100.0}})
                           .intersected(EllipseRegion({10.0, 10.0}, {90.0, 10.0}, 80.0));
    Rng rng(1);
    EXPECT_THROW(sample_region(r, rng), RegionTooSmall);
}

TEST(IteratePaths, SingleIterationMatchesOneRrt) {
    World w = clutter();
    RRTConfig cfg = small_cfg(21);
    auto its = iterate_paths({5.0, 5.0}, {95.0, 95.0}, w, 1, cfg);
    ASSERT_EQ(its.size(), 1u);
    Rng rng(cfg.seed);
    auto r = rrt_plan({5.0, 5.0}, {95.0, 95.0}, w, SamplingRegion(w.bounds()), cfg, rng);
    ASSERT_TRUE(r.path && its[0].path);
    EXPECT_EQ(*its[0].path, simplify_path(*r.path, w, cfg.inflation));
    EXPECT_EQ(its[0].node_count, r.node_count);
    EXPECT_THROW(iterate_paths({5.0, 5.0}, {95.0, 95.0}, w, 0, cfg), ConfigError);
}

TEST(IteratePaths, RegionsNest) {
    World w = clutter();
    auto its = iterate_paths({5.0, 5.0}, {95.0, 95.0}, w, 6, small_cfg(4));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (std::size_t k = 1; k < its.size(); ++k) {
        for (int i = 0; i < 10000; ++i) {
            Point2 p{u(rng), u(rng)};
            if (its[k].region.contains(p)) {
                ASSERT_TRUE(its[k - 1].region.contains(p));
            }
        }
    }
}
