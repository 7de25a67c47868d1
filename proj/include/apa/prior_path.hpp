#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "apa/geometry.hpp"

namespace apa {

using Rng = std::mt19937_64;

/// Clearance margin added to the robot inflation when growing prior paths, so
/// the field-generated plan may drift from the path without touching obstacles.
inline constexpr double kPriorPathMargin = 2.0;

struct RRTConfig {
    double step_size = 5.0;
    double goal_bias = 0.05;
    int max_iters = 10000;
    double goal_radius = 2.0;
    double inflation = kDefaultInflation + kPriorPathMargin;
    /// Longest piece of the guide path handed to the potential field.
    double max_piece = 5.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct RRTNode {
    Point2 point;
    std::optional<std::size_t> parent;
};

struct RRTTree {
    std::vector<RRTNode> nodes;
};

struct RRTResult {
    std::optional<PriorPath> path;
    std::size_t node_count = 0;
    int iterations_used = 0;
    RRTTree tree;
};

/// Uniform sample from the region by rejection. The proposal is the smallest
/// of the base rectangle and the ellipses; throws RegionTooSmall after 1e5
/// consecutive rejections or when the region has zero area.
Point2 sample_region(const SamplingRegion& region, Rng& rng);

/// Plain RRT inside `region`. Throws ConfigError when start or goal is in
/// collision or outside the region. A region that degenerates mid-search ends
/// the search without a path.
RRTResult rrt_plan(Point2 start, Point2 goal, const World& world, const SamplingRegion& region,
                   const RRTConfig& cfg, Rng& rng);

/// Greedy shortcutting: from each anchor jump to the farthest later vertex
/// that is reachable in a straight collision-free line.
PriorPath simplify_path(const PriorPath& path, const World& world, double inflation);

/// Splits every segment into collinear pieces no longer than `max_piece`.
/// The two pieces meeting at each original vertex have equal length, so the
/// elliptic distance hands over to the next segment right after the vertex.
/// The polyline itself (and its length) is unchanged.
PriorPath subdivide_path(const PriorPath& path, double max_piece);

/// Joins `from` to `path` with a straight connector to the vertex that
/// minimizes connector length plus remaining path length among the vertices
/// visible from `from`; the rest of `path` is kept as is. The connector is cut
/// into pieces no longer than `max_piece`, the last one no longer than the
/// piece after the junction. Empty when no vertex is visible.
std::optional<PriorPath> splice_path(Point2 from, const PriorPath& path, const World& world, double inflation,
                                     double max_piece);

/// Appends the ellipse with foci start/goal and major axis `path_length`.
SamplingRegion shrink_region(const SamplingRegion& region, double path_length, Point2 start, Point2 goal);

struct PathIteration {
    std::optional<PriorPath> path;   ///< simplified path; empty when the RRT failed
    std::optional<PriorPath> guide;  ///< `path` subdivided for the directive force
    std::size_t node_count = 0;
    SamplingRegion region;          ///< region sampled during this iteration
};

/// Incremental form of `iterate_paths`: each `next()` runs one RRT in the
/// current region, simplifies the result and shrinks the region with it.
class PathGenerator {
public:
    PathGenerator(Point2 start, Point2 goal, const World& world, RRTConfig cfg);

    PathIteration next();
    const SamplingRegion& region() const { return region_; }
    /// Forgets all ellipse constraints (used after the world changes).
    void reset_region();
    void set_world(const World& world);
    /// Inflation actually used (shrunk when start or goal is close to an obstacle).
    double inflation() const { return cfg_.inflation; }

private:
    void fit_inflation();

    Point2 start_;
    Point2 goal_;
    const World* world_;
    RRTConfig cfg_;
    double base_inflation_;
    SamplingRegion region_;
    Rng rng_;
};

std::vector<PathIteration> iterate_paths(Point2 start, Point2 goal, const World& world, int iters,
                                         const RRTConfig& cfg);

}  // namespace apa
