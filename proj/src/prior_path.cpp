#include "apa/prior_path.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "apa/errors.hpp"

namespace apa {

namespace {

constexpr int kMaxRejections = 100000;

Point2 sample_ellipse(const EllipseRegion& e, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Point2 center = (e.focus1 + e.focus2) * 0.5;
    Vec2 axis = e.focus2 - e.focus1;
    double len = axis.norm();
    Vec2 u = len > 0.0 ? axis / len : Vec2{1.0, 0.0};
    Vec2 v{-u.y, u.x};
    double r = std::sqrt(unit(rng));
    double theta = 2.0 * std::numbers::pi * unit(rng);
    return center + u * (e.semi_major() * r * std::cos(theta)) + v * (e.semi_minor() * r * std::sin(theta));
}

Point2 sample_rect(const Rect& rect, Rng& rng) {
    std::uniform_real_distribution<double> ux(rect.lo.x, rect.hi.x);
    std::uniform_real_distribution<double> uy(rect.lo.y, rect.hi.y);
    double x = ux(rng);
    double y = uy(rng);
    return {x, y};
}

}  // namespace

void RRTConfig::validate() const {
    if (!(step_size > 0.0)) {
        throw ConfigError("rrt: step_size must be positive");
    }
    if (!(goal_bias >= 0.0 && goal_bias < 1.0)) {
        throw ConfigError("rrt: goal_bias must be in [0, 1)");
    }
    if (max_iters <= 0) {
        throw ConfigError("rrt: max_iters must be positive");
    }
    if (!(max_piece > 0.0)) {
        throw ConfigError("rrt: max_piece must be positive");
    }
    if (!(goal_radius > 0.0) || inflation < 0.0) {
        throw ConfigError("rrt: goal_radius must be positive and inflation non-negative");
    }
}

Point2 sample_region(const SamplingRegion& region, Rng& rng) {
    // Proposal: whichever constraint has the smallest area. Rejecting against
    // the others keeps the draw uniform over the intersection.
    const EllipseRegion* proposal = nullptr;
    double best_area = region.base().width() * region.base().height();
    for (const auto& e : region.ellipses()) {
        double a = e.area();
        if (a < best_area) {
            best_area = a;
            proposal = &e;
        }
    }
    if (!(best_area > 0.0)) {
        throw RegionTooSmall("sampling region has zero area");
    }
    for (int i = 0; i < kMaxRejections; ++i) {
        Point2 p = proposal != nullptr ? sample_ellipse(*proposal, rng) : sample_rect(region.base(), rng);
        if (region.contains(p)) {
            return p;
        }
    }
    throw RegionTooSmall("sampling region rejected 100000 consecutive draws");
}

RRTResult rrt_plan(Point2 start, Point2 goal, const World& world, const SamplingRegion& region,
                   const RRTConfig& cfg, Rng& rng) {
    cfg.validate();
    if (!region.contains(start) || !region.contains(goal)) {
        throw ConfigError("rrt: start and goal must lie inside the sampling region");
    }
    if (clearance(start, world) <= cfg.inflation || clearance(goal, world) <= cfg.inflation) {
        throw ConfigError("rrt: start or goal is in collision");
    }

    RRTResult result;
    auto& nodes = result.tree.nodes;
    nodes.push_back({start, std::nullopt});
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int it = 1; it <= cfg.max_iters; ++it) {
        result.iterations_used = it;
        Point2 target;
        if (unit(rng) < cfg.goal_bias) {
            target = goal;
        } else {
            try {
                target = sample_region(region, rng);
            } catch (const RegionTooSmall&) {
                break;
            }
        }

        std::size_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            double d = (nodes[i].point - target).squared_norm();
            if (d < best) {
                best = d;
                nearest = i;
            }
        }
        Point2 from = nodes[nearest].point;
        Vec2 delta = target - from;
        double len = delta.norm();
        if (len == 0.0) {
            continue;
        }
        Point2 to = len <= cfg.step_size ? target : from + delta * (cfg.step_size / len);
        if (to == from || !segment_collision_free(Segment(from, to), world, cfg.inflation)) {
            continue;
        }
        nodes.push_back({to, nearest});

        if (distance(to, goal) > cfg.goal_radius) {
            continue;
        }
        if (to != goal && !segment_collision_free(Segment(to, goal), world, cfg.inflation)) {
            continue;
        }
        std::vector<Point2> pts;
        for (std::optional<std::size_t> i = nodes.size() - 1; i; i = nodes[*i].parent) {
            pts.push_back(nodes[*i].point);
        }
        std::reverse(pts.begin(), pts.end());
        if (pts.back() != goal) {
            pts.push_back(goal);
        }
        result.path.emplace(std::move(pts));
        break;
    }
    result.node_count = nodes.size();
    return result;
}

PriorPath simplify_path(const PriorPath& path, const World& world, double inflation) {
    const auto& v = path.vertices();
    std::vector<Point2> out{v.front()};
    std::size_t anchor = 0;
    while (anchor + 1 < v.size()) {
        std::size_t next = anchor + 1;
        for (std::size_t j = v.size() - 1; j > anchor + 1; --j) {
            if (v[j] != v[anchor] && segment_collision_free(Segment(v[anchor], v[j]), world, inflation)) {
                next = j;
                break;
            }
        }
        out.push_back(v[next]);
        anchor = next;
    }
    return PriorPath(std::move(out));
}

PriorPath subdivide_path(const PriorPath& path, double max_piece) {
    if (!(max_piece > 0.0)) {
        throw ConfigError("subdivide_path: max_piece must be positive");
    }
    const auto& v = path.vertices();
    // Length of the pieces on either side of each vertex (0 at the endpoints).
    std::vector<double> corner(v.size(), 0.0);
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        corner[i] = std::min({max_piece, 0.5 * path.segment(i - 1).length(), 0.5 * path.segment(i).length()});
    }
    std::vector<Point2> out{v.front()};
    auto push = [&](Point2 p) {
        if (p != out.back()) {
            out.push_back(p);
        }
    };
    for (std::size_t i = 0; i < path.segment_count(); ++i) {
        Segment seg = path.segment(i);
        Vec2 u = seg.direction();
        double head = corner[i];
        double tail = corner[i + 1];
        double middle = seg.length() - head - tail;
        if (head > 0.0) {
            push(seg.start() + u * head);
        }
        auto pieces = static_cast<int>(std::ceil(middle / max_piece - 1e-9));
        for (int k = 1; k < pieces; ++k) {
            push(seg.start() + u * (head + middle * k / pieces));
        }
        if (tail > 0.0 && middle > 0.0) {
            push(seg.start() + u * (seg.length() - tail));
        }
        push(seg.end());
    }
    return PriorPath(std::move(out));
}

std::optional<PriorPath> splice_path(Point2 from, const PriorPath& path, const World& world, double inflation,
                                     double max_piece) {
    if (!(max_piece > 0.0)) {
        throw ConfigError("splice_path: max_piece must be positive");
    }
    const auto& v = path.vertices();
    std::vector<double> suffix(v.size(), 0.0);
    for (std::size_t i = v.size() - 1; i-- > 0;) {
        suffix[i] = suffix[i + 1] + path.segment(i).length();
    }
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        order[i] = i;
    }
    if (auto hit = std::find(v.begin(), v.end(), from); hit != v.end()) {
        if (hit + 1 == v.end()) {
            return std::nullopt;
        }
        return PriorPath(std::vector<Point2>(hit, v.end()));
    }
    auto cost = [&](std::size_t i) { return distance(from, v[i]) + suffix[i]; };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cost(a) < cost(b); });

    for (std::size_t k : order) {
        if (v[k] != from && !segment_collision_free(Segment(from, v[k]), world, inflation)) {
            continue;
        }
        std::vector<Point2> out{from};
        auto push = [&](Point2 p) {
            if (distance(p, out.back()) > 1e-9) {
                out.push_back(p);
            }
        };
        if (v[k] != from) {
            double len = distance(from, v[k]);
            Vec2 u = (v[k] - from) / len;
            double tail = k + 1 < v.size() ? std::min(path.segment_length(k), 0.5 * len) : 0.0;
            double middle = len - tail;
            auto pieces = std::max(1, static_cast<int>(std::ceil(middle / max_piece - 1e-9)));
            for (int i = 1; i < pieces; ++i) {
                push(from + u * (middle * i / pieces));
            }
            if (tail > 0.0) {
                push(from + u * middle);
            }
        }
        for (std::size_t i = k; i < v.size(); ++i) {
            push(v[i]);
        }
        if (out.size() < 2) {
            return std::nullopt;  // `from` is the last vertex
        }
        return PriorPath(std::move(out));
    }
    return std::nullopt;
}

SamplingRegion shrink_region(const SamplingRegion& region, double path_length, Point2 start, Point2 goal) {
    if (path_length < distance(start, goal)) {
        throw ConfigError("shrink_region: path length shorter than the start-goal distance");
    }
    return region.intersected(EllipseRegion(start, goal, path_length));
}

PathGenerator::PathGenerator(Point2 start, Point2 goal, const World& world, RRTConfig cfg)
    : start_(start), goal_(goal), world_(&world), cfg_(cfg), base_inflation_(cfg.inflation), region_(world.bounds()),
      rng_(cfg.seed) {
    cfg_.validate();
    fit_inflation();
}

void PathGenerator::fit_inflation() {
    // Near an obstacle the margin would make the endpoints themselves invalid.
    double room = std::min(clearance(start_, *world_), clearance(goal_, *world_));
    cfg_.inflation = std::min(base_inflation_, 0.99 * room);
}

void PathGenerator::set_world(const World& world) {
    world_ = &world;
    fit_inflation();
}

PathIteration PathGenerator::next() {
    PathIteration it{std::nullopt, std::nullopt, 0, region_};
    RRTResult r = rrt_plan(start_, goal_, *world_, region_, cfg_, rng_);
    it.node_count = r.node_count;
    if (r.path) {
        PriorPath simplified = simplify_path(*r.path, *world_, cfg_.inflation);
        // Collinear vertex sums can round below the focal distance.
        double len = std::max(simplified.total_length(), distance(start_, goal_));
        region_ = shrink_region(region_, len, start_, goal_);
        it.guide.emplace(subdivide_path(simplified, cfg_.max_piece));
        it.path.emplace(std::move(simplified));
    }
    return it;
}

void PathGenerator::reset_region() { region_ = SamplingRegion(world_->bounds()); }

std::vector<PathIteration> iterate_paths(Point2 start, Point2 goal, const World& world, int iters,
                                         const RRTConfig& cfg) {
    if (iters < 1) {
        throw ConfigError("iterate_paths: iters must be at least 1");
    }
    PathGenerator gen(start, goal, world, cfg);
    std::vector<PathIteration> out;
    out.reserve(static_cast<std::size_t>(iters));
    for (int k = 0; k < iters; ++k) {
        out.push_back(gen.next());
    }
    return out;
}

}  // namespace apa
