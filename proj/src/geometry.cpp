#include "apa/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

#include "apa/errors.hpp"

namespace apa {

namespace {

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

double orient(Point2 a, Point2 b, Point2 c) { return (b - a).cross(c - a); }

bool on_segment(Point2 a, Point2 b, Point2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

/// 1 strictly inside, 0 on boundary, -1 outside.
int polygon_side(Point2 s, const ConvexPolygon& poly) {
    bool on_edge = false;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        Segment e = poly.edge(i);
        double c = orient(e.start(), e.end(), s);
        if (c < 0.0) {
            return -1;
        }
        if (c == 0.0) {
            on_edge = true;
        }
    }
    return on_edge ? 0 : 1;
}

}  // namespace

Segment::Segment(Point2 start, Point2 end) : start_(start), end_(end), length_((end - start).norm()) {
    if (!finite(start) || !finite(end)) {
        throw ConfigError("segment endpoints must be finite");
    }
    if (!(length_ > 0.0)) {
        throw ConfigError("segment must have positive length");
    }
}

Point2 Segment::closest_point(Point2 p) const {
    Vec2 d = end_ - start_;
    double t = (p - start_).dot(d) / d.squared_norm();
    t = std::clamp(t, 0.0, 1.0);
    return start_ + d * t;
}

PriorPath::PriorPath(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) {
        throw ConfigError("prior path needs at least two vertices");
    }
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (!finite(vertices_[i])) {
            throw ConfigError("prior path vertex " + std::to_string(i) + " is not finite");
        }
        if (i > 0) {
            if (vertices_[i] == vertices_[i - 1]) {
                throw ConfigError("prior path has repeated consecutive vertex " + std::to_string(i));
            }
            lengths_.push_back((vertices_[i] - vertices_[i - 1]).norm());
            total_length_ += lengths_.back();
        }
    }
}

double PriorPath::distance_to(Point2 p) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < segment_count(); ++i) {
        best = std::min(best, distance(p, segment(i).closest_point(p)));
    }
    return best;
}

Circle::Circle(Point2 c, double r) : center(c), radius(r) {
    if (!finite(c) || !std::isfinite(r) || !(r > 0.0)) {
        throw ConfigError("circle needs a finite center and positive radius");
    }
}

ConvexPolygon::ConvexPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) {
        throw ConfigError("polygon needs at least 3 vertices");
    }
    for (auto& v : vertices_) {
        if (!finite(v)) {
            throw ConfigError("polygon vertex is not finite");
        }
    }
    double area2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        area2 += vertices_[i].cross(vertices_[(i + 1) % n]);
    }
    if (area2 == 0.0) {
        throw ConfigError("polygon has zero area");
    }
    if (area2 < 0.0) {
        std::reverse(vertices_.begin(), vertices_.end());
    }
    // Every turn strictly left and total turning exactly one revolution.
    double turning = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = vertices_[(i + 1) % n] - vertices_[i];
        Vec2 b = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
        if (!(a.cross(b) > 0.0)) {
            throw ConfigError("polygon is not strictly convex");
        }
        turning += std::atan2(a.cross(b), a.dot(b));
    }
    if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-6) {
        throw ConfigError("polygon is self-intersecting");
    }
    for (Point2 v : vertices_) {
        center_ += v / static_cast<double>(n);
    }
    for (Point2 v : vertices_) {
        radius_ = std::max(radius_, distance(v, center_));
    }
}

ConvexPolygon ConvexPolygon::box(Point2 lo, Point2 hi) {
    return ConvexPolygon({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}});
}

World::World(double width, double height, std::vector<Obstacle> obstacles)
    : bounds_{{0.0, 0.0}, {width, height}}, obstacles_(std::move(obstacles)) {
    if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height)) {
        throw ConfigError("world bounds must have positive area");
    }
}

void World::remove_obstacle(std::size_t index) {
    if (index >= obstacles_.size()) {
        throw ConfigError("obstacle index " + std::to_string(index) + " out of range");
    }
    obstacles_.erase(obstacles_.begin() + static_cast<std::ptrdiff_t>(index));
}

EllipseRegion::EllipseRegion(Point2 f1, Point2 f2, double major) : focus1(f1), focus2(f2), major_len(major) {
    if (!finite(f1) || !finite(f2) || !std::isfinite(major)) {
        throw ConfigError("ellipse parameters must be finite");
    }
    if (major < distance(f1, f2)) {
        throw ConfigError("ellipse major axis shorter than focal distance");
    }
}

double EllipseRegion::semi_minor() const {
    double a = semi_major();
    double c = 0.5 * distance(focus1, focus2);
    return std::sqrt(std::max(0.0, a * a - c * c));
}

double EllipseRegion::area() const { return std::numbers::pi * semi_major() * semi_minor(); }

bool SamplingRegion::contains(Point2 p) const {
    if (!base_.contains(p)) {
        return false;
    }
    return std::all_of(ellipses_.begin(), ellipses_.end(),
                       [&](const EllipseRegion& e) { return point_in_ellipse(p, e); });
}

SamplingRegion SamplingRegion::intersected(EllipseRegion e) const {
    SamplingRegion out = *this;
    out.ellipses_.push_back(e);
    return out;
}

double elliptic_distance(Point2 s, const Segment& seg) {
    return (distance(s, seg.start()) + distance(s, seg.end())) / seg.length();
}

NearestPoint nearest_point_on_obstacle(Point2 s, const Obstacle& ob) {
    if (const auto* c = std::get_if<Circle>(&ob)) {
        Vec2 d = s - c->center;
        double len = d.norm();
        if (len == 0.0) {
            return {c->center + Vec2{c->radius, 0.0}, 0.0, true};
        }
        Point2 p = c->center + d * (c->radius / len);
        if (len < c->radius) {
            return {p, 0.0, true};
        }
        return {p, len - c->radius, false};
    }
    const auto& poly = std::get<ConvexPolygon>(ob);
    Point2 best{};
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        Point2 q = poly.edge(i).closest_point(s);
        double d = distance(s, q);
        if (d < best_d) {
            best_d = d;
            best = q;
        }
    }
    int side = polygon_side(s, poly);
    if (side >= 0) {
        return {best, 0.0, side > 0};
    }
    return {best, best_d, false};
}

namespace {

// Lower bound on the distance from `s` to the obstacle, from its bounding circle.
double distance_lower_bound(Point2 s, const Obstacle& ob) {
    if (const auto* c = std::get_if<Circle>(&ob)) {
        return distance(s, c->center) - c->radius;
    }
    const auto& poly = std::get<ConvexPolygon>(ob);
    return distance(s, poly.bounding_center()) - poly.bounding_radius();
}

// Slack that keeps the bounding-circle shortcut from changing results by rounding.
constexpr double kBoundSlack = 1e-6;

}  // namespace

double clearance(Point2 s, const World& world) {
    double best = world.bounds().diagonal();
    for (const auto& ob : world.obstacles()) {
        if (distance_lower_bound(s, ob) > best + kBoundSlack) {
            continue;
        }
        best = std::min(best, nearest_point_on_obstacle(s, ob).distance);
    }
    return best;
}

bool segments_intersect(const Segment& a, const Segment& b) {
    Point2 p1 = a.start(), p2 = a.end(), p3 = b.start(), p4 = b.end();
    double d1 = orient(p3, p4, p1);
    double d2 = orient(p3, p4, p2);
    double d3 = orient(p1, p2, p3);
    double d4 = orient(p1, p2, p4);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    return (d1 == 0 && on_segment(p3, p4, p1)) || (d2 == 0 && on_segment(p3, p4, p2)) ||
           (d3 == 0 && on_segment(p1, p2, p3)) || (d4 == 0 && on_segment(p1, p2, p4));
}

double segment_distance(const Segment& a, const Segment& b) {
    if (segments_intersect(a, b)) {
        return 0.0;
    }
    return std::min({distance(a.start(), b.closest_point(a.start())),
                     distance(a.end(), b.closest_point(a.end())),
                     distance(b.start(), a.closest_point(b.start())),
                     distance(b.end(), a.closest_point(b.end()))});
}

double segment_obstacle_distance(const Segment& seg, const Obstacle& ob) {
    if (const auto* c = std::get_if<Circle>(&ob)) {
        return std::max(0.0, distance(c->center, seg.closest_point(c->center)) - c->radius);
    }
    const auto& poly = std::get<ConvexPolygon>(ob);
    if (polygon_side(seg.start(), poly) >= 0 || polygon_side(seg.end(), poly) >= 0) {
        return 0.0;
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        best = std::min(best, segment_distance(seg, poly.edge(i)));
        if (best == 0.0) {
            break;
        }
    }
    return best;
}

bool segment_collision_free(const Segment& seg, const World& world, double inflation) {
    for (const auto& ob : world.obstacles()) {
        if (distance_lower_bound(seg.start(), ob) - seg.length() > inflation + kBoundSlack) {
            continue;
        }
        if (segment_obstacle_distance(seg, ob) <= inflation) {
            return false;
        }
    }
    return true;
}

bool path_collision_free(const PriorPath& path, const World& world, double inflation) {
    for (std::size_t i = 0; i < path.segment_count(); ++i) {
        if (!segment_collision_free(path.segment(i), world, inflation)) {
            return false;
        }
    }
    return true;
}

bool point_in_ellipse(Point2 p, const EllipseRegion& e) {
    return distance(p, e.focus1) + distance(p, e.focus2) <= e.major_len;
}

}  // namespace apa
