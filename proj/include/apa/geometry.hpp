#pragma once

// Core 2D types for the planner: points, segments, prior-path polylines,
// circle/convex-polygon obstacles, the world rectangle and the elliptic
// sampling regions used to restrict RRT sampling.

#include <cmath>
#include <span>
#include <variant>
#include <vector>

namespace apa {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;

    constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
    constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    constexpr double squared_norm() const { return x * x + y * y; }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

using Point2 = Vec2;

inline double distance(Point2 a, Point2 b) { return (a - b).norm(); }

/// Directed segment with strictly positive length.
class Segment {
public:
    Segment(Point2 start, Point2 end);

    Point2 start() const { return start_; }
    Point2 end() const { return end_; }
    double length() const { return length_; }
    /// Unit vector from start to end.
    Vec2 direction() const { return (end_ - start_) / length_; }
    Point2 closest_point(Point2 p) const;

private:
    Point2 start_;
    Point2 end_;
    double length_;
};

/// Polyline from start to goal; the source of the directive force.
class PriorPath {
public:
    explicit PriorPath(std::vector<Point2> vertices);

    const std::vector<Point2>& vertices() const { return vertices_; }
    std::size_t segment_count() const { return vertices_.size() - 1; }
    Segment segment(std::size_t i) const { return {vertices_[i], vertices_[i + 1]}; }
    double segment_length(std::size_t i) const { return lengths_[i]; }
    double total_length() const { return total_length_; }
    Point2 front() const { return vertices_.front(); }
    Point2 back() const { return vertices_.back(); }

    /// Euclidean distance from `p` to the polyline.
    double distance_to(Point2 p) const;

    bool operator==(const PriorPath& o) const { return vertices_ == o.vertices_; }

private:
    std::vector<Point2> vertices_;
    std::vector<double> lengths_;
    double total_length_ = 0.0;
};

struct Circle {
    Point2 center;
    double radius;

    Circle(Point2 c, double r);
};

/// Strictly convex polygon, stored counter-clockwise. Clockwise input is
/// reversed on construction; collinear or self-intersecting input throws.
class ConvexPolygon {
public:
    explicit ConvexPolygon(std::vector<Point2> vertices);

    const std::vector<Point2>& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    Segment edge(std::size_t i) const {
        return {vertices_[i], vertices_[(i + 1) % vertices_.size()]};
    }

    /// Circle around the vertex mean that contains the polygon.
    Point2 bounding_center() const { return center_; }
    double bounding_radius() const { return radius_; }

    /// Axis-aligned rectangle helper.
    static ConvexPolygon box(Point2 lo, Point2 hi);

private:
    std::vector<Point2> vertices_;
    Point2 center_;
    double radius_ = 0.0;
};

using Obstacle = std::variant<Circle, ConvexPolygon>;

struct Rect {
    Point2 lo{0.0, 0.0};
    Point2 hi{0.0, 0.0};

    double width() const { return hi.x - lo.x; }
    double height() const { return hi.y - lo.y; }
    double diagonal() const { return std::hypot(width(), height()); }
    bool contains(Point2 p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
};

class World {
public:
    World(double width, double height, std::vector<Obstacle> obstacles = {});

    const Rect& bounds() const { return bounds_; }
    const std::vector<Obstacle>& obstacles() const { return obstacles_; }
    std::size_t obstacle_count() const { return obstacles_.size(); }

    void add_obstacle(Obstacle ob) { obstacles_.push_back(std::move(ob)); }
    void remove_obstacle(std::size_t index);

private:
    Rect bounds_;
    std::vector<Obstacle> obstacles_;
};

/// Ellipse with foci `focus1`, `focus2` and major axis length `major_len`.
struct EllipseRegion {
    Point2 focus1;
    Point2 focus2;
    double major_len;

    EllipseRegion(Point2 f1, Point2 f2, double major);

    double semi_major() const { return 0.5 * major_len; }
    double semi_minor() const;
    double area() const;
};

/// Base rectangle intersected with every ellipse in `ellipses`.
class SamplingRegion {
public:
    explicit SamplingRegion(Rect base) : base_(base) {}

    const Rect& base() const { return base_; }
    const std::vector<EllipseRegion>& ellipses() const { return ellipses_; }

    bool contains(Point2 p) const;
    /// Returns a copy with `e` appended; never larger than `*this`.
    SamplingRegion intersected(EllipseRegion e) const;

private:
    Rect base_;
    std::vector<EllipseRegion> ellipses_;
};

/// Robot footprint 2.5 m x 5 m, covered by a disc of half the diagonal.
inline const double kDefaultInflation = 0.5 * std::hypot(2.5, 5.0);

/// (|s - a| + |s - b|) / |b - a|. Equals 1 exactly on the closed segment;
/// its level sets are ellipses with the segment endpoints as foci.
double elliptic_distance(Point2 s, const Segment& seg);

struct NearestPoint {
    Point2 point;       ///< closest point on the obstacle boundary
    double distance;    ///< 0 when `s` is inside or on the boundary
    bool inside;        ///< `s` strictly inside the obstacle
};

NearestPoint nearest_point_on_obstacle(Point2 s, const Obstacle& ob);

/// Minimum distance from `s` to any obstacle, capped at the bounds diagonal.
double clearance(Point2 s, const World& world);

/// Distance between a segment and an obstacle (0 when they intersect).
double segment_obstacle_distance(const Segment& seg, const Obstacle& ob);

/// True iff every point of `seg` stays strictly farther than `inflation`
/// from every obstacle.
bool segment_collision_free(const Segment& seg, const World& world, double inflation);

/// True iff all segments of `path` are collision-free.
bool path_collision_free(const PriorPath& path, const World& world, double inflation);

bool point_in_ellipse(Point2 p, const EllipseRegion& e);

/// Distance between two segments.
double segment_distance(const Segment& a, const Segment& b);

bool segments_intersect(const Segment& a, const Segment& b);

}  // namespace apa
