#include "apa/svg.hpp"

#include <cmath>
#include <sstream>

#include "apa/errors.hpp"
#include "apa/scenario.hpp"

namespace apa {

namespace {

constexpr const char* kPathColor = "#2b7bb9";
constexpr const char* kPlanColor = "#d9480f";
constexpr const char* kGlyphColor = "#888888";

class Canvas {
public:
    Canvas(const Rect& bounds, double scale) : bounds_(bounds), scale_(scale) { os_.precision(6); }

    double x(double v) const { return (v - bounds_.lo.x) * scale_; }
    double y(double v) const { return (bounds_.hi.y - v) * scale_; }
    double len(double v) const { return v * scale_; }

    std::ostream& out() { return os_; }

    void polyline(const std::vector<Point2>& pts, const char* color, double width, const char* extra = "") {
        os_ << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"" << extra
            << " points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            os_ << (i ? " " : "") << x(pts[i].x) << ',' << y(pts[i].y);
        }
        os_ << "\"/>\n";
    }

    std::string str() const { return os_.str(); }

private:
    Rect bounds_;
    double scale_;
    std::ostringstream os_;
};

}  // namespace

std::vector<Glyph> force_glyphs(const World& world, const GlyphField& g) {
    if (!(g.spacing > 0.0)) {
        throw ConfigError("glyph spacing must be positive");
    }
    if (g.field.mode == FieldMode::prior && !g.path) {
        throw ConfigError("prior-mode glyphs need a prior path");
    }
    const Rect& b = world.bounds();
    const PriorPath* path = g.path ? &*g.path : nullptr;
    std::vector<Glyph> out;
    for (double px = b.lo.x + 0.5 * g.spacing; px < b.hi.x; px += g.spacing) {
        for (double py = b.lo.y + 0.5 * g.spacing; py < b.hi.y; py += g.spacing) {
            Point2 p{px, py};
            if (clearance(p, world) <= 0.0) {
                continue;
            }
            Vec2 f = total_force(p, g.goal, world, path, g.weights, g.field);
            double n = f.norm();
            if (!(n > g.field.min_force) || !std::isfinite(n)) {
                continue;
            }
            out.push_back({p, f / n});
        }
    }
    return out;
}

std::string render_svg(const World& world, const SvgScene& scene) {
    if (!(scene.pixels_per_meter > 0.0)) {
        throw ConfigError("pixels_per_meter must be positive");
    }
    const Rect& b = world.bounds();
    Canvas c(b, scene.pixels_per_meter);
    auto& os = c.out();
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << c.len(b.width()) << "\" height=\""
       << c.len(b.height()) << "\" viewBox=\"0 0 " << c.len(b.width()) << ' ' << c.len(b.height()) << "\">\n";
    os << "  <rect id=\"bounds\" x=\"0\" y=\"0\" width=\"" << c.len(b.width()) << "\" height=\"" << c.len(b.height())
       << "\" fill=\"white\" stroke=\"black\" stroke-width=\"1\"/>\n";

    for (const auto& ob : world.obstacles()) {
        if (const auto* circle = std::get_if<Circle>(&ob)) {
            os << "  <circle class=\"obstacle\" cx=\"" << c.x(circle->center.x) << "\" cy=\"" << c.y(circle->center.y)
               << "\" r=\"" << c.len(circle->radius) << "\" fill=\"#444444\"/>\n";
        } else {
            os << "  <polygon class=\"obstacle\" fill=\"#444444\" points=\"";
            const auto& v = std::get<ConvexPolygon>(ob).vertices();
            for (std::size_t i = 0; i < v.size(); ++i) {
                os << (i ? " " : "") << c.x(v[i].x) << ',' << c.y(v[i].y);
            }
            os << "\"/>\n";
        }
    }

    if (scene.glyphs) {
        double arrow = 0.4 * scene.glyphs->spacing;
        for (const auto& g : force_glyphs(world, *scene.glyphs)) {
            Point2 tip = g.at + g.direction * arrow;
            Vec2 back = g.direction * (-0.3 * arrow);
            Vec2 side{-g.direction.y * 0.15 * arrow, g.direction.x * 0.15 * arrow};
            c.polyline({g.at, tip}, kGlyphColor, 1.0, " class=\"glyph\"");
            c.polyline({tip + back + side, tip, tip + back - side}, kGlyphColor, 1.0, " class=\"glyph\"");
        }
    }
    for (const auto& p : scene.prior_paths) {
        c.polyline(p.vertices(), kPathColor, 1.5, " class=\"prior-path\" stroke-dasharray=\"6,3\"");
    }
    for (const auto& plan : scene.plans) {
        std::vector<Point2> pts;
        for (const auto& s : plan.states) {
            pts.push_back(s.position);
        }
        if (pts.size() == 1) {
            pts.push_back(pts.front());
        }
        if (!pts.empty()) {
            c.polyline(pts, kPlanColor, 2.0, " class=\"plan\"");
        }
    }
    auto marker = [&](Point2 p, const char* color, const char* cls) {
        os << "  <circle class=\"" << cls << "\" cx=\"" << c.x(p.x) << "\" cy=\"" << c.y(p.y) << "\" r=\"5\" fill=\""
           << color << "\"/>\n";
    };
    if (scene.start) {
        marker(*scene.start, "#2f9e44", "start");
    }
    if (scene.goal) {
        marker(*scene.goal, "#c92a2a", "goal");
    }

    std::vector<std::pair<std::string, std::string>> legend;
    if (!world.obstacles().empty()) {
        legend.emplace_back("#444444", "obstacle");
    }
    if (scene.glyphs) {
        legend.emplace_back(kGlyphColor, "force direction");
    }
    if (!scene.prior_paths.empty()) {
        legend.emplace_back(kPathColor, "prior path");
    }
    if (!scene.plans.empty()) {
        legend.emplace_back(kPlanColor, "plan");
    }
    if (scene.start) {
        legend.emplace_back("#2f9e44", "start");
    }
    if (scene.goal) {
        legend.emplace_back("#c92a2a", "goal");
    }
    if (!legend.empty()) {
        os << "  <g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
        for (std::size_t i = 0; i < legend.size(); ++i) {
            double ly = 16.0 + 16.0 * static_cast<double>(i);
            os << "    <rect x=\"8\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\"" << legend[i].first
               << "\"/>\n";
            os << "    <text x=\"24\" y=\"" << ly << "\">" << legend[i].second << "</text>\n";
        }
        os << "  </g>\n";
    }
    os << "</svg>\n";
    return c.str();
}

void export_svg(const World& world, const SvgScene& scene, const std::filesystem::path& file) {
    write_text(file, render_svg(world, scene));
}

}  // namespace apa
