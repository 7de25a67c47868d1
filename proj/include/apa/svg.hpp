#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "apa/geometry.hpp"
#include "apa/potential_field.hpp"

namespace apa {

struct Glyph {
    Point2 at;
    Vec2 direction;  ///< unit vector along the total force
};

/// Field used for the glyph grid.
struct GlyphField {
    Point2 goal;
    ForceWeights weights;
    FieldConfig field;
    std::optional<PriorPath> path;  ///< needed in prior mode
    double spacing = 10.0;
};

/// Unit force directions on a regular lattice (offset by half a spacing from
/// the lower-left corner). Points inside obstacles and points where the
/// force vanishes are skipped.
std::vector<Glyph> force_glyphs(const World& world, const GlyphField& g);

struct SvgScene {
    std::vector<PriorPath> prior_paths;
    std::vector<Plan> plans;
    std::optional<Point2> start;
    std::optional<Point2> goal;
    std::optional<GlyphField> glyphs;
    double pixels_per_meter = 2.0;
};

/// World bounds, obstacles, prior paths, plans, optional glyph grid and a
/// legend for whatever was drawn.
std::string render_svg(const World& world, const SvgScene& scene);
void export_svg(const World& world, const SvgScene& scene, const std::filesystem::path& file);

}  // namespace apa
