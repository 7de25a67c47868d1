#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "apa/geometry.hpp"

namespace apa {

enum class FieldMode { naive, prior };
enum class Kinematics { holonomic, heading_limited };

/// Coefficients of the force sources. `betas` has one entry per obstacle.
struct ForceWeights {
    double alpha = 1.0;
    std::vector<double> betas;
    double gamma = 1.0;

    /// Same repulsive coefficient for every obstacle.
    static ForceWeights uniform(std::size_t obstacles, double alpha, double beta, double gamma);
    /// Defaults used when no optimized weights are available.
    static ForceWeights defaults(std::size_t obstacles, FieldMode mode);
};

inline constexpr double kNaiveDefaultBeta = 1.0e4;
inline constexpr double kPriorDefaultBeta = 1.0;

struct FieldConfig {
    double dt = 0.1;
    double speed = 10.0;
    double goal_radius = 2.0;
    int max_steps = 5000;
    int trap_window = 50;
    double trap_progress = -1.0;  ///< < 0 selects 0.1 * speed * dt * trap_window
    double min_force = 1e-9;
    double min_dist = 0.05;
    double inflation = kDefaultInflation;
    FieldMode mode = FieldMode::naive;
    Kinematics kinematics = Kinematics::holonomic;
    double max_turn_rate = 1.0;
    /// Force evaluations per plan step; the field is integrated in
    /// `substeps` equal slices of dt and one state is recorded per dt.
    int substeps = 1;

    void validate() const;
    double effective_trap_progress() const {
        return trap_progress >= 0.0 ? trap_progress : 0.1 * speed * dt * trap_window;
    }
};

struct State {
    Point2 position;
    double heading = 0.0;
    double t = 0.0;
};

enum class PlanOutcome { reached, trapped, collided, exhausted_steps };

std::string_view to_string(PlanOutcome o);
std::optional<PlanOutcome> outcome_from_string(std::string_view s);

struct Plan {
    std::vector<State> states;
    PlanOutcome outcome = PlanOutcome::exhausted_steps;

    bool reached() const { return outcome == PlanOutcome::reached; }
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

Vec2 attractive_force(Point2 s, Point2 goal, double alpha);

/// beta * dir / d^3 with d = max(|s - s_ob|, min_dist) and dir pointing from
/// the nearest obstacle point toward `s`. Falls back to +x when s == s_ob.
Vec2 repulsive_force(Point2 s, const Obstacle& ob, double beta, double min_dist);

/// Index of the segment minimizing the elliptic distance; lowest index wins ties.
std::size_t nearest_segment(Point2 s, const PriorPath& path);

/// Unit vector along the nearest segment of `path`.
Vec2 directive_force(Point2 s, const PriorPath& path);

Vec2 total_force(Point2 s, Point2 goal, const World& world, const PriorPath* path, const ForceWeights& w,
                 const FieldConfig& cfg);

/// Transfer function: constant-speed steering along the force direction.
State step(const State& state, Vec2 force, const FieldConfig& cfg);

/// Follows the force field from `start` until the goal is reached, the plan
/// gets trapped, collides, or runs out of steps. Throws PlanningError when
/// `start` is already in collision.
Plan generate_plan(const State& start, Point2 goal, const World& world, const PriorPath* path,
                   const ForceWeights& w, const FieldConfig& cfg);

}  // namespace apa
