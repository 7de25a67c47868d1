#include "apa/potential_field.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

#include "apa/errors.hpp"

namespace apa {

ForceWeights ForceWeights::uniform(std::size_t obstacles, double alpha, double beta, double gamma) {
    return {alpha, std::vector<double>(obstacles, beta), gamma};
}

ForceWeights ForceWeights::defaults(std::size_t obstacles, FieldMode mode) {
    if (mode == FieldMode::naive) {
        return uniform(obstacles, 1.0, kNaiveDefaultBeta, 0.0);
    }
    return uniform(obstacles, 0.0, kPriorDefaultBeta, 1.0);
}

void FieldConfig::validate() const {
    if (!(dt > 0.0) || !(speed > 0.0) || !(goal_radius > 0.0) || max_steps <= 0) {
        throw ConfigError("field config: dt, speed, goal_radius and max_steps must be positive");
    }
    if (substeps < 1) {
        throw ConfigError("field config: substeps must be at least 1");
    }
    if (trap_window < 2) {
        throw ConfigError("field config: trap_window must be at least 2");
    }
    if (!(min_dist > 0.0) || inflation < 0.0) {
        throw ConfigError("field config: min_dist must be positive and inflation non-negative");
    }
    if (kinematics == Kinematics::heading_limited && !(max_turn_rate > 0.0)) {
        throw ConfigError("field config: max_turn_rate must be positive");
    }
}

std::string_view to_string(PlanOutcome o) {
    switch (o) {
        case PlanOutcome::reached: return "Reached";
        case PlanOutcome::trapped: return "Trapped";
        case PlanOutcome::collided: return "Collided";
        case PlanOutcome::exhausted_steps: return "ExhaustedSteps";
    }
    return "Unknown";
}

std::optional<PlanOutcome> outcome_from_string(std::string_view s) {
    for (auto o : {PlanOutcome::reached, PlanOutcome::trapped, PlanOutcome::collided,
                   PlanOutcome::exhausted_steps}) {
        if (to_string(o) == s) {
            return o;
        }
    }
    return std::nullopt;
}

double wrap_angle(double a) {
    constexpr double pi = std::numbers::pi;
    a = std::remainder(a, 2.0 * pi);
    if (a <= -pi) {
        a += 2.0 * pi;
    }
    return a;
}

Vec2 attractive_force(Point2 s, Point2 goal, double alpha) { return (goal - s) * alpha; }

Vec2 repulsive_force(Point2 s, const Obstacle& ob, double beta, double min_dist) {
    NearestPoint np = nearest_point_on_obstacle(s, ob);
    Vec2 away = s - np.point;
    double len = away.norm();
    Vec2 dir = len > 0.0 ? away / len : Vec2{1.0, 0.0};
    double d = std::max(len, min_dist);
    return dir * (beta / (d * d * d));
}

std::size_t nearest_segment(Point2 s, const PriorPath& path) {
    // Same sums as elliptic_distance, with each vertex distance computed once.
    const auto& v = path.vertices();
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    double d_start = distance(s, v[0]);
    for (std::size_t i = 0; i < path.segment_count(); ++i) {
        double d_end = distance(s, v[i + 1]);
        double d = (d_start + d_end) / path.segment_length(i);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
        d_start = d_end;
    }
    return best;
}

Vec2 directive_force(Point2 s, const PriorPath& path) {
    return path.segment(nearest_segment(s, path)).direction();
}

namespace {

// `segment` is the nearest prior-path segment when the caller already knows it.
Vec2 force_at(Point2 s, Point2 goal, const World& world, const PriorPath* path, const ForceWeights& w,
              const FieldConfig& cfg, std::optional<std::size_t> segment) {
    const auto& obstacles = world.obstacles();
    if (w.betas.size() != obstacles.size()) {
        throw ConfigError("force weights: " + std::to_string(w.betas.size()) + " betas for " +
                          std::to_string(obstacles.size()) + " obstacles");
    }
    Vec2 f;
    if (cfg.mode == FieldMode::naive) {
        f = attractive_force(s, goal, w.alpha);
    } else {
        if (path == nullptr) {
            throw ConfigError("prior mode requires a prior path");
        }
        f = path->segment(segment ? *segment : nearest_segment(s, *path)).direction() * w.gamma;
    }
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        f += repulsive_force(s, obstacles[i], w.betas[i], cfg.min_dist);
    }
    return f;
}

}  // namespace

Vec2 total_force(Point2 s, Point2 goal, const World& world, const PriorPath* path, const ForceWeights& w,
                 const FieldConfig& cfg) {
    return force_at(s, goal, world, path, w, cfg, std::nullopt);
}

State step(const State& state, Vec2 force, const FieldConfig& cfg) {
    State next = state;
    next.t = state.t + cfg.dt;
    double mag = force.norm();
    if (mag < cfg.min_force) {
        return next;
    }
    double desired = wrap_angle(std::atan2(force.y, force.x));
    if (cfg.kinematics == Kinematics::holonomic) {
        next.position = state.position + force * (cfg.speed * cfg.dt / mag);
        next.heading = desired;
        return next;
    }
    double max_delta = cfg.max_turn_rate * cfg.dt;
    double delta = std::clamp(wrap_angle(desired - state.heading), -max_delta, max_delta);
    next.heading = wrap_angle(state.heading + delta);
    next.position = state.position + Vec2{std::cos(next.heading), std::sin(next.heading)} * (cfg.speed * cfg.dt);
    return next;
}

namespace {

// Scalar that decreases as the robot advances: straight-line distance to the
// goal in naive mode, remaining arc length along the prior path in prior mode.
class ProgressMeter {
public:
    ProgressMeter(Point2 goal, const PriorPath* path) : goal_(goal), path_(path) {
        if (path_ != nullptr) {
            const std::size_t n = path_->segment_count();
            suffix_.assign(n + 1, 0.0);
            for (std::size_t i = n; i-- > 0;) {
                suffix_[i] = suffix_[i + 1] + path_->segment(i).length();
            }
        }
    }

    /// Nearest segment of the last point asked for, if any.
    std::optional<std::size_t> segment_at(Point2 s) const {
        if (path_ == nullptr) {
            return std::nullopt;
        }
        if (!(cached_ && last_ == s)) {
            last_ = s;
            index_ = nearest_segment(s, *path_);
            cached_ = true;
        }
        return index_;
    }

    double remaining(Point2 s) const {
        if (path_ == nullptr) {
            return distance(s, goal_);
        }
        std::size_t i = *segment_at(s);
        Segment seg = path_->segment(i);
        return distance(seg.closest_point(s), seg.end()) + suffix_[i + 1];
    }

private:
    Point2 goal_;
    const PriorPath* path_;
    std::vector<double> suffix_;
    mutable Point2 last_;
    mutable std::size_t index_ = 0;
    mutable bool cached_ = false;
};

}  // namespace

Plan generate_plan(const State& start, Point2 goal, const World& world, const PriorPath* path,
                   const ForceWeights& w, const FieldConfig& cfg) {
    cfg.validate();
    if (cfg.mode == FieldMode::prior && path == nullptr) {
        throw ConfigError("prior mode requires a prior path");
    }
    if (clearance(start.position, world) <= cfg.inflation) {
        throw PlanningError("start state is in collision");
    }

    Plan plan;
    plan.states.push_back(start);
    if (distance(start.position, goal) <= cfg.goal_radius) {
        plan.outcome = PlanOutcome::reached;
        return plan;
    }

    const ProgressMeter meter(goal, cfg.mode == FieldMode::prior ? path : nullptr);
    const double trap_progress = cfg.effective_trap_progress();
    std::vector<double> remaining{meter.remaining(start.position)};

    FieldConfig slice = cfg;
    slice.dt = cfg.dt / cfg.substeps;
    for (int k = 1; k <= cfg.max_steps; ++k) {
        State next = plan.states.back();
        for (int j = 0; j < cfg.substeps; ++j) {
            Vec2 f = force_at(next.position, goal, world, path, w, cfg, meter.segment_at(next.position));
            State moved = step(next, f, slice);
            if (moved.position == next.position) {
                plan.outcome = PlanOutcome::trapped;
                return plan;
            }
            if (!segment_collision_free(Segment(next.position, moved.position), world, cfg.inflation)) {
                plan.outcome = PlanOutcome::collided;
                return plan;
            }
            next = moved;
        }
        next.t = start.t + k * cfg.dt;
        plan.states.push_back(next);
        if (distance(next.position, goal) <= cfg.goal_radius) {
            plan.outcome = PlanOutcome::reached;
            return plan;
        }
        remaining.push_back(meter.remaining(next.position));
        if (k >= cfg.trap_window) {
            double progress = remaining[static_cast<std::size_t>(k - cfg.trap_window)] - remaining.back();
            if (progress < trap_progress) {
                plan.outcome = PlanOutcome::trapped;
                return plan;
            }
        }
    }
    plan.outcome = PlanOutcome::exhausted_steps;
    return plan;
}

}  // namespace apa
