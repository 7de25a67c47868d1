#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "apa/geometry.hpp"
#include "apa/potential_field.hpp"

namespace apa {

struct AddObstacle {
    Obstacle obstacle;
};

struct RemoveObstacle {
    std::size_t index;
};

struct ScenarioEvent {
    double t;
    std::variant<AddObstacle, RemoveObstacle> action;
};

struct Scenario {
    World world;
    Point2 start;
    Point2 goal;
    std::vector<ScenarioEvent> events;

    /// Throws LoadError naming the offending field.
    void validate() const;
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& file);
std::string scenario_to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& file);

/// {"states":[[x,y,heading,t],...],"outcome":"Reached"}
std::string plan_to_json(const Plan& plan);
Plan plan_from_json(const std::string& json_text);

/// Writes `text` to `file`; throws std::runtime_error when it cannot.
void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace apa
