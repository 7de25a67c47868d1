#pragma once

#include <stdexcept>
#include <string>

namespace apa {

/// Invalid parameters or inputs that violate a documented precondition.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Planning could not start (e.g. the start state is already in collision).
class PlanningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rejection sampling gave up: the sampling region is empty or degenerate.
class RegionTooSmall : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario/plan file could not be read. `field()` names the offending field.
class LoadError : public std::runtime_error {
public:
    LoadError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace apa
