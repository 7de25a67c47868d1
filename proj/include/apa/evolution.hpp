#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "apa/geometry.hpp"
#include "apa/path_bank.hpp"
#include "apa/potential_field.hpp"
#include "apa/prior_path.hpp"

namespace apa {

inline constexpr double kInfeasiblePenalty = 1e9;
inline constexpr double kSafetyEpsilon = 0.1;

/// Force weights under evolution: [beta_1 .. beta_m, gamma].
struct Chromosome {
    std::vector<double> genes;

    std::size_t obstacle_count() const { return genes.empty() ? 0 : genes.size() - 1; }
    /// Prior-mode weights (alpha = 0).
    ForceWeights weights() const;
};

struct GAConfig {
    int pop_size = 200;
    double pc = 0.75;
    double pm = 0.15;
    int elite_count = 2;
    double sigma_rel = 0.1;
    int generations = 30;
    double w_min = 1e-6;  ///< genes stay strictly above this
    double w_max = 100.0;
    double init_lo = 0.01;
    double init_hi = 10.0;
    std::uint64_t seed = 1;
    int threads = 1;

    void validate() const;
};

struct ObjectiveTriple {
    double path_len = 0.0;
    double safety_cost = 0.0;
    double smoothness_cost = 0.0;

    std::array<double, 3> as_array() const { return {path_len, safety_cost, smoothness_cost}; }
};

struct Evaluation {
    ObjectiveTriple objectives;
    bool feasible = false;
    double goal_gap = 0.0;  ///< final distance to the goal
};

double objective_length(const Plan& plan);
/// Sum over states of dt / (clearance + 0.1).
double objective_safety(const Plan& plan, const World& world, double dt);
/// Sum of squared heading changes between consecutive displacements.
double objective_smoothness(const Plan& plan);
Evaluation evaluate_plan(const Plan& plan, Point2 goal, const World& world, double dt);

/// Min-max normalizer over feasible evaluations; maps an evaluation to the
/// sum of its normalized objectives, or to the infeasibility penalty.
class Normalizer {
public:
    Normalizer() = default;
    static Normalizer fit(std::span<const Evaluation> evals);

    bool valid() const { return valid_; }
    double cost(const Evaluation& e) const;

private:
    std::array<double, 3> lo_{};
    std::array<double, 3> hi_{};
    bool valid_ = false;
};

std::vector<double> scalar_costs(std::span<const Evaluation> evals);

/// Crowding distance; boundary individuals of each objective get +inf.
std::vector<double> crowding_distance(std::span<const ObjectiveTriple> objectives);

std::pair<Chromosome, Chromosome> uniform_crossover(const Chromosome& a, const Chromosome& b, Rng& rng);
Chromosome gaussian_mutate(const Chromosome& c, const GAConfig& cfg, Rng& rng);
Chromosome random_chromosome(std::size_t obstacles, const GAConfig& cfg, Rng& rng);

struct Individual {
    Chromosome chromosome;
    BankEntry prior_path;
    Plan plan;
    Evaluation evaluation;
    double scalar_cost = std::numeric_limits<double>::infinity();
    double crowding = 0.0;
    bool evaluated = false;
};

/// Everything an evaluation needs besides the individual itself.
struct EvolutionSetup {
    const World* world;
    State start;
    Point2 goal;
    FieldConfig field;  ///< mode is forced to prior
    GAConfig ga;
};

void evaluate_individual(Individual& ind, const EvolutionSetup& setup);
/// Evaluates every unevaluated individual, then refreshes scalar costs and
/// crowding over the whole population.
void evaluate_population(std::vector<Individual>& pop, const EvolutionSetup& setup);

/// Index of the lowest cost under `reference` (ties: lowest scalar cost, then index).
std::size_t best_index(std::span<const Individual> pop, const Normalizer& reference);

/// One generation: elitism, binary tournaments, crossover and mutation.
/// Elites are the best individual under `reference` plus the lowest
/// per-generation costs. `reference` is fitted here if it is not valid yet.
std::vector<Individual> evolve_generation(std::vector<Individual> pop, const PathBank& bank,
                                          const EvolutionSetup& setup, Normalizer& reference, Rng& rng);

struct GenerationStats {
    int generation = 0;
    double best_cost = 0.0;  ///< under the frozen reference normalization
    double mean_cost = 0.0;  ///< per-generation scalar costs
    int feasible_count = 0;
};

struct OptimizerConfig {
    GAConfig ga;
    FieldConfig field;
    RRTConfig rrt;
    std::size_t bank_capacity = PathBank::kDefaultCapacity;
    int path_iterations = 10;     ///< path-generator runs interleaved with generations
    int paths_before_start = 1;   ///< path-generator runs before the first population
};

struct WorldChange {
    enum class Kind { added, removed } kind;
    std::size_t index;  ///< position of the added or removed obstacle
};

/// The anytime optimization loop: a path generator feeding the bank while
/// the GA evolves force weights. `best()` is valid after `initialize()`.
class Optimizer {
public:
    Optimizer(World world, Point2 start, Point2 goal, OptimizerConfig cfg);
    Optimizer(const Optimizer&) = delete;
    Optimizer& operator=(const Optimizer&) = delete;

    void initialize();
    void step();
    void run(int generations);

    const Individual& best() const;
    double best_cost() const;
    const std::vector<Individual>& population() const { return pop_; }
    const std::vector<GenerationStats>& history() const { return history_; }
    const Normalizer& reference() const { return reference_; }
    const PathBank& bank() const { return bank_; }
    PathBank& bank() { return bank_; }
    const World& world() const { return world_; }
    const OptimizerConfig& config() const { return cfg_; }
    bool initialized() const { return !pop_.empty(); }

    /// Applies an obstacle addition/removal: genes are resized, the bank is
    /// invalidated, individuals with invalid paths re-draw one, and every
    /// individual is re-evaluated on the next step.
    void apply_world_change(World world, WorldChange change);
    /// Restarts evaluation from a new robot state (the robot moved).
    void rebase(const State& start);

private:
    EvolutionSetup setup() const;
    void feed_bank();
    void record_stats();

    World world_;
    State start_;
    Point2 goal_;
    OptimizerConfig cfg_;
    PathBank bank_;
    std::optional<PathGenerator> generator_;
    int path_runs_ = 0;
    Rng rng_;
    std::vector<Individual> pop_;
    Normalizer reference_;
    std::vector<GenerationStats> history_;
    int generation_ = 0;
};

struct OptimizeResult {
    Individual best;
    std::vector<GenerationStats> history;
    Normalizer reference;
    bool feasible = false;
};

OptimizeResult optimize(const World& world, Point2 start, Point2 goal, const OptimizerConfig& cfg, int generations);

}  // namespace apa
