#include "apa/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "apa/errors.hpp"

namespace apa {

ForceWeights Chromosome::weights() const {
    if (genes.empty()) {
        throw ConfigError("chromosome has no genes");
    }
    ForceWeights w;
    w.alpha = 0.0;
    w.betas.assign(genes.begin(), genes.end() - 1);
    w.gamma = genes.back();
    return w;
}

void GAConfig::validate() const {
    if (pop_size < 2 || pop_size % 2 != 0 || pop_size < 2 * elite_count || elite_count < 0) {
        throw ConfigError("ga: pop_size must be even and at least 2 * elite_count");
    }
    if (!(pc >= 0.0 && pc <= 1.0) || !(pm >= 0.0 && pm <= 1.0)) {
        throw ConfigError("ga: pc and pm must be probabilities");
    }
    if (!(sigma_rel >= 0.0) || !(w_min >= 0.0) || !(w_max > w_min)) {
        throw ConfigError("ga: invalid mutation scale or gene bounds");
    }
    if (!(init_lo > w_min) || !(init_hi <= w_max) || !(init_hi >= init_lo)) {
        throw ConfigError("ga: initialization range must lie within the gene bounds");
    }
    if (generations < 0 || threads < 1) {
        throw ConfigError("ga: generations must be >= 0 and threads >= 1");
    }
}

double objective_length(const Plan& plan) {
    double len = 0.0;
    for (std::size_t i = 1; i < plan.states.size(); ++i) {
        len += distance(plan.states[i - 1].position, plan.states[i].position);
    }
    return len;
}

double objective_safety(const Plan& plan, const World& world, double dt) {
    double cost = 0.0;
    for (const auto& s : plan.states) {
        cost += dt / (clearance(s.position, world) + kSafetyEpsilon);
    }
    return cost;
}

double objective_smoothness(const Plan& plan) {
    double cost = 0.0;
    std::optional<double> prev;
    for (std::size_t i = 1; i < plan.states.size(); ++i) {
        Vec2 d = plan.states[i].position - plan.states[i - 1].position;
        if (d.x == 0.0 && d.y == 0.0) {
            continue;
        }
        double heading = std::atan2(d.y, d.x);
        if (prev) {
            double turn = wrap_angle(heading - *prev);
            cost += turn * turn;
        }
        prev = heading;
    }
    return cost;
}

Evaluation evaluate_plan(const Plan& plan, Point2 goal, const World& world, double dt) {
    Evaluation e;
    e.objectives = {objective_length(plan), objective_safety(plan, world, dt), objective_smoothness(plan)};
    e.feasible = plan.reached();
    e.goal_gap = plan.states.empty() ? 0.0 : distance(plan.states.back().position, goal);
    return e;
}

Normalizer Normalizer::fit(std::span<const Evaluation> evals) {
    Normalizer n;
    for (const auto& e : evals) {
        if (!e.feasible) {
            continue;
        }
        auto v = e.objectives.as_array();
        if (!n.valid_) {
            n.lo_ = v;
            n.hi_ = v;
            n.valid_ = true;
            continue;
        }
        for (std::size_t k = 0; k < 3; ++k) {
            n.lo_[k] = std::min(n.lo_[k], v[k]);
            n.hi_[k] = std::max(n.hi_[k], v[k]);
        }
    }
    return n;
}

double Normalizer::cost(const Evaluation& e) const {
    if (!e.feasible) {
        return kInfeasiblePenalty + e.goal_gap;
    }
    if (!valid_) {
        return 0.0;
    }
    auto v = e.objectives.as_array();
    double sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        if (hi_[k] > lo_[k]) {
            sum += (v[k] - lo_[k]) / (hi_[k] - lo_[k]);
        }
    }
    return sum;
}

std::vector<double> scalar_costs(std::span<const Evaluation> evals) {
    Normalizer n = Normalizer::fit(evals);
    std::vector<double> out;
    out.reserve(evals.size());
    for (const auto& e : evals) {
        out.push_back(n.cost(e));
    }
    return out;
}

std::vector<double> crowding_distance(std::span<const ObjectiveTriple> objectives) {
    const std::size_t n = objectives.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> crowd(n, 0.0);
    if (n <= 2) {
        std::fill(crowd.begin(), crowd.end(), inf);
        return crowd;
    }
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < 3; ++k) {
        auto value = [&](std::size_t i) { return objectives[i].as_array()[k]; };
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
        crowd[order.front()] = inf;
        crowd[order.back()] = inf;
        double span = value(order.back()) - value(order.front());
        if (!(span > 0.0)) {
            continue;
        }
        for (std::size_t j = 1; j + 1 < n; ++j) {
            crowd[order[j]] += (value(order[j + 1]) - value(order[j - 1])) / span;
        }
    }
    return crowd;
}

std::pair<Chromosome, Chromosome> uniform_crossover(const Chromosome& a, const Chromosome& b, Rng& rng) {
    if (a.genes.size() != b.genes.size()) {
        throw ConfigError("crossover: parents differ in gene count");
    }
    std::bernoulli_distribution coin(0.5);
    Chromosome c1 = a;
    Chromosome c2 = b;
    for (std::size_t i = 0; i < a.genes.size(); ++i) {
        if (coin(rng)) {
            std::swap(c1.genes[i], c2.genes[i]);
        }
    }
    return {std::move(c1), std::move(c2)};
}

Chromosome gaussian_mutate(const Chromosome& c, const GAConfig& cfg, Rng& rng) {
    Chromosome out = c;
    std::bernoulli_distribution flip(cfg.pm);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double lo = std::nextafter(cfg.w_min, cfg.w_max);
    for (double& g : out.genes) {
        if (!flip(rng)) {
            continue;
        }
        g = std::clamp(g + normal(rng) * cfg.sigma_rel * g, lo, cfg.w_max);
    }
    return out;
}

Chromosome random_chromosome(std::size_t obstacles, const GAConfig& cfg, Rng& rng) {
    std::uniform_real_distribution<double> u(std::log(cfg.init_lo), std::log(cfg.init_hi));
    Chromosome c;
    c.genes.resize(obstacles + 1);
    for (double& g : c.genes) {
        g = std::exp(u(rng));
    }
    return c;
}

void evaluate_individual(Individual& ind, const EvolutionSetup& setup) {
    FieldConfig field = setup.field;
    field.mode = FieldMode::prior;
    try {
        ind.plan = generate_plan(setup.start, setup.goal, *setup.world, &ind.prior_path.path,
                                 ind.chromosome.weights(), field);
    } catch (const PlanningError&) {
        ind.plan = Plan{{setup.start}, PlanOutcome::collided};
    }
    ind.evaluation = evaluate_plan(ind.plan, setup.goal, *setup.world, field.dt);
    ind.evaluated = true;
}

void evaluate_population(std::vector<Individual>& pop, const EvolutionSetup& setup) {
    std::vector<Individual*> todo;
    for (auto& ind : pop) {
        if (!ind.evaluated) {
            todo.push_back(&ind);
        }
    }
    const auto threads = static_cast<std::size_t>(std::max(1, setup.ga.threads));
    if (threads == 1 || todo.size() < 2) {
        for (auto* ind : todo) {
            evaluate_individual(*ind, setup);
        }
    } else {
        std::vector<std::jthread> workers;
        for (std::size_t t = 0; t < threads; ++t) {
            workers.emplace_back([&, t] {
                for (std::size_t i = t; i < todo.size(); i += threads) {
                    evaluate_individual(*todo[i], setup);
                }
            });
        }
    }

    std::vector<Evaluation> evals;
    std::vector<ObjectiveTriple> objs;
    evals.reserve(pop.size());
    objs.reserve(pop.size());
    for (const auto& ind : pop) {
        evals.push_back(ind.evaluation);
        objs.push_back(ind.evaluation.objectives);
    }
    auto costs = scalar_costs(evals);
    auto crowd = crowding_distance(objs);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        pop[i].scalar_cost = costs[i];
        pop[i].crowding = crowd[i];
    }
}

std::size_t best_index(std::span<const Individual> pop, const Normalizer& reference) {
    std::size_t best = 0;
    double best_ref = reference.cost(pop[0].evaluation);
    for (std::size_t i = 1; i < pop.size(); ++i) {
        double c = reference.cost(pop[i].evaluation);
        if (c < best_ref || (c == best_ref && pop[i].scalar_cost < pop[best].scalar_cost)) {
            best = i;
            best_ref = c;
        }
    }
    return best;
}

namespace {

std::size_t tournament(const std::vector<Individual>& pop, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
    std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    const auto& x = pop[a];
    const auto& y = pop[b];
    if (x.scalar_cost != y.scalar_cost) {
        return x.scalar_cost < y.scalar_cost ? a : b;
    }
    if (x.crowding != y.crowding) {
        return x.crowding > y.crowding ? a : b;
    }
    return std::bernoulli_distribution(0.5)(rng) ? a : b;
}

Individual offspring(Chromosome genes, BankEntry path) {
    return Individual{std::move(genes), std::move(path), Plan{}, Evaluation{},
                      std::numeric_limits<double>::infinity(), 0.0, false};
}

}  // namespace

std::vector<Individual> evolve_generation(std::vector<Individual> pop, const PathBank& bank,
                                          const EvolutionSetup& setup, Normalizer& reference, Rng& rng) {
    const GAConfig& ga = setup.ga;
    evaluate_population(pop, setup);
    if (!reference.valid()) {
        std::vector<Evaluation> evals;
        for (const auto& ind : pop) {
            evals.push_back(ind.evaluation);
        }
        reference = Normalizer::fit(evals);
    }
    const auto pop_size = static_cast<std::size_t>(ga.pop_size);
    const auto elite_count = std::min(static_cast<std::size_t>(ga.elite_count), pop.size());
    if (elite_count >= pop_size) {
        return pop;
    }

    std::vector<std::size_t> elites;
    if (elite_count > 0) {
        elites.push_back(best_index(pop, reference));
        std::vector<std::size_t> order(pop.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pop[a].scalar_cost < pop[b].scalar_cost; });
        for (std::size_t i : order) {
            if (elites.size() >= elite_count) {
                break;
            }
            if (i != elites.front()) {
                elites.push_back(i);
            }
        }
        std::sort(elites.begin(), elites.end());
    }

    std::vector<Individual> next;
    next.reserve(pop_size);
    for (std::size_t i : elites) {
        next.push_back(pop[i]);
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (next.size() < pop_size) {
        const Individual& p1 = pop[tournament(pop, rng)];
        const Individual& p2 = pop[tournament(pop, rng)];
        std::vector<Individual> children;
        if (unit(rng) < ga.pc) {
            auto [c1, c2] = uniform_crossover(p1.chromosome, p2.chromosome, rng);
            children.push_back(offspring(std::move(c1), p1.prior_path));
            children.push_back(offspring(std::move(c2), p2.prior_path));
        } else {
            children.push_back(offspring(p1.chromosome, bank.select_roulette(rng)));
            children.push_back(offspring(p2.chromosome, bank.select_roulette(rng)));
        }
        for (auto& child : children) {
            if (next.size() >= pop_size) {
                break;
            }
            child.chromosome = gaussian_mutate(child.chromosome, ga, rng);
            next.push_back(std::move(child));
        }
    }
    evaluate_population(next, setup);
    return next;
}

Optimizer::Optimizer(World world, Point2 start, Point2 goal, OptimizerConfig cfg)
    : world_(std::move(world)),
      start_{start, std::atan2(goal.y - start.y, goal.x - start.x), 0.0},
      goal_(goal),
      cfg_(std::move(cfg)),
      bank_(start, goal, cfg_.bank_capacity, cfg_.field.goal_radius),
      rng_(cfg_.ga.seed) {
    cfg_.ga.validate();
    cfg_.field.mode = FieldMode::prior;
    cfg_.field.validate();
    generator_.emplace(start, goal, world_, cfg_.rrt);
}

EvolutionSetup Optimizer::setup() const { return {&world_, start_, goal_, cfg_.field, cfg_.ga}; }

void Optimizer::feed_bank() {
    PathIteration it = generator_->next();
    ++path_runs_;
    if (it.guide) {
        bank_.insert(*it.guide, world_, cfg_.field.inflation);
    }
}

void Optimizer::record_stats() {
    GenerationStats s;
    s.generation = generation_;
    s.best_cost = best_cost();
    double sum = 0.0;
    for (const auto& ind : pop_) {
        sum += ind.scalar_cost;
        s.feasible_count += ind.evaluation.feasible ? 1 : 0;
    }
    s.mean_cost = sum / static_cast<double>(pop_.size());
    history_.push_back(s);
}

void Optimizer::initialize() {
    for (int k = 0; k < cfg_.paths_before_start; ++k) {
        feed_bank();
    }
    pop_.clear();
    for (int i = 0; i < cfg_.ga.pop_size; ++i) {
        Chromosome c = random_chromosome(world_.obstacle_count(), cfg_.ga, rng_);
        pop_.push_back(offspring(std::move(c), bank_.select_roulette(rng_)));
    }
    evaluate_population(pop_, setup());
    std::vector<Evaluation> evals;
    for (const auto& ind : pop_) {
        evals.push_back(ind.evaluation);
    }
    reference_ = Normalizer::fit(evals);
    generation_ = 0;
    record_stats();
}

void Optimizer::step() {
    if (!initialized()) {
        initialize();
        return;
    }
    if (path_runs_ < cfg_.paths_before_start + cfg_.path_iterations) {
        feed_bank();
    }
    pop_ = evolve_generation(std::move(pop_), bank_, setup(), reference_, rng_);
    ++generation_;
    record_stats();
}

void Optimizer::run(int generations) {
    if (!initialized()) {
        initialize();
    }
    for (int g = 0; g < generations; ++g) {
        step();
    }
}

const Individual& Optimizer::best() const {
    if (pop_.empty()) {
        throw ConfigError("optimizer has no population yet");
    }
    return pop_[best_index(pop_, reference_)];
}

double Optimizer::best_cost() const { return reference_.cost(best().evaluation); }

void Optimizer::apply_world_change(World world, WorldChange change) {
    world_ = std::move(world);
    generator_->set_world(world_);
    generator_->reset_region();
    for (auto& ind : pop_) {
        auto& genes = ind.chromosome.genes;
        if (change.kind == WorldChange::Kind::added) {
            std::size_t m = genes.size() - 1;
            double mean = m == 0 ? kPriorDefaultBeta
                                 : std::accumulate(genes.begin(), genes.end() - 1, 0.0) / static_cast<double>(m);
            genes.insert(genes.begin() + static_cast<std::ptrdiff_t>(std::min(change.index, m)), mean);
        } else if (change.index < genes.size() - 1) {
            genes.erase(genes.begin() + static_cast<std::ptrdiff_t>(change.index));
        }
        ind.evaluated = false;
    }
    bank_.invalidate(world_, cfg_.field.inflation);
    for (auto& ind : pop_) {
        if (!path_collision_free(ind.prior_path.path, world_, cfg_.field.inflation)) {
            ind.prior_path = bank_.select_roulette(rng_);
        }
    }
    reference_ = Normalizer{};
}

void Optimizer::rebase(const State& start) {
    start_ = start;
    generator_.emplace(start.position, goal_, world_, cfg_.rrt);
    path_runs_ = 0;
    const double inflation = generator_->inflation();
    bank_.reanchor(start.position, world_, inflation, cfg_.rrt.max_piece);
    // Individuals share few distinct paths; splice each one once.
    std::vector<std::pair<PriorPath, std::optional<PriorPath>>> spliced;
    for (auto& ind : pop_) {
        ind.evaluated = false;
        if (ind.prior_path.trivial) {
            ind.prior_path = bank_.select_roulette(rng_);
            continue;
        }
        auto it = std::find_if(spliced.begin(), spliced.end(),
                               [&](const auto& s) { return s.first == ind.prior_path.path; });
        if (it == spliced.end()) {
            spliced.emplace_back(ind.prior_path.path, splice_path(start.position, ind.prior_path.path, world_,
                                                                 inflation, cfg_.rrt.max_piece));
            it = spliced.end() - 1;
        }
        if (it->second) {
            ind.prior_path = {*it->second, it->second->total_length(), false};
        } else {
            ind.prior_path = bank_.select_roulette(rng_);
        }
    }
    reference_ = Normalizer{};
}

OptimizeResult optimize(const World& world, Point2 start, Point2 goal, const OptimizerConfig& cfg, int generations) {
    Optimizer opt(world, start, goal, cfg);
    opt.run(generations);
    OptimizeResult r{opt.best(), opt.history(), opt.reference(), false};
    r.feasible = r.best.evaluation.feasible;
    return r;
}

}  // namespace apa
