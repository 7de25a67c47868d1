#include "apa/path_bank.hpp"

#include <algorithm>

#include "apa/errors.hpp"

namespace apa {

PathBank::PathBank(Point2 start, Point2 goal, std::size_t capacity, double goal_radius)
    : start_(start), goal_(goal), capacity_(capacity), goal_radius_(goal_radius) {
    if (capacity == 0) {
        throw ConfigError("path bank capacity must be positive");
    }
    if (start == goal) {
        throw ConfigError("path bank start and goal coincide");
    }
    entries_.push_back(trivial_entry());
}

PathBank::PathBank(const PathBank& other)
    : start_(other.start()), goal_(other.goal_), capacity_(other.capacity_), goal_radius_(other.goal_radius_),
      entries_(other.snapshot()) {}

PathBank& PathBank::operator=(const PathBank& other) {
    if (this != &other) {
        auto entries = other.snapshot();
        Point2 start = other.start();
        std::lock_guard lock(mu_);
        start_ = start;
        goal_ = other.goal_;
        capacity_ = other.capacity_;
        goal_radius_ = other.goal_radius_;
        entries_ = std::move(entries);
    }
    return *this;
}

BankEntry PathBank::trivial_entry() const {
    PriorPath p({start_, goal_});
    return {p, p.total_length(), true};
}

void PathBank::sort_entries() {
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const BankEntry& a, const BankEntry& b) { return a.length < b.length; });
}

InsertResult PathBank::insert(const PriorPath& path, const World& world, double inflation) {
    std::lock_guard lock(mu_);
    if (distance(path.front(), start_) > goal_radius_ || distance(path.back(), goal_) > goal_radius_) {
        return {InsertStatus::endpoint_mismatch, "path endpoints do not match the bank's start and goal"};
    }
    for (const auto& e : entries_) {
        if (e.path == path) {
            return {InsertStatus::duplicate, "identical path already stored"};
        }
    }

    std::vector<BankEntry> next;
    next.reserve(entries_.size() + 1);
    for (const auto& e : entries_) {
        if (e.trivial && !path_collision_free(e.path, world, inflation)) {
            continue;
        }
        next.push_back(e);
    }
    BankEntry entry{path, path.total_length(), false};
    auto pos = std::upper_bound(next.begin(), next.end(), entry.length,
                                [](double l, const BankEntry& e) { return l < e.length; });
    bool last = pos == next.end();
    next.insert(pos, std::move(entry));
    if (next.size() > capacity_) {
        if (last) {
            return {InsertStatus::rejected_full, "bank is full and the path is longer than every entry"};
        }
        next.pop_back();
    }
    entries_ = std::move(next);
    return {InsertStatus::inserted, {}};
}

BankEntry PathBank::select_roulette(Rng& rng) const {
    std::lock_guard lock(mu_);
    double total = 0.0;
    for (const auto& e : entries_) {
        total += 1.0 / e.length;
    }
    double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    double acc = 0.0;
    for (const auto& e : entries_) {
        acc += 1.0 / e.length;
        if (u < acc) {
            return e;
        }
    }
    return entries_.back();
}

std::size_t PathBank::invalidate(const World& world, double inflation) {
    std::lock_guard lock(mu_);
    std::size_t before = entries_.size();
    std::erase_if(entries_, [&](const BankEntry& e) { return !path_collision_free(e.path, world, inflation); });
    std::size_t removed = before - entries_.size();
    if (entries_.empty()) {
        entries_.push_back(trivial_entry());
    }
    return removed;
}

void PathBank::reanchor(Point2 start, const World& world, double inflation, double max_piece) {
    std::lock_guard lock(mu_);
    if (start == goal_) {
        throw ConfigError("path bank start and goal coincide");
    }
    start_ = start;
    std::vector<BankEntry> kept;
    for (auto& e : entries_) {
        if (e.trivial) {
            kept.push_back(trivial_entry());
            continue;
        }
        auto spliced = splice_path(start, e.path, world, inflation, max_piece);
        if (!spliced) {
            continue;
        }
        bool dup = std::any_of(kept.begin(), kept.end(), [&](const BankEntry& k) { return k.path == *spliced; });
        if (!dup) {
            double len = spliced->total_length();
            kept.push_back({std::move(*spliced), len, false});
        }
    }
    if (kept.empty()) {
        kept.push_back(trivial_entry());
    }
    entries_ = std::move(kept);
    sort_entries();
}

std::vector<BankEntry> PathBank::snapshot() const {
    std::lock_guard lock(mu_);
    return entries_;
}

std::size_t PathBank::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

Point2 PathBank::start() const {
    std::lock_guard lock(mu_);
    return start_;
}

}  // namespace apa
