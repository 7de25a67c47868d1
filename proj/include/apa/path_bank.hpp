#pragma once

#include <mutex>
#include <string>
#include <vector>

#include "apa/geometry.hpp"
#include "apa/prior_path.hpp"

namespace apa {

struct BankEntry {
    PriorPath path;
    double length;
    bool trivial;
};

enum class InsertStatus { inserted, duplicate, endpoint_mismatch, rejected_full };

struct InsertResult {
    InsertStatus status;
    std::string reason;

    bool ok() const { return status == InsertStatus::inserted; }
};

/// Bounded store of prior paths kept sorted by ascending length. Never empty:
/// it starts with (and falls back to) the single-segment start-goal path.
///
/// Mutations are serialized by an internal mutex; readers get copies, so a
/// path generator and an optimizer may share one bank.
class PathBank {
public:
    static constexpr std::size_t kDefaultCapacity = 100;

    PathBank(Point2 start, Point2 goal, std::size_t capacity = kDefaultCapacity, double goal_radius = 2.0);
    PathBank(const PathBank& other);
    PathBank& operator=(const PathBank& other);

    /// Inserts keeping the order. Rejects exact duplicates, paths whose
    /// endpoints are off, and paths that would be evicted right away. The
    /// trivial entry is dropped when a real path arrives and the straight
    /// start-goal segment collides with `world`.
    InsertResult insert(const PriorPath& path, const World& world, double inflation);

    /// Entry i with probability (1/l_i) / sum_j (1/l_j).
    BankEntry select_roulette(Rng& rng) const;

    /// Removes entries that collide in `world`; returns how many were removed.
    std::size_t invalidate(const World& world, double inflation);

    /// Moves the start anchor (the robot moved). Stored paths are spliced
    /// onto the new start (see `splice_path`) and dropped when that fails;
    /// the trivial entry follows the anchor.
    void reanchor(Point2 start, const World& world, double inflation, double max_piece);

    std::vector<BankEntry> snapshot() const;
    std::size_t size() const;
    std::size_t capacity() const { return capacity_; }
    Point2 start() const;
    Point2 goal() const { return goal_; }

private:
    BankEntry trivial_entry() const;
    void sort_entries();

    mutable std::mutex mu_;
    Point2 start_;
    Point2 goal_;
    std::size_t capacity_;
    double goal_radius_;
    std::vector<BankEntry> entries_;
};

}  // namespace apa
