#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cachege/cache_config.hpp"
#include "cachege/trace.hpp"

namespace cachege {

/// Event counters for one cache. final_flush counts dirty blocks still resident
/// at the end of the trace and is never folded into write_backs.
struct SimStats {
    std::uint64_t accesses = 0;
    std::uint64_t demand_misses = 0;
    std::uint64_t prefetch_fills = 0;
    std::uint64_t write_backs = 0;
    std::uint64_t write_throughs = 0;
    std::uint64_t final_flush = 0;

    std::uint64_t hits() const { return accesses - demand_misses; }
    friend bool operator==(const SimStats&, const SimStats&) = default;
};

struct SimResult {
    SimStats icache;
    SimStats dcache;

    friend bool operator==(const SimResult&, const SimResult&) = default;
};

struct StepOutcome {
    bool hit = false;
    std::uint32_t prefetch_fills = 0;
    std::uint32_t write_backs = 0;
};

/// One set-associative cache with write-allocate and next-block prefetch.
/// Starts empty (all lines invalid).
class Cache {
public:
    Cache(const CacheSide& geometry, Side side, WritePolicy write_policy, std::uint64_t rng_seed);

    /// Applies one access. Throws std::invalid_argument when an ifetch is sent
    /// to the data side or a read/write to the instruction side.
    StepOutcome access(const TraceRecord& record);

    bool contains(std::uint64_t address) const;
    const SimStats& stats() const { return stats_; }
    /// Dirty resident blocks right now.
    std::uint64_t dirty_blocks() const;
    /// Stats with final_flush filled in from the current dirty lines.
    SimStats finish() const;

private:
    struct Line {
        std::uint64_t tag = 0;
        std::uint64_t stamp = 0;  // LRU: last touch; FIFO: fill order
        bool valid = false;
        bool dirty = false;
    };

    std::span<Line> set_of(std::uint64_t block_addr);
    std::span<const Line> set_of(std::uint64_t block_addr) const;
    Line* find(std::uint64_t block_addr);
    Line& fill(std::uint64_t block_addr);

    CacheSide geometry_;
    Side side_;
    WritePolicy write_policy_;
    std::uint64_t n_sets_;
    std::vector<Line> lines_;
    std::uint64_t tick_ = 0;
    std::mt19937_64 rng_;
    SimStats stats_;
};

/// Runs the trace through both caches: ifetches to the I-cache, reads and writes
/// to the D-cache. Throws ValidationError when either geometry is unsound
/// (see validate_geometry); grammar membership is not required.
SimResult simulate(const CacheConfig& config, std::span<const TraceRecord> trace, std::uint64_t rng_seed);

}  // namespace cachege
