#include "cachege/cachesim.hpp"

#include <limits>
#include <stdexcept>

#include "cachege/error.hpp"

namespace cachege {

Cache::Cache(const CacheSide& geometry, Side side, WritePolicy write_policy, std::uint64_t rng_seed)
    : geometry_(geometry),
      side_(side),
      write_policy_(write_policy),
      n_sets_(geometry.sets()),
      rng_(rng_seed) {
    if (auto v = validate_geometry(geometry, side); !v) throw ValidationError(v.reason);
    lines_.resize(n_sets_ * geometry_.assoc);
}

std::span<Cache::Line> Cache::set_of(std::uint64_t block_addr) {
    return std::span<Line>(lines_).subspan((block_addr % n_sets_) * geometry_.assoc, geometry_.assoc);
}

std::span<const Cache::Line> Cache::set_of(std::uint64_t block_addr) const {
    return std::span<const Line>(lines_).subspan((block_addr % n_sets_) * geometry_.assoc, geometry_.assoc);
}

Cache::Line* Cache::find(std::uint64_t block_addr) {
    const std::uint64_t tag = block_addr / n_sets_;
    for (auto& line : set_of(block_addr))
        if (line.valid && line.tag == tag) return &line;
    return nullptr;
}

bool Cache::contains(std::uint64_t address) const {
    const std::uint64_t block_addr = address / geometry_.block;
    const std::uint64_t tag = block_addr / n_sets_;
    for (const auto& line : set_of(block_addr))
        if (line.valid && line.tag == tag) return true;
    return false;
}

Cache::Line& Cache::fill(std::uint64_t block_addr) {
    auto set = set_of(block_addr);
    Line* victim = nullptr;
    for (auto& line : set) {
        if (!line.valid) {
            victim = &line;
            break;
        }
    }
    if (victim == nullptr) {
        if (geometry_.repl == Replacement::Random) {
            victim = &set[std::uniform_int_distribution<std::size_t>(0, set.size() - 1)(rng_)];
        } else {
            victim = &set[0];
            for (auto& line : set)
                if (line.stamp < victim->stamp) victim = &line;
        }
        if (victim->dirty) ++stats_.write_backs;
    }
    victim->valid = true;
    victim->dirty = false;
    victim->tag = block_addr / n_sets_;
    victim->stamp = ++tick_;
    return *victim;
}

StepOutcome Cache::access(const TraceRecord& record) {
    const bool is_fetch = record.kind == AccessKind::IFetch;
    if (is_fetch != (side_ == Side::Instruction))
        throw std::invalid_argument(is_fetch ? "ifetch sent to the data cache" : "data access sent to the instruction cache");

    const std::uint64_t write_backs_before = stats_.write_backs;
    StepOutcome out;
    ++stats_.accesses;
    const std::uint64_t block_addr = record.address / geometry_.block;
    Line* line = find(block_addr);
    out.hit = line != nullptr;
    if (line != nullptr) {
        if (geometry_.repl == Replacement::Lru) line->stamp = ++tick_;
    } else {
        ++stats_.demand_misses;
        line = &fill(block_addr);
    }

    if (record.kind == AccessKind::Write) {
        if (write_policy_ == WritePolicy::WriteBack)
            line->dirty = true;
        else
            ++stats_.write_throughs;
    }

    const bool want_prefetch = geometry_.fetch == FetchPolicy::AlwaysPrefetch ||
                               (geometry_.fetch == FetchPolicy::MissPrefetch && !out.hit);
    if (want_prefetch && block_addr != std::numeric_limits<std::uint64_t>::max() / geometry_.block &&
        find(block_addr + 1) == nullptr) {
        fill(block_addr + 1);
        ++stats_.prefetch_fills;
        out.prefetch_fills = 1;
    }
    out.write_backs = static_cast<std::uint32_t>(stats_.write_backs - write_backs_before);
    return out;
}

std::uint64_t Cache::dirty_blocks() const {
    std::uint64_t n = 0;
    for (const auto& line : lines_)
        if (line.valid && line.dirty) ++n;
    return n;
}

SimStats Cache::finish() const {
    SimStats s = stats_;
    s.final_flush = dirty_blocks();
    return s;
}

SimResult simulate(const CacheConfig& config, std::span<const TraceRecord> trace, std::uint64_t rng_seed) {
    for (auto v : {validate_geometry(config.icache, Side::Instruction), validate_geometry(config.dcache, Side::Data)})
        if (!v) throw ValidationError("infeasible configuration: " + v.reason);
    Cache icache(config.icache, Side::Instruction, WritePolicy::WriteThrough, rng_seed);
    Cache dcache(config.dcache, Side::Data, config.dwback, rng_seed + 1);
    for (const auto& r : trace) {
        if (r.kind == AccessKind::IFetch)
            icache.access(r);
        else
            dcache.access(r);
    }
    return {icache.finish(), dcache.finish()};
}

}  // namespace cachege
