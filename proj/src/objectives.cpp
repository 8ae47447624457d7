#include "cachege/objectives.hpp"

#include <cmath>

#include "cachege/error.hpp"

namespace cachege {

void FitnessWeights::check() const {
    if (!(w_time >= 0 && w_time <= 1 && w_energy >= 0 && w_energy <= 1) || std::abs(w_time + w_energy - 1) > 1e-12)
        throw ValidationError("fitness weights must lie in [0,1] and sum to 1");
}

std::optional<MissMode> miss_mode_from_string(std::string_view s) {
    if (s == "demand_only") return MissMode::DemandOnly;
    if (s == "demand_plus_prefetch") return MissMode::DemandPlusPrefetch;
    return std::nullopt;
}

std::string_view to_string(MissMode m) {
    return m == MissMode::DemandOnly ? "demand_only" : "demand_plus_prefetch";
}

SideInputs side_inputs(const SimStats& stats, const AccessCost& cost, std::uint32_t line_size, MissMode mode) {
    double misses = static_cast<double>(stats.demand_misses);
    if (mode == MissMode::DemandPlusPrefetch) misses += static_cast<double>(stats.prefetch_fills);
    return {static_cast<double>(stats.accesses), misses, cost, static_cast<double>(line_size)};
}

namespace {

void check_side(const SideInputs& s) {
    for (double v : {s.accesses, s.misses, s.cost.time, s.cost.energy, s.line_size})
        if (!std::isfinite(v) || v < 0) throw ValidationError("model inputs must be finite and non-negative");
}

void check_inputs(const SideInputs& i, const SideInputs& d, const DramParams& dram) {
    check_side(i);
    check_side(d);
    dram.check();
}

}  // namespace

double exec_time(const SideInputs& i, const SideInputs& d, const DramParams& dram) {
    check_inputs(i, d, dram);
    return i.accesses * i.cost.time + i.misses * dram.access_time + i.misses * i.line_size / dram.bandwidth +
           d.accesses * d.cost.time + d.misses * dram.access_time + d.misses * d.line_size / dram.bandwidth;
}

double energy(const SideInputs& i, const SideInputs& d, const DramParams& dram) {
    check_inputs(i, d, dram);
    return i.accesses * i.cost.energy + d.accesses * d.cost.energy + i.misses * i.cost.energy * i.line_size +
           d.misses * d.cost.energy * d.line_size +
           i.misses * dram.access_power * (dram.access_time + i.line_size / dram.bandwidth) +
           d.misses * dram.access_power * (dram.access_time + d.line_size / dram.bandwidth);
}

double exec_time(const SimStats& istats, const SimStats& dstats, const AccessCost& ichar, const AccessCost& dchar,
                 const CacheConfig& config, const DramParams& dram, MissMode mode) {
    return exec_time(side_inputs(istats, ichar, config.icache.block, mode),
                     side_inputs(dstats, dchar, config.dcache.block, mode), dram);
}

double energy(const SimStats& istats, const SimStats& dstats, const AccessCost& ichar, const AccessCost& dchar,
              const CacheConfig& config, const DramParams& dram, MissMode mode) {
    return energy(side_inputs(istats, ichar, config.icache.block, mode),
                  side_inputs(dstats, dchar, config.dcache.block, mode), dram);
}

Metrics evaluate_metrics(const CacheConfig& config, const SimResult& sim, const CharTable& table,
                         const DramParams& dram, MissMode mode) {
    const auto ic = table.lookup(config.icache.size, config.icache.block, config.icache.assoc);
    const auto dc = table.lookup(config.dcache.size, config.dcache.block, config.dcache.assoc);
    const auto i = side_inputs(sim.icache, ic, config.icache.block, mode);
    const auto d = side_inputs(sim.dcache, dc, config.dcache.block, mode);
    return {exec_time(i, d, dram), energy(i, d, dram)};
}

double fitness(const Metrics& candidate, const Metrics& baseline, const FitnessWeights& w) {
    if (!(baseline.exec_time > 0) || !(baseline.energy > 0))
        throw ValidationError("baseline execution time and energy must be positive (simulate the baseline first)");
    w.check();
    return w.w_time * candidate.exec_time / baseline.exec_time + w.w_energy * candidate.energy / baseline.energy;
}

}  // namespace cachege
