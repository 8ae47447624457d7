#pragma once

#include <string_view>
#include <optional>

#include "cachege/cache_config.hpp"
#include "cachege/cachesim.hpp"
#include "cachege/charmodel.hpp"

namespace cachege {

struct Metrics {
    double exec_time = 0;  // s
    double energy = 0;     // J

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct FitnessWeights {
    double w_time = 0.5;
    double w_energy = 0.5;

    /// Throws ValidationError unless both lie in [0,1] and sum to 1.
    void check() const;
};

/// Which simulator counters stand for "misses" in the models. Prefetch fills
/// move a line from DRAM just like a demand miss, so by default they count.
enum class MissMode { DemandOnly, DemandPlusPrefetch };

std::optional<MissMode> miss_mode_from_string(std::string_view s);
std::string_view to_string(MissMode m);

/// Sentinel fitness for infeasible or unmappable individuals.
inline constexpr double kInfeasibleFitness = 1.0e9;

/// Counter/characterization inputs for the models, one cache side.
struct SideInputs {
    double accesses = 0;
    double misses = 0;
    AccessCost cost;
    double line_size = 0;  // bytes
};

SideInputs side_inputs(const SimStats& stats, const AccessCost& cost, std::uint32_t line_size, MissMode mode);

/// T = Ia*It + Im*Dt + Im*Il/BW + Da*Dtc + Dm*Dt + Dm*Dl/BW
double exec_time(const SideInputs& i, const SideInputs& d, const DramParams& dram);

/// E = Ia*Ie + Da*De + Im*Ie*Il + Dm*De*Dl + Im*Pd*(Dt + Il/BW) + Dm*Pd*(Dt + Dl/BW)
///
/// The DRAM terms are power x time. Read literally the printed model adds the
/// DRAM transfer time to misses x power, which mixes joules and seconds.
/// There is no CPU term: only the cache subsystem is optimized.
double energy(const SideInputs& i, const SideInputs& d, const DramParams& dram);

double exec_time(const SimStats& istats, const SimStats& dstats, const AccessCost& ichar, const AccessCost& dchar,
                 const CacheConfig& config, const DramParams& dram, MissMode mode = MissMode::DemandPlusPrefetch);
double energy(const SimStats& istats, const SimStats& dstats, const AccessCost& ichar, const AccessCost& dchar,
              const CacheConfig& config, const DramParams& dram, MissMode mode = MissMode::DemandPlusPrefetch);

/// Both models from a simulation result; cache costs looked up in the table.
Metrics evaluate_metrics(const CacheConfig& config, const SimResult& sim, const CharTable& table,
                         const DramParams& dram, MissMode mode = MissMode::DemandPlusPrefetch);

/// w_time * T/T_base + w_energy * E/E_base. Lower is better. Throws
/// ValidationError when either baseline component is not positive.
double fitness(const Metrics& candidate, const Metrics& baseline, const FitnessWeights& w = {});

}  // namespace cachege
