#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cachege/cache_config.hpp"
#include "cachege/charmodel.hpp"
#include "cachege/evaluator.hpp"
#include "cachege/objectives.hpp"
#include "cachege/trace.hpp"

namespace cachege {

/// Allowed values per parameter; each list a nonempty subset of the full set.
struct Subspace {
    std::vector<std::uint32_t> isize, ibsize, iassoc;
    std::vector<Replacement> irepl;
    std::vector<FetchPolicy> ifetch;
    std::vector<std::uint32_t> dsize, dbsize, dassoc;
    std::vector<Replacement> drepl;
    std::vector<FetchPolicy> dfetch;
    std::vector<WritePolicy> dwback;

    static Subspace full();
    /// Every list holds just that config's value.
    static Subspace single(const CacheConfig& config);

    /// Throws ValidationError on an empty list or a value outside the full set.
    void check() const;
    std::uint64_t cardinality() const;
    /// All combinations, odometer order with dwback varying fastest.
    std::vector<CacheConfig> enumerate() const;
    /// Grammar whose phenotypes are exactly this subspace, one nonterminal per
    /// parameter in flag order.
    std::string to_bnf() const;
};

struct RankedConfig {
    CacheConfig config;
    std::string phenotype;
    Metrics metrics;
    double fitness = 0;
};

struct InfeasibleConfig {
    CacheConfig config;
    std::string phenotype;
    std::string reason;
};

struct ExhaustiveResult {
    std::vector<RankedConfig> ranked;  // ascending fitness, ties by flag text
    std::vector<InfeasibleConfig> infeasible;
};

struct ExhaustiveOptions {
    std::uint64_t cap = 10000;
    int jobs = 1;
};

/// Simulates every feasible point of the subspace once. Random replacement
/// uses ctx.sim_seed, the same seed the GE evaluator uses. Throws
/// ValidationError when the subspace exceeds the cap.
ExhaustiveResult exhaustive(const Subspace& sub, const ModelContext& ctx, const Metrics& baseline,
                            const FitnessWeights& weights = {}, const ExhaustiveOptions& options = {});

void write_ranked_csv(std::ostream& out, std::span<const RankedConfig> ranked);
void write_infeasible_csv(std::ostream& out, std::span<const InfeasibleConfig> infeasible);

/// Miss count of a fully associative LRU cache of capacity_blocks lines over
/// the block addresses of every record (kind ignored). A recency list, not the
/// simulator's set machinery.
std::uint64_t reference_lru(std::span<const TraceRecord> trace, std::uint32_t block_bytes,
                            std::size_t capacity_blocks);

}  // namespace cachege
