#pragma once

#include <cstdint>
#include <future>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>

#include "cachege/cache_config.hpp"
#include "cachege/charmodel.hpp"
#include "cachege/objectives.hpp"
#include "cachege/trace.hpp"

namespace cachege {

/// Seed for random replacement during evaluation. Fixed so a memo key always
/// maps to the same result, whatever order candidates are evaluated in.
inline constexpr std::uint64_t kDefaultSimSeed = 0x5eed;

struct ModelContext {
    std::span<const TraceRecord> trace;
    const CharTable* table = nullptr;
    DramParams dram;
    MissMode miss_mode = MissMode::DemandPlusPrefetch;
    std::uint64_t sim_seed = kDefaultSimSeed;
};

/// Simulates the config and applies both models.
Metrics measure(const CacheConfig& config, const ModelContext& ctx);

struct EvalOutcome {
    std::string key;
    bool feasible = false;
    std::optional<CacheConfig> config;
    Metrics metrics;
    double fitness = kInfeasibleFitness;
    std::string reason;  // why infeasible
};

struct MemoStats {
    std::uint64_t lookups = 0;
    std::uint64_t unique_keys = 0;
    std::uint64_t simulations = 0;

    std::uint64_t hits() const { return lookups - unique_keys; }
};

/// Phenotype -> fitness with a hashed memo keyed on memo_key(). Safe for
/// concurrent use; each key is evaluated at most once per memo, concurrent
/// requests for a key being evaluated wait for the first one.
class Evaluator {
public:
    Evaluator(ModelContext ctx, Metrics baseline, FitnessWeights weights = {});

    EvalOutcome evaluate(std::string_view phenotype);

    MemoStats stats() const;
    void clear();

    const Metrics& baseline() const { return baseline_; }
    const ModelContext& context() const { return ctx_; }

private:
    EvalOutcome compute(const std::string& key) const;

    ModelContext ctx_;
    Metrics baseline_;
    FitnessWeights weights_;

    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::shared_future<EvalOutcome>> memo_;
    MemoStats stats_;
};

}  // namespace cachege
