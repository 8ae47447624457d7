#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cachege/cache_config.hpp"
#include "cachege/cachesim.hpp"
#include "cachege/charmodel.hpp"
#include "cachege/evaluator.hpp"
#include "cachege/ge.hpp"
#include "cachege/grammar.hpp"
#include "cachege/objectives.hpp"
#include "cachege/oracle.hpp"
#include "cachege/trace.hpp"

namespace cachege::app {

/// Where the per-access costs come from: a CSV file, or the surrogate.
struct CharSource {
    std::optional<std::string> path;
    std::uint64_t surrogate_seed = 1;
    bool strict = false;

    CharTable load() const;
};

struct ModelOptions {
    DramParams dram;
    MissMode miss_mode = MissMode::DemandPlusPrefetch;
    FitnessWeights weights;
    std::uint64_t sim_seed = kDefaultSimSeed;
};

ModelContext make_context(std::span<const TraceRecord> trace, const CharTable& table, const ModelOptions& opts);

// simulate

struct SimulateOutput {
    CacheConfig config;
    SimResult sim;
    Metrics metrics;
};

/// Throws ValidationError naming the violated constraint for an infeasible config.
SimulateOutput run_simulate(const CacheConfig& config, std::span<const TraceRecord> trace, const CharTable& table,
                            const ModelOptions& opts);
void print_simulate(std::ostream& out, const SimulateOutput& result);
void write_simulate_csv(std::ostream& out, const SimulateOutput& result);

// optimize

struct RunConfig {
    std::string benchmark = "trace";
    CacheConfig baseline = baseline_config();
    GEParams ge;
    int runs = 10;
    bool share_memo = true;  // one memo across all runs of an invocation
    ModelOptions model;
};

struct RunRecord {
    int run = 0;
    std::uint64_t seed = 0;
    EvolveResult evolution;
    double time_pct = 0;    // best T relative to baseline, percent
    double energy_pct = 0;  // best E relative to baseline, percent
};

struct OptimizeResult {
    std::string benchmark;
    std::string baseline_phenotype;
    Metrics baseline;
    std::vector<RunRecord> runs;

    double mean_fitness = 0;
    double stddev_fitness = 0;  // population standard deviation over runs
    double best_fitness = 0;
    int best_count = 0;  // runs reaching best_fitness
    std::string best_phenotype;
    Metrics best_metrics;
    std::uint64_t total_lookups = 0;
    std::uint64_t total_simulations = 0;
    double memo_savings_pct = 0;  // 100 * (1 - simulations / lookups)
};

/// Validates the baseline, measures it on the same trace, then runs `runs`
/// independent evolutions with seed = ge.rng_seed + i.
OptimizeResult run_optimize(const RunConfig& config, std::span<const TraceRecord> trace, const CharTable& table,
                            const Grammar& grammar);

/// Writes run_NN_log.csv, runs.csv, summary.csv, best.txt and
/// percent_of_baseline.csv into dir (created if needed).
void write_optimize_bundle(const OptimizeResult& result, const std::filesystem::path& dir);
void write_best(std::ostream& out, const std::string& phenotype, const Metrics& metrics, double fitness);

// report

struct PercentRow {
    std::string benchmark;
    double energy_pct = 0;
    double time_pct = 0;
};

/// Averages each optimize bundle's per-run percentages.
std::vector<PercentRow> run_report(std::span<const std::filesystem::path> bundles);
void write_percent_csv(std::ostream& out, std::span<const PercentRow> rows);

}  // namespace cachege::app
