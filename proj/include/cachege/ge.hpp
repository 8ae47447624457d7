#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cachege/evaluator.hpp"
#include "cachege/grammar.hpp"
#include "cachege/objectives.hpp"

namespace cachege {

/// Engine settings. Generations, population and the two operator rates
/// default to 100 / 50 / 0.9 / 0.01.
struct GEParams {
    int generations = 100;
    int population = 50;
    double p_crossover = 0.9;
    double p_mutation = 0.01;  // per codon
    int elitism = 1;
    int tournament_size = 2;
    int max_wraps = 3;
    int codon_count = 11;
    std::uint64_t rng_seed = 1;
    int jobs = 1;  // parallel evaluations per generation

    void check() const;
};

using Rng = std::mt19937_64;

struct Individual {
    Genotype genotype;
    std::optional<std::string> phenotype;
    std::optional<Metrics> metrics;
    std::optional<double> fitness;
    bool feasible = false;

    /// Fitness used for ranking: the infeasible sentinel when not evaluated.
    double rank_fitness() const { return fitness.value_or(kInfeasibleFitness); }
};

Genotype random_genotype(std::size_t length, Rng& rng);

/// Index of the lowest-fitness contestant; ties go to the lower index.
std::size_t tournament_winner(std::span<const double> fitness, std::span<const std::size_t> contestants);

/// Draws tournament_size contestants uniformly with replacement and returns
/// the winner's index. A population of one always returns 0.
std::size_t tournament_select(std::span<const double> fitness, int tournament_size, Rng& rng);

/// Swaps tails after the first `cut` codons.
std::pair<Genotype, Genotype> crossover_at(const Genotype& a, const Genotype& b, std::size_t cut);

/// With probability p_crossover picks a cut in [1, len-1] shared by both
/// parents and swaps tails; otherwise returns copies.
std::pair<Genotype, Genotype> crossover(const Genotype& a, const Genotype& b, double p_crossover, Rng& rng);

/// Each codon independently redrawn uniformly from [0,255] with probability p.
Genotype mutate(Genotype g, double p_mutation, Rng& rng);

struct GenerationLog {
    int generation = 0;
    double best = 0;   // best in this generation's population
    double mean = 0;   // over feasible individuals
    double worst = 0;  // over feasible individuals
    std::uint64_t unique_evals = 0;  // distinct memo keys first seen in this run so far
    std::uint64_t memo_hits = 0;     // lookups answered from the memo in this run so far
};

struct EvolveResult {
    Individual best;  // best ever; ties keep the earliest
    int best_generation = 0;
    std::vector<GenerationLog> log;
    MemoStats memo;  // this run's share of the evaluator's counters
};

using GenerationObserver = std::function<void(int generation, const std::vector<Individual>& population)>;

/// Generational loop: random initial codons, then per generation evaluate
/// (map, validate, memo lookup, simulate on miss), keep `elitism` best,
/// and fill the rest by tournament selection, crossover and mutation.
/// Deterministic per rng_seed regardless of `jobs`.
EvolveResult evolve(const GEParams& params, const Grammar& grammar, Evaluator& evaluator,
                    const GenerationObserver& observer = {});

void write_log_csv(std::ostream& out, std::span<const GenerationLog> log);

}  // namespace cachege
