#include "cachege/ge.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numeric>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "cachege/error.hpp"

namespace cachege {

void GEParams::check() const {
    if (generations < 1) throw ValidationError("generations must be >= 1");
    if (population < 2) throw ValidationError("population must be >= 2");
    if (!(p_crossover >= 0 && p_crossover <= 1)) throw ValidationError("p_crossover must lie in [0,1]");
    if (!(p_mutation >= 0 && p_mutation <= 1)) throw ValidationError("p_mutation must lie in [0,1]");
    if (elitism < 0 || elitism > population) throw ValidationError("elitism must lie in [0, population]");
    if (tournament_size < 1) throw ValidationError("tournament size must be >= 1");
    if (max_wraps < 0) throw ValidationError("max_wraps must be >= 0");
    if (codon_count < 1) throw ValidationError("codon count must be >= 1");
    if (jobs < 1) throw ValidationError("jobs must be >= 1");
}

Genotype random_genotype(std::size_t length, Rng& rng) {
    std::uniform_int_distribution<int> codon(0, 255);
    Genotype g(length);
    for (auto& c : g) c = static_cast<Codon>(codon(rng));
    return g;
}

std::size_t tournament_winner(std::span<const double> fitness, std::span<const std::size_t> contestants) {
    std::size_t best = contestants.front();
    for (auto i : contestants)
        if (fitness[i] < fitness[best] || (fitness[i] == fitness[best] && i < best)) best = i;
    return best;
}

std::size_t tournament_select(std::span<const double> fitness, int tournament_size, Rng& rng) {
    if (fitness.size() == 1) return 0;
    std::uniform_int_distribution<std::size_t> pick(0, fitness.size() - 1);
    std::vector<std::size_t> contestants(static_cast<std::size_t>(tournament_size));
    for (auto& c : contestants) c = pick(rng);
    return tournament_winner(fitness, contestants);
}

std::pair<Genotype, Genotype> crossover_at(const Genotype& a, const Genotype& b, std::size_t cut) {
    Genotype c1(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(cut));
    c1.insert(c1.end(), b.begin() + static_cast<std::ptrdiff_t>(cut), b.end());
    Genotype c2(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(cut));
    c2.insert(c2.end(), a.begin() + static_cast<std::ptrdiff_t>(cut), a.end());
    return {std::move(c1), std::move(c2)};
}

std::pair<Genotype, Genotype> crossover(const Genotype& a, const Genotype& b, double p_crossover, Rng& rng) {
    const std::size_t len = std::min(a.size(), b.size());
    std::bernoulli_distribution apply(p_crossover);
    if (len < 2 || !apply(rng)) return {a, b};
    std::uniform_int_distribution<std::size_t> cut(1, len - 1);
    return crossover_at(a, b, cut(rng));
}

Genotype mutate(Genotype g, double p_mutation, Rng& rng) {
    std::bernoulli_distribution flip(p_mutation);
    std::uniform_int_distribution<int> codon(0, 255);
    for (auto& c : g)
        if (flip(rng)) c = static_cast<Codon>(codon(rng));
    return g;
}

namespace {

void evaluate_one(Individual& ind, const Grammar& grammar, int max_wraps, Evaluator& evaluator) {
    ind.phenotype.reset();
    ind.metrics.reset();
    ind.fitness.reset();
    ind.feasible = false;
    auto mapped = map_genotype(ind.genotype, grammar, max_wraps);
    if (!mapped.ok()) return;
    ind.phenotype = *mapped.phenotype;
    const auto outcome = evaluator.evaluate(*ind.phenotype);
    if (!outcome.feasible) return;
    ind.feasible = true;
    ind.metrics = outcome.metrics;
    ind.fitness = outcome.fitness;
}

void evaluate_population(std::vector<Individual>& pop, const GEParams& params, const Grammar& grammar,
                         Evaluator& evaluator) {
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(params.jobs), pop.size());
    if (workers <= 1) {
        for (auto& ind : pop) evaluate_one(ind, grammar, params.max_wraps, evaluator);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < pop.size(); i = next++)
                    evaluate_one(pop[i], grammar, params.max_wraps, evaluator);
            } catch (...) {
                errors[w] = std::current_exception();
                next = pop.size();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

EvolveResult evolve(const GEParams& params, const Grammar& grammar, Evaluator& evaluator,
                    const GenerationObserver& observer) {
    params.check();
    Rng rng(params.rng_seed);
    const auto pop_size = static_cast<std::size_t>(params.population);
    const auto start_stats = evaluator.stats();

    std::vector<Individual> pop(pop_size);
    for (auto& ind : pop) ind.genotype = random_genotype(static_cast<std::size_t>(params.codon_count), rng);

    EvolveResult result;
    bool have_best = false;
    std::vector<double> fit(pop_size);

    for (int gen = 0; gen < params.generations; ++gen) {
        evaluate_population(pop, params, grammar, evaluator);

        double sum = 0;
        double worst = 0;
        std::size_t n_feasible = 0;
        for (std::size_t i = 0; i < pop_size; ++i) {
            fit[i] = pop[i].rank_fitness();
            if (!have_best || fit[i] < result.best.rank_fitness()) {
                result.best = pop[i];
                result.best_generation = gen;
                have_best = true;
            }
            if (pop[i].feasible) {
                sum += fit[i];
                worst = n_feasible == 0 ? fit[i] : std::max(worst, fit[i]);
                ++n_feasible;
            }
        }
        const auto now = evaluator.stats();
        GenerationLog row;
        row.generation = gen;
        row.best = *std::min_element(fit.begin(), fit.end());
        row.mean = n_feasible ? sum / static_cast<double>(n_feasible) : kInfeasibleFitness;
        row.worst = n_feasible ? worst : kInfeasibleFitness;
        row.unique_evals = now.unique_keys - start_stats.unique_keys;
        row.memo_hits = (now.lookups - start_stats.lookups) - row.unique_evals;
        result.log.push_back(row);
        if (observer) observer(gen, pop);
        if (gen + 1 == params.generations) break;

        std::vector<std::size_t> order(pop_size);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fit[a] < fit[b]; });

        std::vector<Individual> next;
        next.reserve(pop_size);
        for (int e = 0; e < params.elitism; ++e) next.push_back(pop[order[static_cast<std::size_t>(e)]]);
        while (next.size() < pop_size) {
            const auto& a = pop[tournament_select(fit, params.tournament_size, rng)].genotype;
            const auto& b = pop[tournament_select(fit, params.tournament_size, rng)].genotype;
            auto [c1, c2] = crossover(a, b, params.p_crossover, rng);
            next.emplace_back().genotype = mutate(std::move(c1), params.p_mutation, rng);
            if (next.size() < pop_size) next.emplace_back().genotype = mutate(std::move(c2), params.p_mutation, rng);
        }
        pop = std::move(next);
    }

    const auto end_stats = evaluator.stats();
    result.memo = {end_stats.lookups - start_stats.lookups, end_stats.unique_keys - start_stats.unique_keys,
                   end_stats.simulations - start_stats.simulations};
    return result;
}

void write_log_csv(std::ostream& out, std::span<const GenerationLog> log) {
    out << "generation,best,mean,worst,unique_evals,memo_hits\n";
    for (const auto& r : log)
        out << fmt::format("{},{:.12g},{:.12g},{:.12g},{},{}\n", r.generation, r.best, r.mean, r.worst,
                           r.unique_evals, r.memo_hits);
}

}  // namespace cachege
