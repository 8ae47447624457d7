// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cachege/app.hpp"
#include "cachege/cachesim.hpp"
#include "cachege/charmodel.hpp"
#include "cachege/evaluator.hpp"
#include "cachege/ge.hpp"
#include "cachege/grammar.hpp"
#include "cachege/objectives.hpp"
#include "cachege/oracle.hpp"
#include "cachege/trace.hpp"

using namespace cachege;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kIdentityTol = 1e-12;      // fitness identity, relative linearity
constexpr double kEnergyAbsTol = 1e-10;     // J, hand example
constexpr double kGoldenBudget = 1.0;       // s
constexpr double kSimOracleBudget = 10.0;   // s
constexpr double kGeOracleBudget = 120.0;   // s
constexpr double kMemoBudget = 600.0;       // s
constexpr double kMaxUniqueRatio = 0.20;
constexpr int kMinOracleHits = 9;  // of 10 seeds
constexpr std::uint64_t kWideSeeds = 200;

struct Verdict {
    bool pass = true;
    std::string detail;
};

class Checker {
public:
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok_ = false;
            if (!failures_.empty()) failures_ += "; ";
            failures_ += what;
        }
    }
    Verdict verdict(std::string detail) const {
        if (!ok_) return {false, detail.empty() ? failures_ : failures_ + " | " + detail};
        return {true, std::move(detail)};
    }

private:
    bool ok_ = true;
    std::string failures_;
};

struct Model {
    Trace trace;
    CharTable table;
    ModelContext ctx;
    Metrics base;

    Model(Profile profile, std::size_t n, std::uint64_t trace_seed, std::uint64_t table_seed)
        : trace(gen_synthetic(profile, n, trace_seed)), table(surrogate_generate(table_seed)) {
        ctx.trace = trace;
        ctx.table = &table;
        base = measure(baseline_config(), ctx);
    }
};

Verdict golden_mapping() {
    Checker c;
    const Genotype g{20, 35, 71, 96, 123, 210, 137, 7, 5};
    const auto m = map_genotype(g, default_grammar(), 3);
    c.expect(m.ok(), "mapping failed");
    if (!m.ok()) return c.verdict("");
    const char* expected_values[] = {"8192", "64", "r", "1", "m", "2048", "16", "f", "32", "a", "n"};
    const std::size_t expected_codon[] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 0, 1};
    const int expected_wrap[] = {0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1};
    c.expect(m.steps.size() == 11, "expected 11 decoding steps");
    std::istringstream words(*m.phenotype);
    std::vector<std::string> tokens{std::istream_iterator<std::string>(words), {}};
    c.expect(tokens.size() == 22, "phenotype should hold 11 flag/value pairs");
    for (std::size_t k = 0; k < 11 && k < m.steps.size() && tokens.size() == 22; ++k) {
        c.expect(tokens[2 * k + 1] == expected_values[k], fmt::format("step {} value {}", k, tokens[2 * k + 1]));
        c.expect(m.steps[k].codon_index == expected_codon[k], fmt::format("step {} codon index", k));
        c.expect(m.steps[k].wrap == expected_wrap[k], fmt::format("step {} wrap", k));
    }
    return c.verdict("8192 64 r 1 m 2048 16 f | dassoc 32 (5 mod 8; hand walk-through says 4) | wrap -> a n");
}

Verdict simulator_oracle() {
    Checker c;
    const CacheSide dm{64, 16, 1, Replacement::Lru, FetchPolicy::Demand};
    auto icfg = [](CacheSide s) {
        CacheConfig cfg;
        cfg.icache = s;
        return cfg;
    };
    auto I = [](std::uint64_t a) { return TraceRecord{AccessKind::IFetch, a}; };

    auto cold = simulate(icfg(dm), Trace{I(0), I(0)}, 1).icache;
    c.expect(cold.accesses == 2 && cold.demand_misses == 1, "cold miss/hit");

    auto conflict = simulate(icfg(dm), Trace{I(0), I(0x40), I(0)}, 1).icache;
    c.expect(conflict.demand_misses == 3, "direct-mapped conflict");

    const Trace abacb{I(0x0), I(0x10), I(0x0), I(0x20), I(0x10)};
    auto lru = simulate(icfg({32, 16, 2, Replacement::Lru, FetchPolicy::Demand}), abacb, 1).icache;
    auto fifo = simulate(icfg({32, 16, 2, Replacement::Fifo, FetchPolicy::Demand}), abacb, 1).icache;
    c.expect(lru.demand_misses == 4, "LRU on A B A C B");
    c.expect(fifo.demand_misses == 3, "FIFO on A B A C B");

    auto pf = simulate(icfg({64, 16, 1, Replacement::Lru, FetchPolicy::MissPrefetch}),
                       Trace{I(0x0), I(0x10), I(0x20), I(0x30)}, 1)
                  .icache;
    c.expect(pf.demand_misses == 2 && pf.prefetch_fills == 2 && pf.accesses == 4, "prefetch on miss");

    const Trace writes{{AccessKind::Write, 0x0}, {AccessKind::Write, 0x0}, {AccessKind::Read, 0x40},
                       {AccessKind::Write, 0x80}};
    CacheConfig wcfg;
    wcfg.dcache = dm;
    auto wb = simulate(wcfg, writes, 1).dcache;
    wcfg.dwback = WritePolicy::WriteThrough;
    auto wt = simulate(wcfg, writes, 1).dcache;
    c.expect(wb.write_backs == 1 && wb.write_throughs == 0 && wb.final_flush == 1 && wb.demand_misses == 3,
             "write-back counters");
    c.expect(wt.write_backs == 0 && wt.write_throughs == 3 && wt.final_flush == 0 && wt.demand_misses == 3,
             "write-through counters");

    std::mt19937_64 rng(2024);
    int agree = 0;
    for (int trial = 0; trial < 100; ++trial) {
        // one set: size = block * assoc
        std::uint32_t block, ways;
        do {
            block = kLineSizes[rng() % 4];
            ways = kAssocs[rng() % 8];
        } while (block * ways < 512);
        Trace t(1000);
        for (auto& r : t) r = {AccessKind::IFetch, rng() % (16 * block * ways)};
        const auto s = simulate(icfg({block * ways, block, ways, Replacement::Lru, FetchPolicy::Demand}), t, 1);
        agree += s.icache.demand_misses == reference_lru(t, block, ways);
    }
    c.expect(agree == 100, fmt::format("reference LRU agreement {}/100", agree));
    return c.verdict("7 hand-traced scenarios exact; 100/100 random traces match the reference LRU");
}

Verdict model_identities() {
    Checker c;
    const Metrics base{1.234e-3, 5.678e-4};
    c.expect(std::abs(fitness(base, base) - 1.0) <= kIdentityTol, "fitness(baseline, baseline) != 1");

    const DramParams dram;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1e6);
    double worst = 0;
    for (int k = 0; k < 1000; ++k) {
        SideInputs i{u(rng), u(rng) / 20, {1e-9, 2e-11}, 32};
        SideInputs d{u(rng), u(rng) / 20, {1.5e-9, 3e-11}, 64};
        const double t1 = exec_time(i, d, dram), e1 = energy(i, d, dram);
        i.accesses *= 2, i.misses *= 2, d.accesses *= 2, d.misses *= 2;
        const double t2 = exec_time(i, d, dram), e2 = energy(i, d, dram);
        worst = std::max({worst, std::abs(t2 - 2 * t1) / (2 * t1), std::abs(e2 - 2 * e1) / (2 * e1)});
    }
    c.expect(worst <= kIdentityTol, fmt::format("linearity error {:.3g}", worst));

    const SideInputs i{100, 10, {0, 1e-11}, 32};
    const SideInputs z{0, 0, {0, 1e-11}, 32};
    const double hand = 100 * 1e-11 + 10 * 1e-11 * 32 + 10 * 1.051 * (3.9889e-9 + 32 / 6.7108864e9);
    const double got = energy(i, z, dram);
    c.expect(std::abs(got - hand) <= kEnergyAbsTol, fmt::format("energy {:.12g} vs {:.12g}", got, hand));
    return c.verdict(fmt::format("identity exact, linearity err {:.2g}, energy {:.10g} J", worst, got));
}

Verdict search_space_count() {
    const auto n = default_grammar().count_derivations();
    return {n == 10616832ull, fmt::format("{} derivations", n)};
}

Subspace oracle_subspace() {
    auto sub = Subspace::single(baseline_config());
    sub.isize = {512, 65536};
    sub.dsize = {512, 65536};
    sub.iassoc = {1, 4};
    sub.dassoc = {1, 4};
    sub.ifetch = {FetchPolicy::Demand, FetchPolicy::MissPrefetch};
    // dwback is left fixed: no write-traffic term, so it never changes fitness
    sub.dbsize = {16, 32};
    return sub;
}

Verdict ge_vs_oracle() {
    Checker c;
    const Model model(Profile::Mixed, 10000, 1, 1);
    const auto sub = oracle_subspace();
    c.expect(sub.cardinality() == 64, "subspace is not 64 points");
    const auto truth = exhaustive(sub, model.ctx, model.base);
    c.expect(truth.ranked.size() == 64 && truth.infeasible.empty(), "all 64 points should be feasible");
    const auto& optimum = truth.ranked.front();
    std::size_t co_optimal = 0;
    for (const auto& r : truth.ranked) co_optimal += r.fitness == optimum.fitness;
    const auto grammar = parse_bnf(sub.to_bnf());
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Evaluator ev(model.ctx, model.base);
        GEParams p;
        p.population = 20;
        p.generations = 20;
        p.rng_seed = seed;
        const auto r = evolve(p, grammar, ev);
        // any phenotype tied with the optimum counts
        hits += r.best.fitness && *r.best.fitness == optimum.fitness;
    }
    c.expect(hits >= kMinOracleHits, fmt::format("optimum found by {}/10 seeds", hits));

    // Context only, not part of the verdict: hit rate over a wider seed range.
    Evaluator shared(model.ctx, model.base);
    int wide = 0;
    for (std::uint64_t seed = 1; seed <= kWideSeeds; ++seed) {
        GEParams p;
        p.population = 20;
        p.generations = 20;
        p.rng_seed = seed;
        const auto r = evolve(p, grammar, shared);
        wide += r.best.fitness && *r.best.fitness == optimum.fitness;
    }
    return c.verdict(fmt::format("optimum f={:.6f} ({} co-optimal), seeds 1-10: {}/10, seeds 1-{}: {}/{}",
                                 optimum.fitness, co_optimal, hits, kWideSeeds, wide, kWideSeeds));
}

Verdict memoization() {
    Checker c;
    const Model model(Profile::Mixed, 10000, 1, 1);
    const GEParams defaults;  // 50 x 100
    double worst_ratio = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        Evaluator ev(model.ctx, model.base);
        GEParams p = defaults;
        p.rng_seed = seed;
        std::set<std::string> feasible, seen;
        std::uint64_t evaluated = 0;
        const auto r = evolve(p, default_grammar(), ev, [&](int, const std::vector<Individual>& pop) {
            for (const auto& ind : pop) {
                if (!ind.phenotype) continue;
                ++evaluated;
                seen.insert(memo_key(*ind.phenotype));
                if (ind.feasible) feasible.insert(memo_key(*ind.phenotype));
            }
        });
        c.expect(r.memo.simulations == feasible.size(),
                 fmt::format("seed {}: {} simulations vs {} feasible keys", seed, r.memo.simulations,
                             feasible.size()));
        c.expect(r.memo.lookups == evaluated && evaluated == 5000, fmt::format("seed {}: lookups", seed));
        c.expect(r.memo.unique_keys == seen.size(), fmt::format("seed {}: unique keys", seed));
        const double ratio = static_cast<double>(r.log.back().unique_evals) / 5000.0;
        worst_ratio = std::max(worst_ratio, ratio);
        c.expect(ratio <= kMaxUniqueRatio, fmt::format("seed {}: unique ratio {:.3f}", seed, ratio));
    }
    return c.verdict(fmt::format("simulations == distinct feasible keys; worst unique ratio {:.1f}%",
                                 100 * worst_ratio));
}

std::map<std::string, std::string> bundle_files(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        out[e.path().filename().string()] = ss.str();
    }
    return out;
}

Verdict determinism() {
    Checker c;
    const Model model(Profile::Mixed, 10000, 1, 1);
    app::RunConfig cfg;
    cfg.benchmark = "mixed";
    cfg.runs = 3;
    cfg.ge.population = 30;
    cfg.ge.generations = 30;
    const auto root = fs::temp_directory_path() / fmt::format("cachege_accept_{}", std::random_device{}());
    std::vector<std::map<std::string, std::string>> bundles;
    for (int jobs : {1, 1, 4}) {
        cfg.ge.jobs = jobs;
        const auto r = app::run_optimize(cfg, model.trace, model.table, default_grammar());
        const auto dir = root / fmt::format("b{}", bundles.size());
        app::write_optimize_bundle(r, dir);
        bundles.push_back(bundle_files(dir));
    }
    fs::remove_all(root);
    c.expect(bundles[0].size() == 7, fmt::format("bundle holds {} files", bundles[0].size()));
    c.expect(bundles[0] == bundles[1], "two consecutive runs differ");
    c.expect(bundles[0] == bundles[2], "jobs=4 differs from jobs=1");
    return c.verdict(fmt::format("{} bundle files byte-identical across 2 runs and jobs=4", bundles[0].size()));
}

Verdict lru_inclusion() {
    Checker c;
    std::mt19937_64 rng(77);
    int violations = 0;
    for (int trial = 0; trial < 50; ++trial) {
        Trace t(1000);
        for (auto& r : t) r = {AccessKind::IFetch, rng() % 2048};
        CacheConfig four, eight;
        four.icache = {4 * 64, 64, 4, Replacement::Lru, FetchPolicy::Demand};
        eight.icache = {8 * 64, 64, 8, Replacement::Lru, FetchPolicy::Demand};
        const auto m4 = simulate(four, t, 1).icache.demand_misses;
        const auto m8 = simulate(eight, t, 1).icache.demand_misses;
        if (m8 > m4) ++violations;
        if (m4 != reference_lru(t, 64, 4) || m8 != reference_lru(t, 64, 8)) ++violations;
    }
    c.expect(violations == 0, fmt::format("{} violations", violations));
    return c.verdict("misses(8) <= misses(4) on 50/50 traces, simulator equal to the reference LRU");
}

struct Criterion {
    const char* name;
    std::function<Verdict()> run;
    double budget_s;  // 0 = no wall-clock limit
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"golden mapping", golden_mapping, kGoldenBudget},
        {"simulator oracle suite", simulator_oracle, kSimOracleBudget},
        {"model identities", model_identities, 0},
        {"search-space count", search_space_count, 0},
        {"GE vs exhaustive oracle", ge_vs_oracle, kGeOracleBudget},
        {"memoization", memoization, kMemoBudget},
        {"determinism", determinism, 0},
        {"LRU inclusion", lru_inclusion, 0},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = cr.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (cr.budget_s > 0 && secs > cr.budget_s) {
            v.pass = false;
            v.detail += fmt::format(" (over the {:.0f} s budget)", cr.budget_s);
        }
        failed += !v.pass;
        std::printf("[%s] %s: %s [%.2f s]\n", v.pass ? "PASS" : "FAIL", cr.name, v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed ? 1 : 0;
}
