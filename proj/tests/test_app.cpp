#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cachege/app.hpp"
#include "cachege/error.hpp"
#include "doctest.h"

using namespace cachege;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    auto p = fs::temp_directory_path() / ("cachege_test_" + name + "_" + std::to_string(std::random_device{}()));
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("simulate command on a two-record trace") {
    const auto trace = parse_din_text("2 0x0\n0 0x100\n");
    const auto table = surrogate_generate(1);
    const auto out = app::run_simulate(baseline_config(), trace, table, {});
    CHECK(out.sim.icache.accesses == 1);
    CHECK(out.sim.icache.demand_misses == 1);
    CHECK(out.sim.dcache.accesses == 1);
    CHECK(out.sim.dcache.demand_misses == 1);
    const auto cost = table.lookup(16384, 32, 4);
    const DramParams d;
    const double expect_t = 2 * (cost.time + d.access_time + 32 / d.bandwidth);
    CHECK(out.metrics.exec_time == doctest::Approx(expect_t).epsilon(1e-12));
    std::ostringstream os;
    app::print_simulate(os, out);
    CHECK(os.str().find("I-cache: accesses=1 hits=0 demand_misses=1") != std::string::npos);
    std::ostringstream csv;
    app::write_simulate_csv(csv, out);
    CHECK(csv.str().find("exec_time_s") != std::string::npos);
}

TEST_CASE("simulate rejects an infeasible config and handles an empty trace") {
    const auto table = surrogate_generate(1);
    auto bad = baseline_config();
    bad.icache = {512, 32, 64, Replacement::Lru, FetchPolicy::Demand};
    CHECK_THROWS_WITH_AS(app::run_simulate(bad, Trace{}, table, {}), doctest::Contains("I-cache"), ValidationError);
    const auto empty = app::run_simulate(baseline_config(), Trace{}, table, {});
    CHECK(empty.sim == SimResult{});
    CHECK(empty.metrics == Metrics{0, 0});
}

TEST_CASE("optimize over a one-point grammar") {
    const auto trace = gen_synthetic(Profile::Loop, 2000, 1);
    const auto table = surrogate_generate(1);
    const auto grammar = parse_bnf(Subspace::single(baseline_config()).to_bnf());
    app::RunConfig cfg;
    cfg.runs = 1;
    cfg.ge.generations = 5;
    cfg.ge.population = 8;
    const auto r = app::run_optimize(cfg, trace, table, grammar);
    CHECK(r.best_fitness == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.total_simulations == 1);
    CHECK(r.total_lookups == 40);
    CHECK(r.memo_savings_pct == doctest::Approx(100.0 * (1 - 1.0 / 40)).epsilon(1e-12));
    CHECK(r.best_count == 1);
}

TEST_CASE("optimize bundle and report") {
    const auto trace = gen_synthetic(Profile::Mixed, 2000, 2);
    const auto table = surrogate_generate(1);
    app::RunConfig cfg;
    cfg.benchmark = "mixbench";
    cfg.runs = 3;
    cfg.ge.generations = 4;
    cfg.ge.population = 10;
    const auto r = app::run_optimize(cfg, trace, table, default_grammar());
    REQUIRE(r.runs.size() == 3);
    CHECK(r.best_count >= 1);
    CHECK(r.best_count <= 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(r.runs[k].seed == cfg.ge.rng_seed + k);
    CHECK(r.stddev_fitness >= 0);
    CHECK(r.best_fitness <= r.mean_fitness);
    // one memo for all runs: later runs reuse earlier simulations
    std::uint64_t unique = 0;
    for (const auto& run : r.runs) unique += run.evolution.memo.simulations;
    CHECK(unique == r.total_simulations);

    const auto dir = scratch_dir("bundle");
    app::write_optimize_bundle(r, dir);
    for (const char* f : {"run_00_log.csv", "run_02_log.csv", "runs.csv", "summary.csv", "best.txt",
                          "percent_of_baseline.csv"})
        CHECK(fs::exists(dir / f));
    CHECK(slurp(dir / "best.txt").rfind(r.best_phenotype + "\n", 0) == 0);

    const std::vector<fs::path> bundles{dir};
    const auto rows = app::run_report(bundles);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].benchmark == "mixbench");
    double tp = 0;
    for (const auto& run : r.runs) tp += run.time_pct;
    CHECK(rows[0].time_pct == doctest::Approx(tp / 3).epsilon(1e-6));
    fs::remove_all(dir);
}

TEST_CASE("report of a baseline-only bundle is 100 percent") {
    const auto trace = gen_synthetic(Profile::Strided, 1000, 1);
    const auto table = surrogate_generate(1);
    app::RunConfig cfg;
    cfg.benchmark = "flat";
    cfg.runs = 2;
    cfg.ge.generations = 2;
    cfg.ge.population = 4;
    const auto grammar = parse_bnf(Subspace::single(baseline_config()).to_bnf());
    const auto r = app::run_optimize(cfg, trace, table, grammar);
    const auto dir = scratch_dir("flat");
    app::write_optimize_bundle(r, dir);
    const std::vector<fs::path> bundles{dir};
    const auto rows = app::run_report(bundles);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].time_pct == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(rows[0].energy_pct == doctest::Approx(100.0).epsilon(1e-9));
    std::ostringstream os;
    app::write_percent_csv(os, rows);
    CHECK(os.str() == "benchmark,energy_pct,time_pct\nflat,100.000000,100.000000\n");
    fs::remove_all(dir);
    CHECK_THROWS_AS(app::run_report(bundles), InputError);
}

TEST_CASE("characterization source") {
    app::CharSource src;
    src.surrogate_seed = 4;
    CHECK(src.load().rows() == surrogate_generate(4).rows());
    src.path = "/nonexistent/table.csv";
    CHECK_THROWS_AS(src.load(), InputError);
}
