#include "cachege/app.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "cachege/error.hpp"

namespace cachege::app {

CharTable CharSource::load() const {
    if (path) return load_table_file(*path, strict);
    return surrogate_generate(surrogate_seed);
}

ModelContext make_context(std::span<const TraceRecord> trace, const CharTable& table, const ModelOptions& opts) {
    opts.dram.check();
    return {trace, &table, opts.dram, opts.miss_mode, opts.sim_seed};
}

SimulateOutput run_simulate(const CacheConfig& config, std::span<const TraceRecord> trace, const CharTable& table,
                            const ModelOptions& opts) {
    if (auto v = validate(config); !v) throw ValidationError("infeasible configuration: " + v.reason);
    const auto ctx = make_context(trace, table, opts);
    SimulateOutput out{config, simulate(config, trace, ctx.sim_seed), {}};
    out.metrics = evaluate_metrics(config, out.sim, table, ctx.dram, ctx.miss_mode);
    return out;
}

namespace {

void print_side(std::ostream& out, const char* name, const SimStats& s) {
    out << fmt::format("{}: accesses={} hits={} demand_misses={} prefetch_fills={} write_backs={} "
                       "write_throughs={} final_flush={}\n",
                       name, s.accesses, s.hits(), s.demand_misses, s.prefetch_fills, s.write_backs,
                       s.write_throughs, s.final_flush);
}

}  // namespace

void print_simulate(std::ostream& out, const SimulateOutput& r) {
    out << render_flags(r.config) << '\n';
    print_side(out, "I-cache", r.sim.icache);
    print_side(out, "D-cache", r.sim.dcache);
    out << fmt::format("exec_time_s={:.12g}\nenergy_j={:.12g}\n", r.metrics.exec_time, r.metrics.energy);
}

void write_simulate_csv(std::ostream& out, const SimulateOutput& r) {
    const auto& i = r.sim.icache;
    const auto& d = r.sim.dcache;
    out << "phenotype,i_accesses,i_demand_misses,i_prefetch_fills,d_accesses,d_demand_misses,d_prefetch_fills,"
           "d_write_backs,d_write_throughs,d_final_flush,exec_time_s,energy_j\n";
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{:.12g},{:.12g}\n", render_flags(r.config), i.accesses,
                       i.demand_misses, i.prefetch_fills, d.accesses, d.demand_misses, d.prefetch_fills,
                       d.write_backs, d.write_throughs, d.final_flush, r.metrics.exec_time, r.metrics.energy);
}

OptimizeResult run_optimize(const RunConfig& config, std::span<const TraceRecord> trace, const CharTable& table,
                            const Grammar& grammar) {
    if (config.runs < 1) throw ValidationError("runs must be >= 1");
    config.ge.check();
    if (auto v = validate(config.baseline); !v) throw ValidationError("infeasible baseline: " + v.reason);

    const auto ctx = make_context(trace, table, config.model);
    OptimizeResult result;
    result.benchmark = config.benchmark;
    result.baseline_phenotype = render_flags(config.baseline);
    result.baseline = measure(config.baseline, ctx);

    Evaluator evaluator(ctx, result.baseline, config.model.weights);
    for (int run = 0; run < config.runs; ++run) {
        if (!config.share_memo) evaluator.clear();
        GEParams ge = config.ge;
        ge.rng_seed = config.ge.rng_seed + static_cast<std::uint64_t>(run);
        RunRecord rec;
        rec.run = run;
        rec.seed = ge.rng_seed;
        rec.evolution = evolve(ge, grammar, evaluator);
        if (const auto& m = rec.evolution.best.metrics) {
            rec.time_pct = 100.0 * m->exec_time / result.baseline.exec_time;
            rec.energy_pct = 100.0 * m->energy / result.baseline.energy;
        } else {
            rec.time_pct = rec.energy_pct = std::nan("");
        }
        result.total_lookups += rec.evolution.memo.lookups;
        result.total_simulations += rec.evolution.memo.simulations;
        result.runs.push_back(std::move(rec));
    }

    double sum = 0;
    result.best_fitness = kInfeasibleFitness;
    for (const auto& r : result.runs) {
        const double f = r.evolution.best.rank_fitness();
        sum += f;
        if (f < result.best_fitness) {
            result.best_fitness = f;
            result.best_phenotype = r.evolution.best.phenotype.value_or("");
            result.best_metrics = r.evolution.best.metrics.value_or(Metrics{});
        }
    }
    const double n = static_cast<double>(result.runs.size());
    result.mean_fitness = sum / n;
    double var = 0;
    for (const auto& r : result.runs) {
        const double f = r.evolution.best.rank_fitness();
        var += (f - result.mean_fitness) * (f - result.mean_fitness);
        if (std::abs(f - result.best_fitness) <= 1e-12 * std::abs(result.best_fitness)) ++result.best_count;
    }
    result.stddev_fitness = std::sqrt(var / n);
    result.memo_savings_pct =
        result.total_lookups ? 100.0 * (1.0 - static_cast<double>(result.total_simulations) /
                                                  static_cast<double>(result.total_lookups))
                             : 0.0;
    return result;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + p.string());
    return out;
}

}  // namespace

void write_best(std::ostream& out, const std::string& phenotype, const Metrics& metrics, double fit) {
    out << phenotype << '\n';
    out << fmt::format("exec_time_s={:.12g}\nenergy_j={:.12g}\nfitness={:.12g}\n", metrics.exec_time, metrics.energy,
                       fit);
}

void write_optimize_bundle(const OptimizeResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& run : r.runs) {
        auto out = open_out(dir / fmt::format("run_{:02}_log.csv", run.run));
        write_log_csv(out, run.evolution.log);
    }
    {
        auto out = open_out(dir / "runs.csv");
        out << "run,seed,fitness,exec_time_s,energy_j,time_pct,energy_pct,unique_evals,simulations,memo_hits,"
               "phenotype\n";
        for (const auto& run : r.runs) {
            const auto& best = run.evolution.best;
            const auto m = best.metrics.value_or(Metrics{});
            out << fmt::format("{},{},{:.12g},{:.12g},{:.12g},{:.6f},{:.6f},{},{},{},{}\n", run.run, run.seed,
                               best.rank_fitness(), m.exec_time, m.energy, run.time_pct, run.energy_pct,
                               run.evolution.memo.unique_keys, run.evolution.memo.simulations,
                               run.evolution.memo.hits(), best.phenotype.value_or(""));
        }
    }
    {
        auto out = open_out(dir / "summary.csv");
        out << "key,value\n";
        out << "benchmark," << r.benchmark << '\n';
        out << "baseline," << r.baseline_phenotype << '\n';
        out << fmt::format("baseline_exec_time_s,{:.12g}\nbaseline_energy_j,{:.12g}\n", r.baseline.exec_time,
                           r.baseline.energy);
        out << fmt::format("runs,{}\nmean_fitness,{:.12g}\nstddev_fitness,{:.12g}\nbest_fitness,{:.12g}\n",
                           r.runs.size(), r.mean_fitness, r.stddev_fitness, r.best_fitness);
        out << fmt::format("best_count,{}\nbest_phenotype,{}\n", r.best_count, r.best_phenotype);
        double tp = 0, ep = 0;
        for (const auto& run : r.runs) {
            tp += run.time_pct;
            ep += run.energy_pct;
        }
        const double n = static_cast<double>(r.runs.size());
        out << fmt::format("mean_time_pct,{:.6f}\nmean_energy_pct,{:.6f}\n", tp / n, ep / n);
        out << fmt::format("total_lookups,{}\ntotal_simulations,{}\nmemo_savings_pct,{:.6f}\n", r.total_lookups,
                           r.total_simulations, r.memo_savings_pct);
    }
    {
        auto out = open_out(dir / "best.txt");
        write_best(out, r.best_phenotype, r.best_metrics, r.best_fitness);
    }
    {
        auto out = open_out(dir / "percent_of_baseline.csv");
        double tp = 0, ep = 0;
        for (const auto& run : r.runs) {
            tp += run.time_pct;
            ep += run.energy_pct;
        }
        const double n = static_cast<double>(r.runs.size());
        const PercentRow row{r.benchmark, ep / n, tp / n};
        write_percent_csv(out, std::span(&row, 1));
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::vector<PercentRow> run_report(std::span<const std::filesystem::path> bundles) {
    std::vector<PercentRow> rows;
    for (const auto& dir : bundles) {
        PercentRow row;
        row.benchmark = dir.filename().string();
        {
            std::ifstream in(dir / "summary.csv");
            if (!in) throw InputError("cannot read " + (dir / "summary.csv").string());
            std::string line;
            while (std::getline(in, line))
                if (line.rfind("benchmark,", 0) == 0) row.benchmark = line.substr(10);
        }
        std::ifstream in(dir / "runs.csv");
        if (!in) throw InputError("cannot read " + (dir / "runs.csv").string());
        std::string line;
        std::getline(in, line);
        const auto header = split_csv_line(line);
        std::map<std::string, std::size_t> col;
        for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
        if (!col.contains("time_pct") || !col.contains("energy_pct"))
            throw InputError((dir / "runs.csv").string() + ": missing time_pct/energy_pct columns");
        double tp = 0, ep = 0;
        std::size_t n = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto cells = split_csv_line(line);
            if (cells.size() != header.size()) throw InputError((dir / "runs.csv").string() + ": ragged row");
            tp += std::stod(cells[col["time_pct"]]);
            ep += std::stod(cells[col["energy_pct"]]);
            ++n;
        }
        if (n == 0) throw InputError((dir / "runs.csv").string() + ": no runs");
        row.time_pct = tp / static_cast<double>(n);
        row.energy_pct = ep / static_cast<double>(n);
        rows.push_back(row);
    }
    return rows;
}

void write_percent_csv(std::ostream& out, std::span<const PercentRow> rows) {
    out << "benchmark,energy_pct,time_pct\n";
    for (const auto& r : rows) out << fmt::format("{},{:.6f},{:.6f}\n", r.benchmark, r.energy_pct, r.time_pct);
}

}  // namespace cachege::app
