// cachege: L1 cache design-space exploration by grammatical evolution.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "cachege/app.hpp"
#include "cachege/error.hpp"
#include "cachege/kvfile.hpp"

using namespace cachege;
namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInternal = 1;

// Options that may also come from a --config key=value file. Flags win.
class Bindings {
public:
    template <class T>
    CLI::Option* add(CLI::App* sub, const std::string& flag, T& var, const std::string& key, const std::string& help) {
        auto* opt = sub->add_option(flag, var, help);
        entries_.push_back({sub, opt, key, [&var, key](const std::string& text) {
                                if (!CLI::detail::lexical_cast(text, var))
                                    throw InputError(fmt::format("config key {}: cannot parse '{}'", key, text));
                            }});
        return opt;
    }

    void apply(const KeyValueFile& kv, const CLI::App* sub) const {
        for (const auto& e : entries_) {
            if (e.owner != sub || e.option->count() > 0) continue;
            if (auto v = kv.get(e.key)) e.set(*v);
        }
    }

private:
    struct Entry {
        const CLI::App* owner;
        CLI::Option* option;
        std::string key;
        std::function<void(const std::string&)> set;
    };
    std::vector<Entry> entries_;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct ModelArgs {
    std::string trace;
    std::optional<std::size_t> max_records;
    std::string char_path;
    std::uint64_t surrogate_seed = 1;
    bool strict_char = false;
    std::string dram_file;
    double dram_access_time = DramParams{}.access_time;
    double dram_bandwidth = DramParams{}.bandwidth;
    double dram_power = DramParams{}.access_power;
    std::uint64_t dram_size = DramParams{}.size_bytes;
    std::string miss_mode = "demand_plus_prefetch";
    double w_time = 0.5;
    std::uint64_t sim_seed = kDefaultSimSeed;

    CLI::Option* dram_opts[4] = {};
};

void add_model_options(CLI::App* sub, ModelArgs& m, Bindings& b) {
    b.add(sub, "--trace", m.trace, "trace", "din trace file");
    b.add(sub, "--max-records", m.max_records, "max_records", "read at most this many trace records");
    b.add(sub, "--char", m.char_path, "char", "characterization CSV (default: surrogate table)");
    b.add(sub, "--surrogate-seed", m.surrogate_seed, "surrogate_seed", "seed of the surrogate table");
    sub->add_flag("--strict-char", m.strict_char, "require all 256 triples in --char");
    sub->add_option("--dram", m.dram_file, "key=value file with dram.* keys");
    m.dram_opts[0] = b.add(sub, "--dram-access-time", m.dram_access_time, "dram.access_time_s", "DRAM latency (s)");
    m.dram_opts[1] = b.add(sub, "--dram-bandwidth", m.dram_bandwidth, "dram.bandwidth_bps", "DRAM bandwidth (B/s)");
    m.dram_opts[2] = b.add(sub, "--dram-power", m.dram_power, "dram.access_power_w", "DRAM access power (W)");
    m.dram_opts[3] = b.add(sub, "--dram-size", m.dram_size, "dram.size_bytes", "DRAM size (bytes)");
    b.add(sub, "--miss-mode", m.miss_mode, "miss_mode", "demand_only | demand_plus_prefetch")
        ->check(CLI::IsMember({"demand_only", "demand_plus_prefetch"}));
    b.add(sub, "--w-time", m.w_time, "w_time", "fitness weight of time; energy gets 1 - w_time")
        ->check(CLI::Range(0.0, 1.0));
    b.add(sub, "--sim-seed", m.sim_seed, "sim_seed", "seed for random replacement");
}

app::ModelOptions model_options(const ModelArgs& m) {
    app::ModelOptions o;
    o.dram = {m.dram_size, m.dram_access_time, m.dram_bandwidth, m.dram_power};
    o.dram.check();
    o.miss_mode = *miss_mode_from_string(m.miss_mode);
    o.weights = {m.w_time, 1.0 - m.w_time};
    o.sim_seed = m.sim_seed;
    return o;
}

app::CharSource char_source(const ModelArgs& m) {
    app::CharSource s;
    if (!m.char_path.empty()) s.path = m.char_path;
    s.surrogate_seed = m.surrogate_seed;
    s.strict = m.strict_char;
    return s;
}

Trace load_trace(const ModelArgs& m) {
    if (m.trace.empty()) throw ValidationError("--trace is required");
    return load_din_file(m.trace, m.max_records);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path);
    return out;
}

template <class T, class F>
std::vector<T> parse_values(const std::string& name, const std::string& text, F convert) {
    std::vector<T> out;
    for (const auto& item : split_list(text)) {
        auto v = convert(item);
        if (!v) throw ValidationError(fmt::format("--{}: bad value '{}'", name, item));
        out.push_back(*v);
    }
    return out;
}

std::optional<std::uint32_t> to_u32(const std::string& s) {
    try {
        std::size_t pos = 0;
        const auto v = std::stoul(s, &pos);
        if (pos != s.size()) return std::nullopt;
        return static_cast<std::uint32_t>(v);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"L1 cache design-space exploration with grammatical evolution"};
    cli.require_subcommand(1);
    Bindings bind;
    std::string config_file;
    cli.add_option("--config", config_file, "key=value/INI file with defaults for any option; flags win");

    // simulate
    auto* sim = cli.add_subcommand("simulate", "simulate one configuration and print counters, T and E");
    ModelArgs sim_model;
    std::string sim_flags = render_flags(baseline_config());
    std::string sim_out;
    add_model_options(sim, sim_model, bind);
    bind.add(sim, "--flags", sim_flags, "flags", "Dinero-style flag text (default: baseline)");
    bind.add(sim, "--out", sim_out, "out", "also write a CSV row here");

    // optimize
    auto* opt = cli.add_subcommand("optimize", "search the design space with grammatical evolution");
    ModelArgs opt_model;
    add_model_options(opt, opt_model, bind);
    app::RunConfig run;
    std::string grammar_path, baseline_flags = render_flags(baseline_config()), opt_out;
    bool no_shared_memo = false;
    bind.add(opt, "--grammar", grammar_path, "grammar", "BNF grammar file (default: built-in cache grammar)");
    bind.add(opt, "--baseline", baseline_flags, "baseline", "baseline configuration flag text");
    bind.add(opt, "--benchmark", run.benchmark, "benchmark", "name used in reports (default: trace file stem)");
    bind.add(opt, "--runs", run.runs, "runs", "independent runs")->check(CLI::PositiveNumber);
    bind.add(opt, "--generations", run.ge.generations, "ge.generations", "generations");
    bind.add(opt, "--population", run.ge.population, "ge.population", "population size");
    bind.add(opt, "--p-crossover", run.ge.p_crossover, "ge.p_crossover", "crossover probability");
    bind.add(opt, "--p-mutation", run.ge.p_mutation, "ge.p_mutation", "per-codon mutation probability");
    bind.add(opt, "--elitism", run.ge.elitism, "ge.elitism", "elite individuals kept per generation");
    bind.add(opt, "--tournament", run.ge.tournament_size, "ge.tournament", "tournament size");
    bind.add(opt, "--max-wraps", run.ge.max_wraps, "ge.max_wraps", "maximum genotype wraps");
    bind.add(opt, "--codons", run.ge.codon_count, "ge.codons", "codons per genotype");
    bind.add(opt, "--seed", run.ge.rng_seed, "seed", "master seed; run i uses seed + i");
    bind.add(opt, "--jobs", run.ge.jobs, "jobs", "parallel evaluations")->check(CLI::PositiveNumber);
    opt->add_flag("--no-shared-memo", no_shared_memo, "clear the evaluation memo between runs");
    bind.add(opt, "--out", opt_out, "out", "output directory");

    // exhaustive
    auto* exh = cli.add_subcommand("exhaustive", "evaluate every point of a reduced subspace");
    ModelArgs exh_model;
    add_model_options(exh, exh_model, bind);
    std::string exh_baseline = render_flags(baseline_config()), exh_out, exh_infeasible_out;
    const auto base = baseline_config();
    std::string lists[11] = {
        std::to_string(base.icache.size), std::to_string(base.icache.block), std::string(1, to_flag(base.icache.repl)),
        std::to_string(base.icache.assoc), std::string(1, to_flag(base.icache.fetch)),
        std::to_string(base.dcache.size), std::to_string(base.dcache.block), std::string(1, to_flag(base.dcache.repl)),
        std::to_string(base.dcache.assoc), std::string(1, to_flag(base.dcache.fetch)),
        std::string(1, to_flag(base.dwback))};
    const char* list_names[11] = {"isize", "ibsize", "irepl", "iassoc", "ifetch", "dsize",
                                  "dbsize", "drepl", "dassoc", "dfetch", "dwback"};
    for (int i = 0; i < 11; ++i)
        bind.add(exh, std::string("--") + list_names[i], lists[i], std::string("subspace.") + list_names[i],
                 "comma-separated allowed values (default: baseline value)");
    std::uint64_t exh_cap = 10000;
    int exh_jobs = 1;
    bind.add(exh, "--baseline", exh_baseline, "baseline", "baseline configuration flag text");
    bind.add(exh, "--cap", exh_cap, "cap", "refuse subspaces larger than this");
    bind.add(exh, "--jobs", exh_jobs, "jobs", "parallel simulations")->check(CLI::PositiveNumber);
    bind.add(exh, "--out", exh_out, "out", "ranked CSV (default: stdout)");
    bind.add(exh, "--infeasible-out", exh_infeasible_out, "infeasible_out", "CSV of infeasible points");

    // gentrace
    auto* gen = cli.add_subcommand("gentrace", "write a synthetic din trace");
    std::string gen_profile = "mixed", gen_out;
    std::size_t gen_n = 10000;
    std::uint64_t gen_seed = 1;
    bind.add(gen, "--profile", gen_profile, "profile", "sequential | loop | strided | random | mixed")
        ->check(CLI::IsMember({"sequential", "loop", "strided", "random", "mixed"}));
    bind.add(gen, "-n,--records", gen_n, "records", "number of records");
    bind.add(gen, "--seed", gen_seed, "seed", "generator seed");
    bind.add(gen, "-o,--out", gen_out, "out", "output file (default: stdout)");

    // characterize
    auto* chr = cli.add_subcommand("characterize", "write a characterization table");
    bool chr_surrogate = false;
    std::uint64_t chr_seed = 1;
    std::string chr_out;
    chr->add_flag("--surrogate", chr_surrogate, "generate the surrogate table")->required();
    bind.add(chr, "--seed", chr_seed, "seed", "surrogate seed");
    bind.add(chr, "-o,--out", chr_out, "out", "output file (default: stdout)");

    // report
    auto* rep = cli.add_subcommand("report", "merge optimize bundles into a percent-of-baseline CSV");
    std::vector<std::string> rep_dirs;
    std::string rep_out;
    rep->add_option("bundles", rep_dirs, "optimize output directories")->required();
    rep->add_option("-o,--out", rep_out, "output file (default: stdout)");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return cli.exit(e);
    } catch (const CLI::ParseError& e) {
        cli.exit(e);
        return kExitValidation;
    }

    try {
        CLI::App* active = cli.get_subcommands().front();
        if (!config_file.empty()) bind.apply(KeyValueFile::load(config_file), active);
        for (auto* m : {&sim_model, &opt_model, &exh_model}) {
            if (m->dram_file.empty()) continue;
            const auto dram = dram_from_kv(KeyValueFile::load(m->dram_file));
            // The file overrides defaults and --config, not explicit flags.
            if (m->dram_opts[0]->count() == 0) m->dram_access_time = dram.access_time;
            if (m->dram_opts[1]->count() == 0) m->dram_bandwidth = dram.bandwidth;
            if (m->dram_opts[2]->count() == 0) m->dram_power = dram.access_power;
            if (m->dram_opts[3]->count() == 0) m->dram_size = dram.size_bytes;
        }

        if (active == sim) {
            const auto trace = load_trace(sim_model);
            const auto table = char_source(sim_model).load();
            const auto result = app::run_simulate(parse_flags(sim_flags), trace, table, model_options(sim_model));
            app::print_simulate(std::cout, result);
            if (!sim_out.empty()) {
                auto out = open_out(sim_out);
                app::write_simulate_csv(out, result);
            }
        } else if (active == opt) {
            if (opt_out.empty()) throw ValidationError("--out is required");
            const auto trace = load_trace(opt_model);
            const auto table = char_source(opt_model).load();
            const Grammar grammar = grammar_path.empty() ? default_grammar() : load_bnf_file(grammar_path);
            run.baseline = parse_flags(baseline_flags);
            run.share_memo = !no_shared_memo;
            run.model = model_options(opt_model);
            if (opt->get_option("--benchmark")->count() == 0 && run.benchmark == "trace")
                run.benchmark = fs::path(opt_model.trace).stem().string();
            const auto result = app::run_optimize(run, trace, table, grammar);
            app::write_optimize_bundle(result, opt_out);
            std::cout << fmt::format("best fitness {:.12g} ({} of {} runs)\n{}\nmemo savings {:.2f}%\n",
                                     result.best_fitness, result.best_count, result.runs.size(),
                                     result.best_phenotype, result.memo_savings_pct);
        } else if (active == exh) {
            const auto trace = load_trace(exh_model);
            const auto table = char_source(exh_model).load();
            Subspace sub;
            auto nums = [&](int i) { return parse_values<std::uint32_t>(list_names[i], lists[i], to_u32); };
            sub.isize = nums(0);
            sub.ibsize = nums(1);
            sub.irepl = parse_values<Replacement>(list_names[2], lists[2], replacement_from_flag);
            sub.iassoc = nums(3);
            sub.ifetch = parse_values<FetchPolicy>(list_names[4], lists[4], fetch_from_flag);
            sub.dsize = nums(5);
            sub.dbsize = nums(6);
            sub.drepl = parse_values<Replacement>(list_names[7], lists[7], replacement_from_flag);
            sub.dassoc = nums(8);
            sub.dfetch = parse_values<FetchPolicy>(list_names[9], lists[9], fetch_from_flag);
            sub.dwback = parse_values<WritePolicy>(list_names[10], lists[10], write_policy_from_flag);
            const auto baseline_cfg = parse_flags(exh_baseline);
            if (auto v = validate(baseline_cfg); !v) throw ValidationError("infeasible baseline: " + v.reason);
            const auto opts = model_options(exh_model);
            const auto ctx = app::make_context(trace, table, opts);
            const auto result = exhaustive(sub, ctx, measure(baseline_cfg, ctx), opts.weights, {exh_cap, exh_jobs});
            if (exh_out.empty()) {
                write_ranked_csv(std::cout, result.ranked);
            } else {
                auto out = open_out(exh_out);
                write_ranked_csv(out, result.ranked);
            }
            if (!exh_infeasible_out.empty()) {
                auto out = open_out(exh_infeasible_out);
                write_infeasible_csv(out, result.infeasible);
            }
        } else if (active == gen) {
            const auto trace = gen_synthetic(*profile_from_string(gen_profile), gen_n, gen_seed);
            if (gen_out.empty()) {
                write_din(std::cout, trace);
            } else {
                auto out = open_out(gen_out);
                write_din(out, trace);
            }
        } else if (active == chr) {
            const auto table = surrogate_generate(chr_seed);
            if (chr_out.empty()) {
                write_table(std::cout, table);
            } else {
                auto out = open_out(chr_out);
                write_table(out, table);
            }
        } else if (active == rep) {
            std::vector<fs::path> dirs(rep_dirs.begin(), rep_dirs.end());
            const auto rows = app::run_report(dirs);
            if (rep_out.empty()) {
                app::write_percent_csv(std::cout, rows);
            } else {
                auto out = open_out(rep_out);
                app::write_percent_csv(out, rows);
            }
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return 0;
}
