#include "cachege/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <list>
#include <mutex>
#include <ostream>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "cachege/error.hpp"

namespace cachege {

Subspace Subspace::full() {
    Subspace s;
    s.isize = s.dsize = {kCacheSizes.begin(), kCacheSizes.end()};
    s.ibsize = s.dbsize = {kLineSizes.begin(), kLineSizes.end()};
    s.iassoc = s.dassoc = {kAssocs.begin(), kAssocs.end()};
    s.irepl = s.drepl = {kReplacements.begin(), kReplacements.end()};
    s.ifetch = s.dfetch = {kFetchPolicies.begin(), kFetchPolicies.end()};
    s.dwback = {kWritePolicies.begin(), kWritePolicies.end()};
    return s;
}

Subspace Subspace::single(const CacheConfig& c) {
    Subspace s;
    s.isize = {c.icache.size};
    s.ibsize = {c.icache.block};
    s.iassoc = {c.icache.assoc};
    s.irepl = {c.icache.repl};
    s.ifetch = {c.icache.fetch};
    s.dsize = {c.dcache.size};
    s.dbsize = {c.dcache.block};
    s.dassoc = {c.dcache.assoc};
    s.drepl = {c.dcache.repl};
    s.dfetch = {c.dcache.fetch};
    s.dwback = {c.dwback};
    return s;
}

namespace {

template <class T, std::size_t N>
void check_list(const char* name, const std::vector<T>& values, const std::array<T, N>& allowed) {
    if (values.empty()) throw ValidationError(fmt::format("subspace list {} is empty", name));
    for (const auto& v : values)
        if (std::find(allowed.begin(), allowed.end(), v) == allowed.end())
            throw ValidationError(fmt::format("subspace list {} holds a value outside the allowed set", name));
}

std::string value_text(std::uint32_t v) { return std::to_string(v); }
template <class E>
std::string value_text(E e) {
    return std::string(1, to_flag(e));
}

template <class T>
std::string alternatives(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += " | ";
        out += value_text(values[i]);
    }
    return out;
}

}  // namespace

void Subspace::check() const {
    check_list("isize", isize, kCacheSizes);
    check_list("ibsize", ibsize, kLineSizes);
    check_list("iassoc", iassoc, kAssocs);
    check_list("irepl", irepl, kReplacements);
    check_list("ifetch", ifetch, kFetchPolicies);
    check_list("dsize", dsize, kCacheSizes);
    check_list("dbsize", dbsize, kLineSizes);
    check_list("dassoc", dassoc, kAssocs);
    check_list("drepl", drepl, kReplacements);
    check_list("dfetch", dfetch, kFetchPolicies);
    check_list("dwback", dwback, kWritePolicies);
}

std::uint64_t Subspace::cardinality() const {
    return std::uint64_t{1} * isize.size() * ibsize.size() * irepl.size() * iassoc.size() * ifetch.size() *
           dsize.size() * dbsize.size() * drepl.size() * dassoc.size() * dfetch.size() * dwback.size();
}

std::vector<CacheConfig> Subspace::enumerate() const {
    std::vector<CacheConfig> out;
    out.reserve(static_cast<std::size_t>(cardinality()));
    CacheConfig c;
    for (auto is : isize)
        for (auto ib : ibsize)
            for (auto ir : irepl)
                for (auto ia : iassoc)
                    for (auto ifc : ifetch)
                        for (auto ds : dsize)
                            for (auto db : dbsize)
                                for (auto dr : drepl)
                                    for (auto da : dassoc)
                                        for (auto dfc : dfetch)
                                            for (auto wb : dwback) {
                                                c.icache = {is, ib, ia, ir, ifc};
                                                c.dcache = {ds, db, da, dr, dfc};
                                                c.dwback = wb;
                                                out.push_back(c);
                                            }
    return out;
}

std::string Subspace::to_bnf() const {
    return fmt::format(
        "<Config> ::= -l1-isize <ISize> -l1-ibsize <IBSize> -l1-irepl <IRepl> -l1-iassoc <IAssoc> "
        "-l1-ifetch <IFetch> -l1-dsize <DSize> -l1-dbsize <DBSize> -l1-drepl <DRepl> -l1-dassoc <DAssoc> "
        "-l1-dfetch <DFetch> -l1-dwback <DWback>\n"
        "<ISize> ::= {}\n<IBSize> ::= {}\n<IRepl> ::= {}\n<IAssoc> ::= {}\n<IFetch> ::= {}\n"
        "<DSize> ::= {}\n<DBSize> ::= {}\n<DRepl> ::= {}\n<DAssoc> ::= {}\n<DFetch> ::= {}\n<DWback> ::= {}\n",
        alternatives(isize), alternatives(ibsize), alternatives(irepl), alternatives(iassoc), alternatives(ifetch),
        alternatives(dsize), alternatives(dbsize), alternatives(drepl), alternatives(dassoc), alternatives(dfetch),
        alternatives(dwback));
}

ExhaustiveResult exhaustive(const Subspace& sub, const ModelContext& ctx, const Metrics& baseline,
                            const FitnessWeights& weights, const ExhaustiveOptions& options) {
    sub.check();
    weights.check();
    if (sub.cardinality() > options.cap)
        throw ValidationError(
            fmt::format("subspace has {} points, above the cap of {}", sub.cardinality(), options.cap));

    const auto configs = sub.enumerate();
    ExhaustiveResult result;
    std::vector<const CacheConfig*> feasible;
    for (const auto& c : configs) {
        if (auto v = validate(c); !v)
            result.infeasible.push_back({c, render_flags(c), v.reason});
        else
            feasible.push_back(&c);
    }

    result.ranked.resize(feasible.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < feasible.size(); i = next++) {
            try {
                const auto& c = *feasible[i];
                const auto m = measure(c, ctx);
                result.ranked[i] = {c, render_flags(c), m, fitness(m, baseline, weights)};
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = feasible.size();
            }
        }
    };
    const auto workers = std::max<std::size_t>(1, std::min<std::size_t>(options.jobs, feasible.size()));
    std::vector<std::thread> threads;
    for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(work);
    work();
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);

    std::sort(result.ranked.begin(), result.ranked.end(), [](const RankedConfig& a, const RankedConfig& b) {
        if (a.fitness != b.fitness) return a.fitness < b.fitness;
        return a.phenotype < b.phenotype;
    });
    return result;
}

void write_ranked_csv(std::ostream& out, std::span<const RankedConfig> ranked) {
    out << "rank,phenotype,exec_time_s,energy_j,fitness\n";
    for (std::size_t i = 0; i < ranked.size(); ++i)
        out << fmt::format("{},{},{:.12g},{:.12g},{:.12g}\n", i + 1, ranked[i].phenotype, ranked[i].metrics.exec_time,
                           ranked[i].metrics.energy, ranked[i].fitness);
}

void write_infeasible_csv(std::ostream& out, std::span<const InfeasibleConfig> infeasible) {
    out << "phenotype,reason\n";
    for (const auto& r : infeasible) out << fmt::format("{},\"{}\"\n", r.phenotype, r.reason);
}

std::uint64_t reference_lru(std::span<const TraceRecord> trace, std::uint32_t block_bytes,
                            std::size_t capacity_blocks) {
    if (capacity_blocks == 0 || block_bytes == 0) throw ValidationError("capacity and block size must be >= 1");
    std::list<std::uint64_t> recency;  // front = most recent
    std::unordered_map<std::uint64_t, std::list<std::uint64_t>::iterator> where;
    std::uint64_t misses = 0;
    for (const auto& r : trace) {
        const std::uint64_t block = r.address / block_bytes;
        if (auto it = where.find(block); it != where.end()) {
            recency.splice(recency.begin(), recency, it->second);
            continue;
        }
        ++misses;
        if (recency.size() == capacity_blocks) {
            where.erase(recency.back());
            recency.pop_back();
        }
        recency.push_front(block);
        where[block] = recency.begin();
    }
    return misses;
}

}  // namespace cachege
