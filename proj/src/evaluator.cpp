#include "cachege/evaluator.hpp"

#include "cachege/cachesim.hpp"
#include "cachege/error.hpp"
#include "cachege/grammar.hpp"

namespace cachege {

Metrics measure(const CacheConfig& config, const ModelContext& ctx) {
    if (ctx.table == nullptr) throw ValidationError("no characterization table");
    const auto sim = simulate(config, ctx.trace, ctx.sim_seed);
    return evaluate_metrics(config, sim, *ctx.table, ctx.dram, ctx.miss_mode);
}

Evaluator::Evaluator(ModelContext ctx, Metrics baseline, FitnessWeights weights)
    : ctx_(ctx), baseline_(baseline), weights_(weights) {
    weights_.check();
    if (!(baseline_.exec_time > 0) || !(baseline_.energy > 0))
        throw ValidationError("baseline execution time and energy must be positive (simulate the baseline first)");
    if (ctx_.table == nullptr) throw ValidationError("no characterization table");
}

EvalOutcome Evaluator::compute(const std::string& key) const {
    EvalOutcome out;
    out.key = key;
    CacheConfig config;
    try {
        config = phenotype_to_config(key);
    } catch (const InputError& e) {
        out.reason = e.what();
        return out;
    }
    out.config = config;
    if (auto v = validate(config); !v) {
        out.reason = v.reason;
        return out;
    }
    try {
        out.metrics = measure(config, ctx_);
    } catch (const LookupError& e) {
        throw LookupError("evaluating '" + key + "': " + e.what());
    }
    out.fitness = fitness(out.metrics, baseline_, weights_);
    out.feasible = true;
    return out;
}

EvalOutcome Evaluator::evaluate(std::string_view phenotype) {
    const std::string key = memo_key(phenotype);
    std::promise<EvalOutcome> promise;
    std::shared_future<EvalOutcome> future;
    bool owner = false;
    {
        std::lock_guard lock(mutex_);
        ++stats_.lookups;
        if (auto it = memo_.find(key); it != memo_.end()) {
            future = it->second;
        } else {
            future = promise.get_future().share();
            memo_.emplace(key, future);
            ++stats_.unique_keys;
            owner = true;
        }
    }
    if (owner) {
        try {
            auto outcome = compute(key);
            if (outcome.feasible) {
                std::lock_guard lock(mutex_);
                ++stats_.simulations;
            }
            promise.set_value(std::move(outcome));
        } catch (...) {
            promise.set_exception(std::current_exception());
        }
    }
    return future.get();
}

MemoStats Evaluator::stats() const {
    std::lock_guard lock(mutex_);
    return stats_;
}

void Evaluator::clear() {
    std::lock_guard lock(mutex_);
    memo_.clear();
    stats_ = {};
}

}  // namespace cachege
