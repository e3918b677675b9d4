#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "forkgame/economics.hpp"
#include "forkgame/game.hpp"
#include "forkgame/strategy.hpp"

#include <nlohmann/json.hpp>

namespace forkgame {

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Counter-based stream: the draw for (seed, trial, round) never depends on
// evaluation order, so trials can run on any number of workers.
inline double uniform01(std::uint64_t seed, std::uint64_t trial, std::uint64_t round) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(trial ^ splitmix64(round)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace rng

// Inverse-CDF winner draw over the mining-power vector.
inline int sample_winner(const std::vector<double>& lambda, double u) {
    double cum = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        cum += lambda[i];
        if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(lambda.size()) - 1;
}

struct RoundRecord {
    int round = 0;
    std::uint64_t state_hash = 0;
    std::vector<Action> actions;  // one per player, all collected before the draw
    int winner = 0;
    Action applied;
};

struct GameTrace {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    std::vector<RoundRecord> records;
    GlobalState final_state;
    SettlementReport settlement;
};

inline GameTrace run_game(const StrategyProfile& profile, const GameParams& params,
                          std::uint64_t seed, std::uint64_t trial = 0) {
    if (static_cast<int>(profile.size()) != params.n)
        throw IllegalAction("profile size does not match player count");
    GameTrace trace;
    trace.seed = seed;
    trace.trial = trial;
    GlobalState state = new_state();
    for (int r = 1; r <= params.rounds_R; ++r) {
        RoundRecord rec;
        rec.round = r;
        rec.state_hash = state_hash(state);
        rec.actions.reserve(params.n);
        for (int i = 0; i < params.n; ++i) {
            Action a = profile[i](state, r, StrategyContext{params, i});
            if (!is_action_feasible(state, a, params))
                throw IllegalAction("strategy '" + profile[i].name + "' returned infeasible " +
                                        to_string(a),
                                    i, r);
            rec.actions.push_back(a);
        }
        rec.winner = sample_winner(params.lambda, rng::uniform01(seed, trial, r));
        rec.applied = rec.actions[rec.winner];
        state = abandon(apply_action(state, rec.applied, rec.winner, params));
        state.round = r + 1;
        trace.records.push_back(std::move(rec));
    }
    trace.final_state = state;
    trace.settlement = settle(state, params);
    return trace;
}

struct UtilityEstimate {
    std::vector<double> mean;    // satoshi per player
    std::vector<double> stderr_; // sample stddev / sqrt(trials)
    std::uint64_t trials = 0;
    bool stderr_defined = true;  // false for single-trial runs
};

namespace detail {

inline double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

inline unsigned worker_count(std::uint64_t trials) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("FORKGAME_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return static_cast<unsigned>(std::min<std::uint64_t>(hw, trials));
}

}  // namespace detail

// Monte Carlo mean and standard error of the final settlement, one
// independent deterministic sub-stream per trial. Aggregation is pairwise
// over the trial-indexed table, so results do not depend on worker count.
inline UtilityEstimate estimate_utilities(const StrategyProfile& profile,
                                          const GameParams& params, std::uint64_t trials,
                                          std::uint64_t seed) {
    if (trials < 1) throw DomainError("at least one trial required");
    const int n = params.n;
    std::vector<double> samples(trials * n);

    auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t t = begin; t < end; ++t) {
            GameTrace trace = run_game(profile, params, seed, t);
            for (int i = 0; i < n; ++i)
                samples[t * n + i] = static_cast<double>(trace.settlement.per_player_reward[i]);
        }
    };

    unsigned workers = detail::worker_count(trials);
    if (workers <= 1) {
        run_range(0, trials);
    } else {
        std::vector<std::thread> pool;
        std::uint64_t chunk = (trials + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            std::uint64_t begin = w * chunk;
            std::uint64_t end = std::min<std::uint64_t>(trials, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    UtilityEstimate est;
    est.trials = trials;
    est.mean.resize(n);
    est.stderr_.assign(n, 0.0);
    est.stderr_defined = trials > 1;
    std::vector<double> column(trials);
    for (int i = 0; i < n; ++i) {
        for (std::uint64_t t = 0; t < trials; ++t) column[t] = samples[t * n + i];
        double mean = detail::pairwise_sum(column.data(), trials) / static_cast<double>(trials);
        est.mean[i] = mean;
        if (trials > 1) {
            for (std::uint64_t t = 0; t < trials; ++t) {
                double d = column[t] - mean;
                column[t] = d * d;
            }
            double var = detail::pairwise_sum(column.data(), trials) /
                         static_cast<double>(trials - 1);
            est.stderr_[i] = std::sqrt(var / static_cast<double>(trials));
        }
    }
    return est;
}

// One JSON object per round, line-delimited.
inline void write_trace(std::ostream& os, const GameTrace& trace) {
    using nlohmann::json;
    for (const RoundRecord& rec : trace.records) {
        json actions = json::array();
        for (const Action& a : rec.actions)
            actions.push_back({{"chain", a.target_chain_id},
                               {"decision", a.decision == Decision::Continue ? "continue" : "fork"},
                               {"txset", to_string(a.txset)}});
        json line = {{"round", rec.round},
                     {"state_hash", rec.state_hash},
                     {"actions", actions},
                     {"winner", rec.winner},
                     {"applied",
                      {{"chain", rec.applied.target_chain_id},
                       {"decision", rec.applied.decision == Decision::Continue ? "continue" : "fork"},
                       {"txset", to_string(rec.applied.txset)}}}};
        os << line.dump() << "\n";
    }
}

}  // namespace forkgame
