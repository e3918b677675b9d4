#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "forkgame/money.hpp"

namespace forkgame {

// All scalar knobs of the mining game. Fees are block-level totals except
// f_bar / f_bar_p1 / f_bar_p2 which are per-transaction.
struct GameParams {
    int n = 0;                    // player count
    std::vector<double> lambda;   // mining-power fractions, sum to 1
    int rounds_R = 0;             // game length
    int timelock_T = 0;           // rounds before the timelocked spend unlocks
    Sat base_reward_B = 0;        // constant block subsidy
    std::int64_t txs_per_block_m = 0;
    Sat avg_tx_fee = 0;           // f_bar
    Sat f1 = 0;                   // block fee total when the revocation tx is included
    Sat f2 = 0;                   // block fee total when the bribe pair is included
    std::int64_t c_p1 = 1;        // slots taken by the deposit tx
    std::int64_t c_p2 = 1;        // slots taken by the reclaim tx
    Sat f_bar_p1 = 0;             // per-slot fee of the deposit tx
    Sat f_bar_p2 = 0;             // per-slot fee of the reclaim tx
    Sat penalty_P = 0;            // deposit locked by the threatening miner
    std::optional<int> p1_creator;  // player posting the deposit; disabled if absent
    bool strict_distribution = false;

    Sat f() const { return txs_per_block_m * avg_tx_fee; }
    Sat f_p1() const { return (txs_per_block_m - c_p1) * avg_tx_fee + c_p1 * f_bar_p1; }
    Sat f_p2() const { return (txs_per_block_m - c_p2) * avg_tx_fee + c_p2 * f_bar_p2; }

    bool p1_created() const { return p1_creator.has_value(); }

    double lambda_sum() const { return std::accumulate(lambda.begin(), lambda.end(), 0.0); }

    // Index of the unique strongest player (first of the maxima).
    int strongest() const {
        int best = 0;
        for (int i = 1; i < static_cast<int>(lambda.size()); ++i)
            if (lambda[i] > lambda[best]) best = i;
        return best;
    }

    void normalize_lambda() {
        double s = lambda_sum();
        if (s > 0)
            for (double& l : lambda) l /= s;
    }
};

// Report-style validation. Hard model invariants come first; the
// mining-power distribution assumptions are errors only in strict mode.
struct ParamViolation {
    std::string message;
    bool warning_only = false;
};

inline std::vector<ParamViolation> validate_params(const GameParams& p) {
    std::vector<ParamViolation> out;
    auto err = [&](std::string m) { out.push_back({std::move(m), false}); };
    auto warn = [&](std::string m) { out.push_back({std::move(m), true}); };

    if (p.n <= 0 || p.lambda.size() != static_cast<std::size_t>(p.n))
        err("player count must be positive and match the lambda vector");
    if (std::abs(p.lambda_sum() - 1.0) > 1e-9) err("powers must sum to 1");
    for (double l : p.lambda)
        if (!(l > 0)) err("every mining power must be positive");
    if (!(p.timelock_T >= 1)) err("timelock must be at least 1 round");
    if (!(p.timelock_T < p.rounds_R)) err("timelock must be shorter than the game");
    if (p.base_reward_B < 0 || p.avg_tx_fee < 0 || p.f1 < 0 || p.f2 < 0 || p.penalty_P < 0)
        err("monetary parameters must be non-negative");
    if (p.txs_per_block_m <= 0) err("transactions per block must be positive");
    if (p.c_p1 < 0 || p.c_p1 >= p.txs_per_block_m || p.c_p2 < 0 || p.c_p2 >= p.txs_per_block_m)
        err("special-tx slot counts must be in [0, m)");
    if (p.p1_creator && (*p.p1_creator < 0 || *p.p1_creator >= p.n))
        err("deposit creator index out of range");

    // Distribution assumptions: errors in strict mode, warnings otherwise.
    auto flag = [&](std::string m) {
        if (p.strict_distribution) err(std::move(m)); else warn(std::move(m));
    };
    if (!p.lambda.empty()) {
        int s = p.strongest();
        double max1 = p.lambda[s];
        bool unique = true;
        for (int i = 0; i < static_cast<int>(p.lambda.size()); ++i)
            if (i != s && p.lambda[i] == max1) unique = false;
        if (max1 < 0.20) flag("strongest mining power must be at least 20%");
        if (!unique) flag("strongest mining power must be unique");
        bool has_mid = false;
        double small_sum = 0.0, min_l = 1.0;
        for (double l : p.lambda) {
            if (l > 0.01 && l < 0.02) has_mid = true;
            if (l < 0.01) small_sum += l;
            min_l = std::min(min_l, l);
        }
        if (!has_mid) flag("no player with mining power between 1% and 2%");
        if (small_sum > 0.05) flag("players below 1% hold more than 5% collectively");
        if (min_l <= 1e-100) flag("smallest mining power must exceed 1e-100");
    }
    if (p.base_reward_B > 0 && p.avg_tx_fee * 10'000 >= p.base_reward_B)
        warn("average tx fee is not small relative to the block subsidy (f_bar < 1e-4 B expected)");
    return out;
}

inline bool has_errors(const std::vector<ParamViolation>& v) {
    for (const auto& x : v)
        if (!x.warning_only) return true;
    return false;
}

}  // namespace forkgame
