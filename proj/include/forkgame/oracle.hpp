#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forkgame/attack_cost.hpp"
#include "forkgame/economics.hpp"
#include "forkgame/game.hpp"
#include "forkgame/strategy.hpp"

#include <nlohmann/json.hpp>

namespace forkgame {

inline constexpr double kUtilityEpsilonSat = 1e-6;
inline constexpr double kDefaultOracleBudget = 1e7;

namespace oracle_detail {

inline void check_budget(int n, int rounds_left, double budget, const char* what) {
    double nodes = std::pow(static_cast<double>(n), static_cast<double>(rounds_left));
    if (nodes > budget)
        throw InstanceTooLarge(std::string(what) + " needs about " + std::to_string(nodes) +
                                   " winner sequences, over the budget of " +
                                   std::to_string(budget),
                               nodes);
}

inline std::vector<long double> exact_rec(const StrategyProfile& profile,
                                          const GameParams& params, const GlobalState& state,
                                          int round) {
    if (round > params.rounds_R) {
        SettlementReport s = settle(state, params);
        std::vector<long double> out(params.n);
        for (int i = 0; i < params.n; ++i) out[i] = static_cast<long double>(s.per_player_reward[i]);
        return out;
    }
    std::vector<long double> acc(params.n, 0.0L);
    for (int w = 0; w < params.n; ++w) {
        Action a = profile[w](state, round, StrategyContext{params, w});
        if (!is_action_feasible(state, a, params))
            throw IllegalAction("strategy '" + profile[w].name + "' returned infeasible " +
                                    to_string(a),
                                w, round);
        GlobalState child = abandon(apply_action(state, a, w, params));
        child.round = round + 1;
        std::vector<long double> sub = exact_rec(profile, params, child, round + 1);
        const long double lw = static_cast<long double>(params.lambda[w]);
        for (int i = 0; i < params.n; ++i) acc[i] += lw * sub[i];
    }
    return acc;
}

}  // namespace oracle_detail

// Exact expected settlement under the per-round winner distribution, by
// full enumeration of winner sequences. Profiles are deterministic, so this
// is the exact utility.
inline std::vector<double> exact_utilities(const StrategyProfile& profile,
                                           const GameParams& params,
                                           const GlobalState& from_state, int from_round,
                                           double budget = kDefaultOracleBudget) {
    if (static_cast<int>(profile.size()) != params.n)
        throw IllegalAction("profile size does not match player count");
    oracle_detail::check_budget(params.n, params.rounds_R - from_round + 1, budget,
                                "exact utility enumeration");
    std::vector<long double> acc =
        oracle_detail::exact_rec(profile, params, from_state, from_round);
    return std::vector<double>(acc.begin(), acc.end());
}

inline std::vector<double> exact_utilities(const StrategyProfile& profile,
                                           const GameParams& params,
                                           double budget = kDefaultOracleBudget) {
    return exact_utilities(profile, params, new_state(), 1, budget);
}

// Probability of each terminal state, mostly a debugging aid.
struct OutcomeDistribution {
    std::map<std::uint64_t, double> probability_by_hash;
    std::map<std::uint64_t, GlobalState> representative;

    double total() const {
        double s = 0.0;
        for (const auto& [h, p] : probability_by_hash) s += p;
        return s;
    }
};

inline void outcome_rec(const StrategyProfile& profile, const GameParams& params,
                        const GlobalState& state, int round, double prob,
                        OutcomeDistribution& out) {
    if (round > params.rounds_R) {
        std::uint64_t h = state_hash(state);
        out.probability_by_hash[h] += prob;
        out.representative.emplace(h, state);
        return;
    }
    for (int w = 0; w < params.n; ++w) {
        Action a = profile[w](state, round, StrategyContext{params, w});
        GlobalState child = abandon(apply_action(state, a, w, params));
        child.round = round + 1;
        outcome_rec(profile, params, child, round + 1, prob * params.lambda[w], out);
    }
}

inline OutcomeDistribution outcome_distribution(const StrategyProfile& profile,
                                                const GameParams& params,
                                                double budget = kDefaultOracleBudget) {
    oracle_detail::check_budget(params.n, params.rounds_R, budget, "outcome enumeration");
    OutcomeDistribution out;
    outcome_rec(profile, params, new_state(), 1, 1.0, out);
    return out;
}

// One-shot comparison at a single decision point: the player substitutes one
// action now and follows the profile afterwards, opponents held fixed. The
// branches where someone else wins this round are common to every candidate,
// so candidates are ranked by the continuation value conditioned on winning.
struct DominatingActionReport {
    Action action;                 // the maximizer
    double value = 0.0;            // E_i conditioned on winning the round with it
    double margin = 0.0;           // gap to the runner-up (infinity if unique action)
    std::vector<Action> ties;      // actions within epsilon of the maximum
    std::vector<std::pair<Action, double>> all;  // every candidate with its value
};

inline DominatingActionReport dominating_action(const GlobalState& state, int round, int player,
                                                const GameParams& params,
                                                const StrategyProfile& profile,
                                                double budget = kDefaultOracleBudget) {
    auto actions = feasible_actions(state, params);
    if (actions.empty()) throw IllegalAction("no feasible action", player, round);
    oracle_detail::check_budget(params.n, params.rounds_R - round, budget,
                                "dominating-action enumeration");

    DominatingActionReport report;
    for (const Action& a : actions) {
        GlobalState child = abandon(apply_action(state, a, player, params));
        child.round = round + 1;
        double v;
        if (round + 1 > params.rounds_R) {
            v = static_cast<double>(settle(child, params).per_player_reward[player]);
        } else {
            v = oracle_detail::exact_rec(profile, params, child, round + 1)[player];
        }
        report.all.emplace_back(a, v);
    }
    std::stable_sort(report.all.begin(), report.all.end(),
                     [](const auto& x, const auto& y) { return x.second > y.second; });
    report.action = report.all.front().first;
    report.value = report.all.front().second;
    report.margin = report.all.size() > 1
                        ? report.value - report.all[1].second
                        : std::numeric_limits<double>::infinity();
    for (const auto& [a, v] : report.all)
        if (report.value - v <= kUtilityEpsilonSat) report.ties.push_back(a);
    return report;
}

// Value of the player's best deterministic strategy against fixed opponents,
// by expectimax over the subgame. Equivalent to maximizing over every total
// map from reachable (state, round) pairs to feasible actions.
inline double best_response_value(const StrategyProfile& profile, int player,
                                  const GameParams& params, const GlobalState& state, int round,
                                  Action* root_choice = nullptr) {
    if (round > params.rounds_R)
        return static_cast<double>(settle(state, params).per_player_reward[player]);

    long double others = 0.0L;
    for (int w = 0; w < params.n; ++w) {
        if (w == player) continue;
        Action a = profile[w](state, round, StrategyContext{params, w});
        GlobalState child = abandon(apply_action(state, a, w, params));
        child.round = round + 1;
        others += static_cast<long double>(params.lambda[w]) *
                  static_cast<long double>(best_response_value(profile, player, params, child,
                                                               round + 1));
    }
    long double best = 0.0L;
    bool first = true;
    for (const Action& a : feasible_actions(state, params)) {
        GlobalState child = abandon(apply_action(state, a, player, params));
        child.round = round + 1;
        long double v = static_cast<long double>(
            best_response_value(profile, player, params, child, round + 1));
        if (first || v > best) {
            best = v;
            first = false;
            if (root_choice) *root_choice = a;
        }
    }
    return static_cast<double>(others + static_cast<long double>(params.lambda[player]) * best);
}

enum class StrategySpace { BuiltinLibrary, Exhaustive };

struct BestResponseReport {
    bool is_best_response = false;
    double current_utility = 0.0;
    double best_utility = 0.0;
    double utility_gap = 0.0;  // best - current, clamped at 0
    std::string witness_strategy;  // name of an improving deviation, if any
    std::optional<Action> witness_first_action;
};

// Checks sigma_i against deviations: either every builtin strategy, or the
// full deterministic strategy space via expectimax.
inline BestResponseReport best_response_check(const StrategyProfile& profile, int player,
                                              const GameParams& params,
                                              StrategySpace space = StrategySpace::BuiltinLibrary,
                                              double budget = kDefaultOracleBudget) {
    BestResponseReport report;
    report.current_utility = exact_utilities(profile, params, budget)[player];
    report.best_utility = report.current_utility;

    if (space == StrategySpace::BuiltinLibrary) {
        for (const auto& [name, id] : builtin_names()) {
            StrategyProfile alt = profile;
            alt[player] = builtin(id);
            double v = exact_utilities(alt, params, budget)[player];
            if (v > report.best_utility) {
                report.best_utility = v;
                report.witness_strategy = name;
            }
        }
    } else {
        oracle_detail::check_budget(params.n, params.rounds_R, budget / 8.0,
                                    "exhaustive best-response search");
        Action root{};
        double v = best_response_value(profile, player, params, new_state(), 1, &root);
        if (v > report.best_utility) {
            report.best_utility = v;
            report.witness_strategy = "expectimax";
            report.witness_first_action = root;
        }
    }
    report.utility_gap = std::max(0.0, report.best_utility - report.current_utility);
    report.is_best_response = report.utility_gap <= kUtilityEpsilonSat;
    return report;
}

// ---------------------------------------------------------------------------
// Closed-form hypothesis checks for every analytical result the oracle can
// exercise on game instances.

struct ConditionEntry {
    std::string key;
    double value = 0.0;
    bool pass = false;
    std::string note;
};

struct ConditionReport {
    // Reward ordering used by the settled-chain ordering results.
    bool reward_order_holds = false;      // f2 > f1 > f and f_p2 > f
    // Self-fork threshold for the miner of the revocation block.
    Sat self_fork_threshold = 0;          // f1 + B
    bool self_fork_possible = false;      // f2 - f >= f1 + B
    // Per-player fork thresholds for other miners.
    std::vector<double> other_fork_threshold;  // lambda_j * (f + B)
    // Everyone-mines-the-revocation-block conditions.
    bool bribe_small = false;             // f2 - f < 1e-2 (f + B)
    bool f1_above_f = false;
    double Y = 0.0;                        // power of > 1% miners the bribe cannot buy
    double mining_pressure = 0.0;          // 1 - 1.01 (1 - Y)^T
    bool mining_pressure_positive = false;
    // Penalty-mechanism conditions.
    double waiting_floor = 0.0;            // (f1 - f) / lambda_s
    bool bribe_beats_waiting_floor = false;
    double survival_ratio = 0.0;           // (f + B) / (f1 + B)
    double survival_bound = 0.0;           // 1 - lambda_s^2
    bool survival_condition = false;
    double penalty_floor_value = 0.0;      // lambda_s * (f + B)
    bool penalty_sufficient = false;       // P > lambda_s (f + B)
    // Full-attack bound.
    double shallow_fork_weight = 0.0;      // 0.05^(T/2)
    bool lambda_min_above_shallow = false;
    double general_bound = 0.0;
    bool bribe_above_general_bound = false;
    double simplified_bound = 0.0;
    bool reclaim_fee_above_f = false;      // f_p2 > f
    bool feasibility_window_exists = false;  // some 1-2% miner with f2-f < (f1-f)/lambda_j
    double feasibility_ceiling_value = 0.0;  // (f1-f)/lambda_j for that miner
    bool strict_distribution_ok = false;

    std::vector<ConditionEntry> entries;
    bool all_attack_conditions_pass = false;
};

inline ConditionReport theorem_conditions(const GameParams& p) {
    ConditionReport r;
    const double fB = static_cast<double>(p.f() + p.base_reward_B);
    const Sat d2 = p.f2 - p.f();   // bribe premium over an average block
    const Sat d1 = p.f1 - p.f();   // revocation premium
    const int s = p.strongest();
    const double ls = p.lambda[s];

    r.reward_order_holds = p.f2 > p.f1 && p.f1 > p.f() && p.f_p2() > p.f();
    r.self_fork_threshold = p.f1 + p.base_reward_B;
    r.self_fork_possible = d2 >= r.self_fork_threshold;

    r.other_fork_threshold.resize(p.n);
    for (int j = 0; j < p.n; ++j) r.other_fork_threshold[j] = p.lambda[j] * fB;

    r.bribe_small = static_cast<double>(d2) < 0.01 * fB;
    r.f1_above_f = p.f1 > p.f();
    for (int j = 0; j < p.n; ++j)
        if (p.lambda[j] > 0.01 &&
            static_cast<double>(d2) * p.lambda[j] < static_cast<double>(d1))
            r.Y += p.lambda[j];
    r.mining_pressure =
        1.0 - 1.01 * std::pow(1.0 - r.Y, static_cast<double>(p.timelock_T));
    r.mining_pressure_positive = r.mining_pressure > 0.0;

    r.waiting_floor = static_cast<double>(d1) / ls;
    r.bribe_beats_waiting_floor = static_cast<double>(d2) > r.waiting_floor;
    r.survival_ratio = fB / static_cast<double>(p.f1 + p.base_reward_B);
    r.survival_bound = 1.0 - ls * ls;
    r.survival_condition = r.survival_ratio > r.survival_bound;
    r.penalty_floor_value = ls * fB;
    r.penalty_sufficient = static_cast<double>(p.penalty_P) > r.penalty_floor_value;

    r.shallow_fork_weight = std::pow(0.05, static_cast<double>(p.timelock_T) / 2.0);
    double lam_min = *std::min_element(p.lambda.begin(), p.lambda.end());
    r.lambda_min_above_shallow = lam_min > r.shallow_fork_weight;
    double denom = ls - r.shallow_fork_weight;
    r.general_bound =
        denom > 0
            ? (static_cast<double>(p.c_p1 * p.f_bar_p1 + p.c_p1 * p.avg_tx_fee +
                                   p.c_p2 * p.f_bar_p2 + d1)) /
                      denom +
                  static_cast<double>(p.c_p2 * p.avg_tx_fee)
            : std::numeric_limits<double>::infinity();
    r.bribe_above_general_bound = static_cast<double>(d2) > r.general_bound;
    r.simplified_bound =
        (2.0 * static_cast<double>(p.avg_tx_fee) + 2.0 * static_cast<double>(d1)) / ls +
        static_cast<double>(p.avg_tx_fee);
    r.reclaim_fee_above_f = p.f_p2() > p.f();
    for (int j = 0; j < p.n; ++j) {
        if (p.lambda[j] > 0.01 && p.lambda[j] < 0.02 &&
            static_cast<double>(d2) * p.lambda[j] < static_cast<double>(d1)) {
            r.feasibility_window_exists = true;
            r.feasibility_ceiling_value = static_cast<double>(d1) / p.lambda[j];
            break;
        }
    }
    {
        GameParams strict = p;
        strict.strict_distribution = true;
        r.strict_distribution_ok = !has_errors(validate_params(strict));
    }

    auto add = [&](std::string key, double value, bool pass, std::string note = "") {
        r.entries.push_back({std::move(key), value, pass, std::move(note)});
    };
    add("reward_order", 0, r.reward_order_holds, "f2 > f1 > f and f_p2 > f");
    add("self_fork_threshold_sat", static_cast<double>(r.self_fork_threshold),
        !r.self_fork_possible, "miner of txs_1 keeps its chain while f2 - f < f1 + B");
    for (int j = 0; j < p.n; ++j)
        add("other_fork_threshold_sat[" + std::to_string(j) + "]", r.other_fork_threshold[j],
            static_cast<double>(d2) < r.other_fork_threshold[j],
            "no fork against player " + std::to_string(j) + " while f2 - f < lambda_j (f+B)");
    add("bribe_small", static_cast<double>(d2), r.bribe_small, "f2 - f < 1e-2 (f + B)");
    add("f1_above_f", static_cast<double>(d1), r.f1_above_f, "f1 > f");
    add("Y", r.Y, true, "power of >1% miners the bribe cannot buy");
    add("mining_pressure", r.mining_pressure, r.mining_pressure_positive,
        "1 - 1.01 (1 - Y)^T > 0");
    add("waiting_floor_sat", r.waiting_floor, r.bribe_beats_waiting_floor,
        "f2 - f > (f1 - f) / lambda_s");
    add("survival_ratio", r.survival_ratio, r.survival_condition, "(f+B)/(f1+B) > 1 - lambda_s^2");
    add("penalty_floor_sat", r.penalty_floor_value, r.penalty_sufficient,
        "P > lambda_s (f + B)");
    add("shallow_fork_weight", r.shallow_fork_weight, r.lambda_min_above_shallow,
        "lambda_min > 0.05^(T/2)");
    add("general_bound_sat", r.general_bound, r.bribe_above_general_bound,
        "f2 - f > attack bound");
    add("simplified_bound_sat", r.simplified_bound, true, "reference value");
    add("reclaim_fee_above_f", static_cast<double>(p.f_p2() - p.f()), r.reclaim_fee_above_f,
        "f_p2 > f");
    add("feasibility_window", r.feasibility_ceiling_value, r.feasibility_window_exists,
        "a 1-2% miner exists with f2 - f < (f1 - f) / lambda_j");
    add("strict_distribution", 0, r.strict_distribution_ok, "mining-power assumptions");

    r.all_attack_conditions_pass =
        r.bribe_above_general_bound && r.survival_condition && r.f1_above_f &&
        r.reclaim_fee_above_f && r.lambda_min_above_shallow && r.bribe_small &&
        r.penalty_sufficient && r.bribe_beats_waiting_floor && r.feasibility_window_exists;
    return r;
}

inline nlohmann::json to_json(const ConditionReport& r) {
    nlohmann::json out;
    for (const ConditionEntry& e : r.entries)
        out[e.key] = {{"value", e.value}, {"pass", e.pass}, {"note", e.note}};
    out["all_attack_conditions_pass"] = r.all_attack_conditions_pass;
    return out;
}

// Oracle-backed continuation for the credibility filter on small instances.
inline ContinuationValueFn oracle_continuation(const StrategyProfile& profile,
                                               const GameParams& params,
                                               double budget = kDefaultOracleBudget) {
    return [profile, &params, budget](const GlobalState& state, int round, int player) {
        if (round > params.rounds_R)
            return static_cast<double>(settle(state, params).per_player_reward[player]);
        return exact_utilities(profile, params, state, round, budget)[player];
    };
}

}  // namespace forkgame
