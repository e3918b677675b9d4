#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "forkgame/economics.hpp"
#include "forkgame/game.hpp"

namespace forkgame {

struct StrategyContext {
    const GameParams& params;
    int player;
};

using StrategyFn = std::function<Action(const GlobalState&, int round, const StrategyContext&)>;

struct Strategy {
    std::string name;
    StrategyFn decide;

    Action operator()(const GlobalState& s, int round, const StrategyContext& ctx) const {
        return decide(s, round, ctx);
    }
};

// One decision function per player.
using StrategyProfile = std::vector<Strategy>;

namespace detail {

// Highest-reward feasible set; ties broken toward the lower kind ordinal.
inline TxSetKind greedy_txset(const Chain& chain, int round, const GameParams& p) {
    TxSetKind best = TxSetKind::Unrelated;
    Sat best_reward = -1;
    for (TxSetKind k : feasible_txsets(chain, round, p)) {
        Sat r = reward_of(k, p);
        if (r > best_reward || (r == best_reward && k < best)) {
            best = k;
            best_reward = r;
        }
    }
    return best;
}

// Waiting order used by the bribe-side strategies: the bribe block first,
// then the reclaim, then the deposit (round 1 only), never the revocation.
inline TxSetKind waiter_txset(const Chain& chain, int round, const GameParams& p) {
    auto feas = feasible_txsets(chain, round, p);
    for (TxSetKind k : {TxSetKind::Txs2, TxSetKind::TxsP2, TxSetKind::TxsP1})
        if (std::find(feas.begin(), feas.end(), k) != feas.end()) return k;
    return TxSetKind::Unrelated;
}

// Among the longest chains, the oldest that does not end in txs_1; falls
// back to the plain longest chain when every candidate ends in txs_1.
inline const Chain& preferred_clean_chain(const GlobalState& state) {
    const Chain& fallback = longest_chain(state);
    const Chain* best = nullptr;
    for (const Chain& c : state.chains) {
        if (c.length() != fallback.length()) continue;
        if (!c.empty() && c.last().txset == TxSetKind::Txs1) continue;
        if (!best || c.created_round < best->created_round ||
            (c.created_round == best->created_round && c.chain_id < best->chain_id))
            best = &c;
    }
    return best ? *best : fallback;
}

}  // namespace detail

enum class BuiltinStrategy {
    GreedyDefault,
    MineTxs1First,
    BribeWaiter,
    FeatherForkThreatener,
    PenaltyAwareWaiter,
};

inline Strategy builtin(BuiltinStrategy which) {
    switch (which) {
        case BuiltinStrategy::GreedyDefault:
            return {"greedy", [](const GlobalState& s, int r, const StrategyContext& ctx) {
                        const Chain& c = longest_chain(s);
                        return Action{c.chain_id, Decision::Continue,
                                      detail::greedy_txset(c, r, ctx.params)};
                    }};
        case BuiltinStrategy::MineTxs1First:
            return {"mine-txs1-first", [](const GlobalState& s, int r, const StrategyContext& ctx) {
                        const Chain& c = longest_chain(s);
                        if (is_feasible_txset(c, r, ctx.params, TxSetKind::Txs1))
                            return Action{c.chain_id, Decision::Continue, TxSetKind::Txs1};
                        return Action{c.chain_id, Decision::Continue,
                                      detail::greedy_txset(c, r, ctx.params)};
                    }};
        case BuiltinStrategy::BribeWaiter:
            return {"bribe-waiter", [](const GlobalState& s, int r, const StrategyContext& ctx) {
                        const Chain& c = longest_chain(s);
                        return Action{c.chain_id, Decision::Continue,
                                      detail::waiter_txset(c, r, ctx.params)};
                    }};
        case BuiltinStrategy::PenaltyAwareWaiter:
            return {"penalty-aware-waiter",
                    [](const GlobalState& s, int r, const StrategyContext& ctx) {
                        const Chain& c = detail::preferred_clean_chain(s);
                        return Action{c.chain_id, Decision::Continue,
                                      detail::waiter_txset(c, r, ctx.params)};
                    }};
        case BuiltinStrategy::FeatherForkThreatener:
            return {"feather-fork-threatener",
                    [](const GlobalState& s, int r, const StrategyContext& ctx) {
                        // Chains carrying the deposit and ending in the
                        // revocation block get forked while that is legal.
                        for (const Chain& c : s.chains) {
                            if (c.empty() || c.last().txset != TxSetKind::Txs1) continue;
                            if (!c.contains(TxSetKind::TxsP1)) continue;
                            if (!is_fork_legal(s, c, ctx.params)) continue;
                            return Action{c.chain_id, Decision::Fork,
                                          detail::waiter_txset(fork_prefix(c), r, ctx.params)};
                        }
                        const Chain& c = detail::preferred_clean_chain(s);
                        return Action{c.chain_id, Decision::Continue,
                                      detail::waiter_txset(c, r, ctx.params)};
                    }};
    }
    throw UnknownStrategy("unknown builtin strategy id");
}

inline const std::vector<std::pair<std::string, BuiltinStrategy>>& builtin_names() {
    static const std::vector<std::pair<std::string, BuiltinStrategy>> names = {
        {"greedy", BuiltinStrategy::GreedyDefault},
        {"mine-txs1-first", BuiltinStrategy::MineTxs1First},
        {"bribe-waiter", BuiltinStrategy::BribeWaiter},
        {"feather-fork-threatener", BuiltinStrategy::FeatherForkThreatener},
        {"penalty-aware-waiter", BuiltinStrategy::PenaltyAwareWaiter},
    };
    return names;
}

inline Strategy builtin(const std::string& name) {
    for (const auto& [n, id] : builtin_names())
        if (n == name) return builtin(id);
    throw UnknownStrategy("unknown strategy: " + name);
}

// The canonical attack profile: the depositor threatens, everyone else waits.
inline StrategyProfile bribe_and_fork_profile(const GameParams& params) {
    int threatener = params.p1_creator.value_or(params.strongest());
    StrategyProfile profile;
    profile.reserve(params.n);
    for (int i = 0; i < params.n; ++i)
        profile.push_back(builtin(i == threatener ? BuiltinStrategy::FeatherForkThreatener
                                                  : BuiltinStrategy::PenaltyAwareWaiter));
    return profile;
}

inline StrategyProfile uniform_profile(int n, BuiltinStrategy which) {
    StrategyProfile profile;
    profile.reserve(n);
    for (int i = 0; i < n; ++i) profile.push_back(builtin(which));
    return profile;
}

// Expected utility of the rest of the game for one player, given the state
// right after a candidate action has been applied.
using ContinuationValueFn = std::function<double(const GlobalState&, int round, int player)>;

// Drops fork threats that do not strictly pay. A proposed fork is kept only
// if its continuation value beats every continue alternative; otherwise the
// best continue action is played instead.
inline Action credible_threat_filter(int player, const Action& proposed,
                                     const GlobalState& state, int round,
                                     const GameParams& params,
                                     const ContinuationValueFn& continuation_value) {
    if (proposed.decision == Decision::Continue) return proposed;
    if (!is_action_feasible(state, proposed, params))
        throw IllegalAction("credibility filter fed an infeasible action", player, round);

    auto value_of = [&](const Action& a) {
        GlobalState after = abandon(apply_action(state, a, player, params));
        after.round = round + 1;
        return continuation_value(after, round + 1, player);
    };

    Action best_continue{};
    double best_value = 0.0;
    bool found = false;
    for (const Action& a : feasible_actions(state, params)) {
        if (a.decision != Decision::Continue) continue;
        double v = value_of(a);
        if (!found || v > best_value ||
            (v == best_value && reward_of(a.txset, params) > reward_of(best_continue.txset, params))) {
            best_continue = a;
            best_value = v;
            found = true;
        }
    }
    if (!found) return proposed;  // nothing to fall back to
    return value_of(proposed) > best_value ? proposed : best_continue;
}

// One-step lookahead estimate usable when exact enumeration is out of reach:
// banked rewards on the chain the player just extended, the expected next
// block on it, and the per-round floor lambda_i * (f + B) that mining average
// blocks always guarantees. Tip rewards on a contested chain are discounted
// by the power of the rival tip's miner.
inline ContinuationValueFn lookahead_continuation(const GameParams& params) {
    return [&params](const GlobalState& state, int round, int player) -> double {
        const double lam = params.lambda.at(player);
        const double floor_per_round = lam * static_cast<double>(params.f() + params.base_reward_B);
        int remaining = params.rounds_R - round + 1;
        if (remaining < 0) remaining = 0;

        double best = 0.0;
        bool first = true;
        for (const Chain& mine : state.chains) {
            double banked = 0.0;
            for (const Block& b : mine.blocks)
                if (b.winner == player) banked += static_cast<double>(reward_of(b.txset, params));
            // Rival tip: a same-length chain whose miner defends its block.
            double survive = 1.0;
            for (const Chain& other : state.chains) {
                if (other.chain_id == mine.chain_id || other.length() != mine.length()) continue;
                if (!other.empty()) survive = std::min(survive, 1.0 - params.lambda.at(other.last().winner));
            }
            double at_risk = 0.0;
            if (!mine.empty() && mine.last().winner == player && survive < 1.0)
                at_risk = static_cast<double>(reward_of(mine.last().txset, params));
            double next_best = 0.0;
            if (remaining > 0)
                next_best = static_cast<double>(reward_of(detail::greedy_txset(mine, round, params), params));
            double deposit = 0.0;
            if (params.p1_creator && player == *params.p1_creator && mine.contains(TxSetKind::TxsP1) &&
                mine.contains(TxSetKind::Txs1))
                deposit = -static_cast<double>(params.penalty_P);  // reclaim is impossible here
            double v = banked - (1.0 - survive) * at_risk + survive * lam * next_best +
                       (remaining > 0 ? (remaining - 1) * floor_per_round : 0.0) + deposit;
            if (first || v > best) {
                best = v;
                first = false;
            }
        }
        return best;
    };
}

}  // namespace forkgame
