#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "forkgame/errors.hpp"
#include "forkgame/params.hpp"

namespace forkgame {

// Every block carries exactly one transaction-set kind.
enum class TxSetKind : std::uint8_t {
    Unrelated = 0,  // average transactions only
    Txs1,           // revocation spend of the contested output
    Txs2,           // timelocked spend plus the bribe tx
    TxsP1,          // deposit lock, first round only
    TxsP2,          // deposit reclaim, valid only after Txs2
};

inline constexpr std::array<TxSetKind, 5> kAllTxSetKinds = {
    TxSetKind::Unrelated, TxSetKind::Txs1, TxSetKind::Txs2,
    TxSetKind::TxsP1, TxSetKind::TxsP2};

inline const char* to_string(TxSetKind k) {
    switch (k) {
        case TxSetKind::Unrelated: return "txs_u";
        case TxSetKind::Txs1: return "txs_1";
        case TxSetKind::Txs2: return "txs_2";
        case TxSetKind::TxsP1: return "txs_p1";
        case TxSetKind::TxsP2: return "txs_p2";
    }
    return "?";
}

struct Block {
    TxSetKind txset = TxSetKind::Unrelated;
    int winner = 0;  // player index that mined it

    bool operator==(const Block&) const = default;
};

struct Chain {
    std::vector<Block> blocks;
    int created_round = 0;  // round in which this chain appeared in the state
    int chain_id = 0;       // monotone creation counter, unique per state

    std::size_t length() const { return blocks.size(); }
    bool empty() const { return blocks.empty(); }
    const Block& last() const { return blocks.back(); }

    bool contains(TxSetKind k) const {
        return std::any_of(blocks.begin(), blocks.end(),
                           [k](const Block& b) { return b.txset == k; });
    }

    bool operator==(const Chain&) const = default;
};

struct GlobalState {
    std::vector<Chain> chains;  // kept sorted by chain_id
    int round = 1;              // current (not yet resolved) round
    int next_chain_id = 1;

    bool operator==(const GlobalState&) const = default;
};

enum class Decision : std::uint8_t { Continue = 0, Fork = 1 };

struct Action {
    int target_chain_id = 0;
    Decision decision = Decision::Continue;
    TxSetKind txset = TxSetKind::Unrelated;

    bool operator==(const Action&) const = default;
};

inline std::string to_string(const Action& a) {
    std::string s = a.decision == Decision::Continue ? "continue" : "fork";
    s += "(chain ";
    s += std::to_string(a.target_chain_id);
    s += ", ";
    s += to_string(a.txset);
    s += ")";
    return s;
}

inline GlobalState new_state() {
    GlobalState s;
    s.chains.push_back(Chain{{}, 0, 0});
    s.round = 1;
    s.next_chain_id = 1;
    return s;
}

inline const Chain& chain_by_id(const GlobalState& state, int chain_id) {
    for (const Chain& c : state.chains)
        if (c.chain_id == chain_id) return c;
    throw IllegalAction("no chain with id " + std::to_string(chain_id) + " in state");
}

// Which transaction sets can legally top this chain in the given round.
// The deposit reclaim spends both the deposit output and the bribe's marker
// output, so it needs TxsP1 and Txs2 confirmed on the same chain.
inline std::vector<TxSetKind> feasible_txsets(const Chain& chain, int round,
                                              const GameParams& params) {
    std::vector<TxSetKind> out;
    out.push_back(TxSetKind::Unrelated);
    const bool txo_spent = chain.contains(TxSetKind::Txs1) || chain.contains(TxSetKind::Txs2);
    if (!txo_spent) {
        out.push_back(TxSetKind::Txs1);
        if (chain.length() >= static_cast<std::size_t>(params.timelock_T))
            out.push_back(TxSetKind::Txs2);
    }
    if (params.p1_created() && round == 1 && chain.empty())
        out.push_back(TxSetKind::TxsP1);
    if (chain.contains(TxSetKind::TxsP1) && chain.contains(TxSetKind::Txs2) &&
        !chain.contains(TxSetKind::TxsP2))
        out.push_back(TxSetKind::TxsP2);
    return out;
}

inline bool is_feasible_txset(const Chain& chain, int round, const GameParams& params,
                              TxSetKind k) {
    auto feas = feasible_txsets(chain, round, params);
    return std::find(feas.begin(), feas.end(), k) != feas.end();
}

// A fork is allowed only against a tip that blocks a strictly better block:
// txs_1 blocks txs_2, and the deposit lock blocks txs_1. If another chain of
// the same state still offers the blocked set (i.e. a fork of this tip
// already exists, sharing the prefix), there is no reason to fork again —
// this is what keeps the state at no more than two chains.
inline bool is_fork_legal(const GlobalState& state, const Chain& chain,
                          const GameParams& params) {
    if (chain.empty()) throw EmptyChain("cannot fork a chain of length 0");
    const TxSetKind tip = chain.last().txset;
    bool blocked_better = false;
    if (tip == TxSetKind::Txs1)
        blocked_better = params.f2 > params.f1;  // reward(txs_2) > reward(txs_1)
    else if (tip == TxSetKind::TxsP1)
        blocked_better = params.f1 > params.f_p1();  // reward(txs_1) > reward(txs_p1)
    if (!blocked_better) return false;
    for (const Chain& other : state.chains) {
        if (other.chain_id == chain.chain_id) continue;
        if (other.length() != chain.length()) continue;
        if (std::equal(chain.blocks.begin(), chain.blocks.end() - 1, other.blocks.begin()))
            return false;  // an alternative tip already exists
    }
    return true;
}

// Chain as it looks with the tip removed; used to judge fork replacements.
inline Chain fork_prefix(const Chain& chain) {
    Chain prefix = chain;
    prefix.blocks.pop_back();
    return prefix;
}

inline bool is_action_feasible(const GlobalState& state, const Action& a,
                               const GameParams& params) {
    const Chain* target = nullptr;
    for (const Chain& c : state.chains)
        if (c.chain_id == a.target_chain_id) target = &c;
    if (!target) return false;
    if (a.decision == Decision::Continue)
        return is_feasible_txset(*target, state.round, params, a.txset);
    if (target->empty()) return false;
    if (!is_fork_legal(state, *target, params)) return false;
    return is_feasible_txset(fork_prefix(*target), state.round, params, a.txset);
}

// All legal (chain, decision, txset) triplets for the current round.
inline std::vector<Action> feasible_actions(const GlobalState& state,
                                            const GameParams& params) {
    std::vector<Action> out;
    for (const Chain& c : state.chains) {
        for (TxSetKind k : feasible_txsets(c, state.round, params))
            out.push_back({c.chain_id, Decision::Continue, k});
        if (!c.empty() && is_fork_legal(state, c, params))
            for (TxSetKind k : feasible_txsets(fork_prefix(c), state.round, params))
                out.push_back({c.chain_id, Decision::Fork, k});
    }
    return out;
}

// Applies the round winner's action. Continue appends to the target chain;
// Fork duplicates it and replaces the tip. The round counter is advanced by
// the caller once the abandon rule has run.
inline GlobalState apply_action(const GlobalState& state, const Action& action, int winner,
                                const GameParams& params) {
    if (winner < 0 || winner >= params.n)
        throw IllegalAction("winner index out of range", winner, state.round);
    if (!is_action_feasible(state, action, params))
        throw IllegalAction("infeasible action " + to_string(action), winner, state.round);
    GlobalState next = state;
    for (Chain& c : next.chains) {
        if (c.chain_id != action.target_chain_id) continue;
        if (action.decision == Decision::Continue) {
            c.blocks.push_back({action.txset, winner});
        } else {
            Chain fork = c;
            fork.blocks.back() = {action.txset, winner};
            fork.chain_id = next.next_chain_id++;
            fork.created_round = state.round;
            next.chains.push_back(std::move(fork));
        }
        return next;
    }
    throw IllegalAction("target chain vanished", winner, state.round);
}

// Drops every chain that has fallen at least one block behind another.
// Surviving chains therefore all share the maximal length.
inline GlobalState abandon(const GlobalState& state) {
    std::size_t max_len = 0;
    for (const Chain& c : state.chains) max_len = std::max(max_len, c.length());
    GlobalState next = state;
    std::erase_if(next.chains, [&](const Chain& c) { return c.length() + 1 <= max_len; });
    return next;
}

// Longest chain; ties go to the oldest (smallest creation round, then id).
inline const Chain& longest_chain(const GlobalState& state) {
    if (state.chains.empty()) throw EmptyChain("state holds no chains");
    const Chain* best = &state.chains.front();
    for (const Chain& c : state.chains) {
        if (c.length() > best->length() ||
            (c.length() == best->length() &&
             (c.created_round < best->created_round ||
              (c.created_round == best->created_round && c.chain_id < best->chain_id))))
            best = &c;
    }
    return *best;
}

// FNV-1a over a canonical encoding; used by traces to fingerprint states.
inline std::uint64_t state_hash(const GlobalState& state) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(static_cast<std::uint64_t>(state.round));
    for (const Chain& c : state.chains) {
        mix(static_cast<std::uint64_t>(c.chain_id));
        mix(static_cast<std::uint64_t>(c.created_round));
        for (const Block& b : c.blocks) {
            mix(static_cast<std::uint64_t>(b.txset));
            mix(static_cast<std::uint64_t>(b.winner));
        }
    }
    return h;
}

}  // namespace forkgame
