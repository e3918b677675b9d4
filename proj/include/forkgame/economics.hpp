#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "forkgame/game.hpp"
#include "forkgame/params.hpp"

namespace forkgame {

// Miner-side block reward. The deposit itself is settled against the final
// chain in settle(): block rewards never include +/-P, a side ledger charges
// the depositor instead, which nets to the same figure when the depositor
// mines the deposit block.
inline Sat reward_of(TxSetKind kind, const GameParams& p) {
    switch (kind) {
        case TxSetKind::Unrelated: return p.base_reward_B + p.f();
        case TxSetKind::Txs1: return p.base_reward_B + p.f1;
        case TxSetKind::Txs2: return p.base_reward_B + p.f2;
        case TxSetKind::TxsP1: return p.base_reward_B + p.f_p1();
        case TxSetKind::TxsP2: return p.base_reward_B + p.f_p2();
    }
    return 0;
}

enum class DepositState : std::uint8_t { NotPosted = 0, LockedLost, Reclaimed };

inline const char* to_string(DepositState s) {
    switch (s) {
        case DepositState::NotPosted: return "not-posted";
        case DepositState::LockedLost: return "locked-lost";
        case DepositState::Reclaimed: return "reclaimed";
    }
    return "?";
}

struct SettlementReport {
    std::vector<Sat> per_player_reward;
    int winning_chain_id = 0;
    DepositState deposit_state = DepositState::NotPosted;

    Sat total() const {
        return std::accumulate(per_player_reward.begin(), per_player_reward.end(), Sat{0});
    }
};

// Pays out the winning chain once all R rounds have been played.
inline SettlementReport settle(const GlobalState& final_state, const GameParams& params) {
    if (final_state.round <= params.rounds_R)
        throw GameNotOver("settlement requested in round " + std::to_string(final_state.round) +
                          " of " + std::to_string(params.rounds_R));
    const Chain& winner = longest_chain(final_state);
    SettlementReport report;
    report.per_player_reward.assign(params.n, 0);
    report.winning_chain_id = winner.chain_id;
    for (const Block& b : winner.blocks)
        report.per_player_reward.at(b.winner) += reward_of(b.txset, params);
    if (winner.contains(TxSetKind::TxsP1)) {
        if (winner.contains(TxSetKind::TxsP2)) {
            report.deposit_state = DepositState::Reclaimed;
        } else {
            report.deposit_state = DepositState::LockedLost;
            if (!params.p1_creator)
                throw IllegalAction("deposit block on chain but no depositor configured");
            report.per_player_reward.at(*params.p1_creator) -= params.penalty_P;
        }
    }
    return report;
}

}  // namespace forkgame
