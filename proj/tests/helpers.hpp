#pragma once

#include <optional>
#include <vector>

#include "forkgame/game.hpp"
#include "forkgame/params.hpp"

namespace forkgame::test {

// Bitcoin-2022-flavoured defaults: 6.25 BTC subsidy, 1500 tx blocks, 1e4 sat
// average fee, revocation premium of one average fee.
inline GameParams base_params(std::vector<double> lambda, int R, int T) {
    GameParams p;
    p.lambda = std::move(lambda);
    p.n = static_cast<int>(p.lambda.size());
    p.rounds_R = R;
    p.timelock_T = T;
    p.base_reward_B = 625'000'000;
    p.txs_per_block_m = 1500;
    p.avg_tx_fee = 10'000;
    p.f1 = p.f() + 10'000;
    p.f2 = p.f() + 200'000;
    p.c_p1 = 1;
    p.c_p2 = 1;
    p.f_bar_p1 = 10'000;
    p.f_bar_p2 = 10'000;
    p.penalty_P = 0;
    return p;
}

// Builds a single-chain state from a block list; round advances one per block.
inline GlobalState state_of(const std::vector<Block>& blocks) {
    GlobalState s = new_state();
    s.chains[0].blocks = blocks;
    s.round = static_cast<int>(blocks.size()) + 1;
    return s;
}

}  // namespace forkgame::test
