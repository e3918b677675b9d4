// Acceptance suite: each numbered criterion prints one pass/fail line with
// its runtime. The process exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "forkgame/attack_cost.hpp"
#include "forkgame/config.hpp"
#include "forkgame/empirics.hpp"
#include "forkgame/oracle.hpp"
#include "forkgame/sim.hpp"
#include "forkgame/txgraph.hpp"

using namespace forkgame;

namespace {

int g_failures = 0;

struct Criterion {
    int number;
    std::string title;
    double time_limit_s;
    std::function<bool(std::string&)> run;
};

void run_criterion(const Criterion& c) {
    std::string detail;
    bool ok = false;
    auto start = std::chrono::steady_clock::now();
    try {
        ok = c.run(detail);
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.time_limit_s) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("over time limit");
    }
    if (!ok) ++g_failures;
    std::printf("[%s] criterion %2d (%.2fs/%gs): %s%s%s\n", ok ? "PASS" : "FAIL", c.number, secs,
                c.time_limit_s, c.title.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

GameParams reference_small(std::vector<double> lambda, int R, int T) {
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
    p.f_bar_p1 = 10'000;
    p.f_bar_p2 = 10'000;
    return p;
}

GlobalState state_of(const std::vector<Block>& blocks) {
    GlobalState s = new_state();
    s.chains[0].blocks = blocks;
    s.round = static_cast<int>(blocks.size()) + 1;
    return s;
}

const std::string kDataDir = FORKGAME_DATA_DIR;

// ---------------------------------------------------------------------------

bool criterion1_cost_reproduction(std::string& detail) {
    Sat f = 15'000'000, f1 = f + 10'000;
    Sat legacy = legacy_bribe_bound(f1, f, parse_dec("0.0001"));
    Sat simplified = bf_bribe_bound_simplified(10'000, f1, f, parse_dec("0.2"));
    Sat ceiling = feasibility_ceiling(f1, f, parse_dec("0.02"));
    std::int64_t fiat_cents = to_fiat_cents(ceiling, parse_dec("25000"));
    detail = "legacy=" + std::to_string(legacy) + " simplified=" + std::to_string(simplified) +
             " ceiling=" + std::to_string(ceiling) + " fiat_cents=" + std::to_string(fiat_cents);
    return legacy == 100'000'000 && simplified == 210'000 && ceiling == 500'000 &&
           std::abs(fiat_cents - 12'500) <= 1;
}

bool criterion2_ratio(std::string& detail) {
    // Documented thousand-fold target at the conservative inputs. The two
    // exactly-pinned values of criterion 1 give 10^8 / 210000 = 476, so the
    // target needs a weakest miner below ~4.76e-5; the bundled device data
    // puts the real figure near 1.4e-12, where the ratio is ~3e10.
    Sat f = 15'000'000, f1 = f + 10'000;
    Sat legacy = legacy_bribe_bound(f1, f, parse_dec("0.0001"));
    Sat simplified = bf_bribe_bound_simplified(10'000, f1, f, parse_dec("0.2"));
    Sat ratio = legacy / simplified;
    Sat empirical_legacy = legacy_bribe_bound(f1, f, parse_dec("0.000000000001375"));
    detail = "exact ratio at lambda_min=1e-4: " + std::to_string(ratio) +
             " (need >= 1000); at the measured lambda_min=1.375e-12: " +
             std::to_string(empirical_legacy / simplified);
    return ratio >= 1000;
}

bool criterion3_empirics(std::string& detail) {
    auto table = load_pool_csv(kDataDir + "/btc_2022_pools.csv");
    double foundry = -1, sbi = -1;
    for (const auto& r : table.rows) {
        if (r.name == "Foundry USA") foundry = r.share * 100.0;
        if (r.name == "SBI Crypto") sbi = r.share * 100.0;
    }
    double total = table.total_share() * 100.0;
    double lambda_min = estimate_lambda_min(2.75e8, 2e20);
    detail = "foundry=" + std::to_string(foundry) + "% sbi=" + std::to_string(sbi) +
             "% total=" + std::to_string(total) + "% lambda_min=" + std::to_string(lambda_min);
    return close(foundry, 22.281, 0.001) && close(sbi, 1.811, 0.001) &&
           close(total, 100.0, 0.1) && lambda_min < 1e-11;
}

bool criterion4_settled_order(std::string& detail) {
    GameParams p = reference_small({0.5, 0.3, 0.2}, 5, 2);
    p.p1_creator = 0;
    p.f_bar_p2 = 20'000;  // reward ordering: f2 > f1 > f, f_p2 > f
    StrategyProfile profile = uniform_profile(3, BuiltinStrategy::BribeWaiter);
    GlobalState s1 = state_of({{TxSetKind::TxsP1, 0}, {TxSetKind::Unrelated, 1}});
    GlobalState s2 = state_of(
        {{TxSetKind::TxsP1, 0}, {TxSetKind::Unrelated, 1}, {TxSetKind::Txs2, 2}});
    GlobalState s3 = state_of({{TxSetKind::TxsP1, 0},
                               {TxSetKind::Unrelated, 1},
                               {TxSetKind::Txs2, 2},
                               {TxSetKind::TxsP2, 0}});
    for (int player = 0; player < 3; ++player) {
        auto r1 = dominating_action(s1, 3, player, p, profile);
        auto r2 = dominating_action(s2, 4, player, p, profile);
        auto r3 = dominating_action(s3, 5, player, p, profile);
        bool ok = r1.action == Action{0, Decision::Continue, TxSetKind::Txs2} && r1.margin > 0 &&
                  r2.action == Action{0, Decision::Continue, TxSetKind::TxsP2} && r2.margin > 0 &&
                  r3.action == Action{0, Decision::Continue, TxSetKind::Unrelated} &&
                  r3.margin > 0;
        if (!ok) {
            detail = "player " + std::to_string(player) + " breaks the sequence";
            return false;
        }
    }
    detail = "txs_2 -> txs_p2 -> txs_u dominates for every player";
    return true;
}

bool criterion5_self_fork_boundary(std::string& detail) {
    GameParams p = reference_small({0.5, 0.3, 0.2}, 5, 2);
    const int j = 1;
    GlobalState s = state_of(
        {{TxSetKind::Unrelated, 0}, {TxSetKind::Unrelated, 2}, {TxSetKind::Txs1, j}});
    StrategyProfile profile = uniform_profile(3, BuiltinStrategy::PenaltyAwareWaiter);
    const Sat threshold = p.f1 + p.base_reward_B;

    auto report = [&](Sat premium) {
        GameParams q = p;
        q.f2 = q.f() + premium;
        return dominating_action(s, 4, j, q, profile);
    };
    for (Sat premium : {Sat{20'000}, threshold / 2, threshold - 1}) {
        auto r = report(premium);
        if (r.action.decision != Decision::Continue) {
            detail = "fork dominated below the threshold at premium " + std::to_string(premium);
            return false;
        }
    }
    auto at = report(threshold);
    auto above = report(threshold + 1);
    bool flip = std::abs(at.margin) <= 1.0 && above.action.decision == Decision::Fork &&
                above.margin >= 0;
    detail = "margin at f1+B: " + std::to_string(at.margin) + "; at f1+B+1 fork wins by " +
             std::to_string(above.margin);
    return flip;
}

bool criterion6_other_fork_boundary(std::string& detail) {
    GameParams p = reference_small({0.001, 0.5, 0.499}, 5, 2);
    p.base_reward_B = 625'000;
    p.txs_per_block_m = 100;
    p.avg_tx_fee = 100;  // f + B = 635'000
    p.f1 = p.f() + 100;
    const int j = 0, i = 1;
    const Sat theta = 635;  // lambda_j (f + B) exactly
    GlobalState s = state_of(
        {{TxSetKind::Unrelated, 2}, {TxSetKind::Unrelated, 2}, {TxSetKind::Txs1, j}});
    StrategyProfile profile = {builtin(BuiltinStrategy::GreedyDefault),
                               builtin(BuiltinStrategy::PenaltyAwareWaiter),
                               builtin(BuiltinStrategy::PenaltyAwareWaiter)};
    auto report = [&](Sat premium) {
        GameParams q = p;
        q.f2 = q.f() + premium;
        return dominating_action(s, 4, i, q, profile);
    };
    auto at = report(theta);
    auto above = report(theta + 1);
    bool ok = at.action.decision == Decision::Continue && at.margin > 0 &&
              above.action.decision == Decision::Fork && above.margin > 0;
    detail = "continue margin at lambda_j(f+B): " + std::to_string(at.margin) +
             "; fork margin one sat above: " + std::to_string(above.margin);
    return ok;
}

bool criterion7_everyone_mines_revocation(std::string& detail) {
    GameParams p = reference_small({0.5, 0.3, 0.2}, 5, 2);
    p.f1 = p.f() + 100'000;
    p.f2 = p.f() + 150'000;  // inside every player's window: Y = 1
    ConditionReport cond = theorem_conditions(p);
    if (!(cond.Y == 1.0 && cond.mining_pressure_positive && cond.bribe_small &&
          cond.f1_above_f)) {
        detail = "hypotheses unexpectedly violated";
        return false;
    }
    StrategyProfile profile = uniform_profile(3, BuiltinStrategy::GreedyDefault);
    for (int player = 0; player < 3; ++player) {
        auto r = dominating_action(new_state(), 1, player, p, profile);
        if (!(r.action == Action{0, Decision::Continue, TxSetKind::Txs1} && r.margin > 0)) {
            detail = "player " + std::to_string(player) + " does not open with txs_1";
            return false;
        }
    }
    detail = "round-1 dominating action is txs_1 for every player (Y=1, T=2)";
    return true;
}

bool criterion8_penalty_deters(std::string& detail) {
    GameParams p = reference_small({0.5, 0.3, 0.2}, 6, 3);
    p.p1_creator = 0;
    p.f2 = p.f() + 50'000;      // above (f1-f)/lambda_s = 20'000
    p.f_bar_p2 = 20'000;
    p.penalty_P = 320'000'001;  // lambda_s (f+B) + 1 sat
    ConditionReport cond = theorem_conditions(p);
    if (!(cond.bribe_beats_waiting_floor && cond.survival_condition && cond.penalty_sufficient)) {
        detail = "hypotheses unexpectedly violated";
        return false;
    }
    StrategyProfile profile = bribe_and_fork_profile(p);

    std::vector<Block> blocks = {{TxSetKind::TxsP1, 0}};
    for (int r = 2; r <= p.timelock_T; ++r) {
        GlobalState s = state_of(blocks);
        for (int player = 0; player < p.n; ++player) {
            auto rep = dominating_action(s, r, player, p, profile);
            if (rep.action.txset == TxSetKind::Txs1) {
                detail = "player " + std::to_string(player) + " mines txs_1 in round " +
                         std::to_string(r);
                return false;
            }
        }
        blocks.push_back({TxSetKind::Unrelated, 1});
    }
    GlobalState challenged = state_of(
        {{TxSetKind::TxsP1, 0}, {TxSetKind::Unrelated, 2}, {TxSetKind::Txs1, 1}});
    auto rep = dominating_action(challenged, 4, 0, p, profile);
    bool forks = rep.action.decision == Decision::Fork && rep.margin > 0;
    detail = "no txs_1 in rounds 2..T; threatener forks the challenge (margin " +
             std::to_string(rep.margin) + ")";
    return forks;
}

bool criterion9_equilibrium(std::string& detail) {
    GameParams p = reference_small({0.5, 0.485, 0.015}, 6, 3);
    p.p1_creator = 0;
    p.f2 = p.f() + 200'000;
    p.f_bar_p2 = 20'000;
    p.penalty_P = 320'000'001;
    p.strict_distribution = true;
    ConditionReport cond = theorem_conditions(p);
    if (!cond.all_attack_conditions_pass) {
        detail = "instance does not satisfy the full-attack hypotheses";
        return false;
    }
    StrategyProfile profile = bribe_and_fork_profile(p);
    for (int player = 0; player < p.n; ++player) {
        auto rep = best_response_check(profile, player, p, StrategySpace::BuiltinLibrary);
        if (!rep.is_best_response) {
            detail = "player " + std::to_string(player) + " deviates to " + rep.witness_strategy +
                     " (gap " + std::to_string(rep.utility_gap) + " sat)";
            return false;
        }
    }
    // Below the bound the equilibrium must break with a named witness.
    GameParams weak = p;
    weak.f2 = weak.f() + 5'000;  // under the bound; also under f1, so forks are moot
    bool witness_found = false;
    std::string witness;
    for (int player = 0; player < weak.n; ++player) {
        auto rep = best_response_check(profile, player, weak, StrategySpace::BuiltinLibrary);
        if (!rep.is_best_response) {
            witness_found = true;
            witness = "player " + std::to_string(player) + " -> " + rep.witness_strategy;
            break;
        }
    }
    detail = "equilibrium holds at f2-f=200000; below the bound: " +
             (witness_found ? witness : std::string("no witness"));
    return witness_found;
}

bool criterion10_mc_vs_oracle(std::string& detail) {
    struct Instance {
        GameParams params;
        StrategyProfile profile;
    };
    std::vector<Instance> instances;
    {
        GameParams p = reference_small({0.8, 0.2}, 3, 1);
        instances.push_back({p, uniform_profile(2, BuiltinStrategy::GreedyDefault)});
    }
    {
        GameParams p = reference_small({0.5, 0.3, 0.2}, 4, 2);
        p.p1_creator = 0;
        p.penalty_P = 320'000'001;
        instances.push_back({p, bribe_and_fork_profile(p)});
    }
    {
        GameParams p = reference_small({0.5, 0.3, 0.2}, 4, 2);
        p.p1_creator = 0;
        p.penalty_P = 320'000'001;
        p.f2 = p.f() + 50'000;
        instances.push_back({p, {builtin(BuiltinStrategy::FeatherForkThreatener),
                                 builtin(BuiltinStrategy::MineTxs1First),
                                 builtin(BuiltinStrategy::PenaltyAwareWaiter)}});
    }
    for (std::size_t k = 0; k < instances.size(); ++k) {
        const auto& inst = instances[k];
        auto exact = exact_utilities(inst.profile, inst.params);
        auto est = estimate_utilities(inst.profile, inst.params, 100'000, 7 + k);
        for (int i = 0; i < inst.params.n; ++i) {
            double gap = std::abs(est.mean[i] - exact[i]);
            if (gap > 3.0 * std::max(est.stderr_[i], 1e-9)) {
                detail = "instance " + std::to_string(k) + " player " + std::to_string(i) +
                         ": |mc-exact| = " + std::to_string(gap) + " > 3 stderr (" +
                         std::to_string(est.stderr_[i]) + ")";
                return false;
            }
        }
    }
    detail = "three instances, every player within 3 standard errors at 100k trials";
    return true;
}

bool criterion11_txgraph(std::string& detail) {
    using namespace forkgame::txgraph;
    Graph g = build_attack_graph(10'000'000, 240'000, 142'597'906, /*T=*/4, 3, 5);
    auto scenarios = enumerate_scenarios(g);
    int reclaims = 0;
    for (const auto& scenario : scenarios) {
        auto result = simulate_confirmation(g, scenario);
        bool tx1 = result.confirm_height.count(TxId::Tx1) > 0;
        bool tx2 = result.confirm_height.count(TxId::Tx2) > 0;
        if (tx1 && tx2) {
            detail = "conflicting spends co-confirmed";
            return false;
        }
        if (result.deposit == DepositOutcome::Reclaimed) {
            ++reclaims;
            if (!result.confirm_height.count(TxId::TxB)) {
                detail = "deposit reclaimed without the bribe on-chain";
                return false;
            }
        }
        Sat external_in = 0;
        for (const auto& [id, h] : result.confirm_height)
            for (const Input& in : g.tx(id).inputs)
                if (!in.ref) external_in += in.external_amount;
        Sat unspent = 0;
        for (const auto& o : result.unspent) unspent += o.amount;
        if (external_in != unspent + result.total_fees) {
            detail = "value not conserved";
            return false;
        }
    }
    detail = std::to_string(scenarios.size()) + " scenarios enumerated, " +
             std::to_string(reclaims) + " reclaim paths, all properties hold";
    return !scenarios.empty() && reclaims > 0;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "closed-form cost bounds reproduce the reference figures", 1.0,
         criterion1_cost_reproduction},
        {2, "thousand-fold cost-reduction ratio at the conservative inputs", 1.0,
         criterion2_ratio},
        {3, "pool shares and weakest-miner estimate from the bundled data", 1.0,
         criterion3_empirics},
        {4, "after the timelock the dominating order is txs_2, txs_p2, txs_u", 10.0,
         criterion4_settled_order},
        {5, "self-fork becomes dominant exactly above f1 + B", 10.0,
         criterion5_self_fork_boundary},
        {6, "third-party fork flips at lambda_j (f + B) on the integer grid", 10.0,
         criterion6_other_fork_boundary},
        {7, "small bribe: every >1% miner opens with the revocation block", 10.0,
         criterion7_everyone_mines_revocation},
        {8, "posted deposit deters the revocation block and arms the fork", 30.0,
         criterion8_penalty_deters},
        {9, "threat profile is a Nash equilibrium over the strategy library", 60.0,
         criterion9_equilibrium},
        {10, "Monte Carlo agrees with exact enumeration within 3 sigma", 60.0,
         criterion10_mc_vs_oracle},
        {11, "transaction-graph conflict, reclaim gating and value conservation", 5.0,
         criterion11_txgraph},
    };
    for (const auto& c : criteria) run_criterion(c);
    if (g_failures == 0) {
        std::printf("acceptance: all %zu criteria pass\n", criteria.size());
        return 0;
    }
    std::printf("acceptance: %d of %zu criteria failed\n", g_failures, criteria.size());
    return 1;
}
