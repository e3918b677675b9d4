#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "forkgame/money.hpp"
#include "forkgame/params.hpp"

namespace forkgame {

// Flat key-value parameter files. Monetary keys exist in a _sat and a _btc
// variant; exactly one of the pair may appear. '#' starts a comment.
//
//   lambda              = 0.5,0.3,0.2
//   rounds              = 6
//   timelock            = 3
//   block_reward_btc    = 6.25
//   txs_per_block       = 1500
//   avg_tx_fee_sat      = 10000
//   txs1_fee_sat        = 15010000
//   txs2_fee_sat        = 15200000
//   p1_slots            = 1
//   p2_slots            = 1
//   p1_slot_fee_sat     = 10000
//   p2_slot_fee_sat     = 20000
//   penalty_sat         = 320000001
//   p1_creator          = 0          # omit to play without the deposit
//   strict_distribution = false
inline GameParams parse_params_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::size_t a = line.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
        auto trim = [](std::string s) {
            std::size_t x = s.find_first_not_of(" \t\r\n");
            if (x == std::string::npos) return std::string();
            std::size_t y = s.find_last_not_of(" \t\r\n");
            return s.substr(x, y - x + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ParseError("empty key or value", line_no);
        if (kv.count(key)) throw ParseError("duplicate key '" + key + "'", line_no);
        kv[key] = value;
    }

    auto take = [&kv](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw ParseError("missing required key '" + key + "'");
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto take_int = [&take](const std::string& key) {
        return std::stoll(take(key));
    };
    auto take_money = [&kv, &take](const std::string& stem) -> Sat {
        bool has_sat = kv.count(stem + "_sat") > 0;
        bool has_btc = kv.count(stem + "_btc") > 0;
        if (has_sat && has_btc)
            throw ParseError("give exactly one of " + stem + "_sat / " + stem + "_btc");
        if (has_sat) return std::stoll(take(stem + "_sat"));
        if (has_btc) return parse_btc_to_sat(take(stem + "_btc"));
        throw ParseError("missing required key '" + stem + "_sat' (or _btc)");
    };

    GameParams p;
    {
        std::string lambdas = take("lambda");
        std::stringstream ss(lambdas);
        std::string part;
        while (std::getline(ss, part, ',')) p.lambda.push_back(std::stod(part));
        p.n = static_cast<int>(p.lambda.size());
    }
    p.rounds_R = static_cast<int>(take_int("rounds"));
    p.timelock_T = static_cast<int>(take_int("timelock"));
    p.base_reward_B = take_money("block_reward");
    p.txs_per_block_m = take_int("txs_per_block");
    p.avg_tx_fee = take_money("avg_tx_fee");
    p.f1 = take_money("txs1_fee");
    p.f2 = take_money("txs2_fee");
    p.c_p1 = kv.count("p1_slots") ? take_int("p1_slots") : 1;
    p.c_p2 = kv.count("p2_slots") ? take_int("p2_slots") : 1;
    p.f_bar_p1 = (kv.count("p1_slot_fee_sat") || kv.count("p1_slot_fee_btc"))
                     ? take_money("p1_slot_fee")
                     : std::max<Sat>(0, p.f1 - p.f());
    p.f_bar_p2 = (kv.count("p2_slot_fee_sat") || kv.count("p2_slot_fee_btc"))
                     ? take_money("p2_slot_fee")
                     : p.avg_tx_fee;
    p.penalty_P = (kv.count("penalty_sat") || kv.count("penalty_btc")) ? take_money("penalty") : 0;
    if (kv.count("p1_creator")) p.p1_creator = static_cast<int>(take_int("p1_creator"));
    if (kv.count("strict_distribution")) {
        std::string v = take("strict_distribution");
        if (v == "true" || v == "1") p.strict_distribution = true;
        else if (v == "false" || v == "0") p.strict_distribution = false;
        else throw ParseError("strict_distribution must be true or false");
    }
    if (!kv.empty()) throw ParseError("unknown key '" + kv.begin()->first + "'");

    // Float noise from decimal share lists is fine; real imbalance is not.
    if (std::abs(p.lambda_sum() - 1.0) <= 1e-6) p.normalize_lambda();
    return p;
}

inline GameParams load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open parameter file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_params_text(buffer.str());
}

}  // namespace forkgame
