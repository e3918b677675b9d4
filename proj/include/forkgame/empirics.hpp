#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "forkgame/money.hpp"
#include "forkgame/params.hpp"

namespace forkgame {

struct FeeRecord {
    std::string week;          // ISO week label
    Sat avg_block_fee = 0;     // weekly average of per-block fee totals
    Sat avg_tx_fee = 0;        // weekly average single-transaction fee
    double tx_per_block = 0.0;
    bool consistency_warning = false;  // block fee vs tx fee * count off by >10%
};

inline constexpr const char* kFeeCsvHeader = "week,avg_block_fee_btc,avg_tx_fee_btc,tx_per_block";

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

inline std::vector<FeeRecord> load_fee_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open fee CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("fee CSV is empty: " + path);
    if (detail::strip(line) != kFeeCsvHeader)
        throw SchemaError("fee CSV header must be '" + std::string(kFeeCsvHeader) + "'");

    std::vector<FeeRecord> records;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::strip(line).empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 4) throw ParseError("expected 4 fields", line_no);
        FeeRecord rec;
        rec.week = detail::strip(fields[0]);
        rec.avg_block_fee = parse_btc_to_sat(detail::strip(fields[1]), line_no);
        rec.avg_tx_fee = parse_btc_to_sat(detail::strip(fields[2]), line_no);
        try {
            rec.tx_per_block = std::stod(detail::strip(fields[3]));
        } catch (const std::exception&) {
            throw ParseError("bad tx_per_block value", line_no);
        }
        if (rec.tx_per_block <= 0) throw ParseError("tx_per_block must be positive", line_no);
        double implied = static_cast<double>(rec.avg_tx_fee) * rec.tx_per_block;
        double actual = static_cast<double>(rec.avg_block_fee);
        rec.consistency_warning = std::abs(actual - implied) > 0.10 * std::max(actual, implied);
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw SchemaError("fee CSV has a header but no records: " + path);
    return records;
}

struct PoolShare {
    std::string name;
    std::int64_t blocks = 0;
    double share = 0.0;
};

struct PoolShareTable {
    std::vector<PoolShare> rows;  // sorted by share, descending

    double total_share() const {
        double s = 0.0;
        for (const auto& r : rows) s += r.share;
        return s;
    }
};

inline PoolShareTable pool_shares(const std::vector<std::pair<std::string, std::int64_t>>& counts) {
    if (counts.empty()) throw EmptyInput("no pool rows");
    std::int64_t total = 0;
    for (const auto& [name, c] : counts) {
        if (c < 0) throw DomainError("negative block count for " + name);
        total += c;
    }
    if (total <= 0) throw EmptyInput("total block count is zero");
    PoolShareTable table;
    for (const auto& [name, c] : counts)
        table.rows.push_back({name, c, static_cast<double>(c) / static_cast<double>(total)});
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const PoolShare& a, const PoolShare& b) { return a.share > b.share; });
    return table;
}

inline PoolShareTable load_pool_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open pool CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("pool CSV is empty: " + path);
    if (detail::strip(line) != "pool,blocks")
        throw SchemaError("pool CSV header must be 'pool,blocks'");
    std::vector<std::pair<std::string, std::int64_t>> counts;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::strip(line).empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 2) throw ParseError("expected 2 fields", line_no);
        try {
            counts.emplace_back(detail::strip(fields[0]), std::stoll(detail::strip(fields[1])));
        } catch (const std::exception&) {
            throw ParseError("bad block count", line_no);
        }
    }
    return pool_shares(counts);
}

inline double estimate_lambda_min(double device_hashrate, double network_hashrate) {
    if (!(device_hashrate > 0) || !(network_hashrate > 0))
        throw DomainError("hashrates must be positive");
    if (device_hashrate > network_hashrate)
        throw DomainError("device hashrate exceeds the network");
    return device_hashrate / network_hashrate;
}

struct DerivedParams {
    GameParams params;
    std::vector<ParamViolation> violations;
};

// Game parameters implied by the measured fee series and pool shares. The
// special-set defaults follow the small-constant substitution: one slot each,
// deposit slot priced at the revocation premium, reclaim slot at the average
// fee.
inline DerivedParams derive_game_params(const std::vector<FeeRecord>& fees,
                                        const PoolShareTable& shares, Sat base_reward_B,
                                        int rounds_R, int timelock_T, Sat f1, Sat f2,
                                        Sat penalty_P) {
    if (fees.empty()) throw EmptyInput("no fee records");
    if (shares.rows.empty()) throw EmptyInput("no pool shares");
    long double fee_sum = 0.0L, m_sum = 0.0L;
    for (const FeeRecord& r : fees) {
        fee_sum += static_cast<long double>(r.avg_tx_fee);
        m_sum += static_cast<long double>(r.tx_per_block);
    }
    DerivedParams out;
    GameParams& p = out.params;
    p.n = static_cast<int>(shares.rows.size());
    for (const PoolShare& r : shares.rows) p.lambda.push_back(r.share);
    p.normalize_lambda();
    p.rounds_R = rounds_R;
    p.timelock_T = timelock_T;
    p.base_reward_B = base_reward_B;
    p.avg_tx_fee = static_cast<Sat>(std::llroundl(fee_sum / fees.size()));
    p.txs_per_block_m = static_cast<std::int64_t>(std::llroundl(m_sum / fees.size()));
    p.f1 = f1;
    p.f2 = f2;
    p.penalty_P = penalty_P;
    p.c_p1 = 1;
    p.c_p2 = 1;
    p.f_bar_p1 = std::max<Sat>(0, f1 - p.f());
    p.f_bar_p2 = p.avg_tx_fee;
    p.strict_distribution = true;
    out.violations = validate_params(p);
    return out;
}

}  // namespace forkgame
