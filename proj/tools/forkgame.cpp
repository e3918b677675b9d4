#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "forkgame/attack_cost.hpp"
#include "forkgame/config.hpp"
#include "forkgame/empirics.hpp"
#include "forkgame/oracle.hpp"
#include "forkgame/sim.hpp"
#include "forkgame/strategy.hpp"
#include "forkgame/txgraph.hpp"

using nlohmann::json;
using namespace forkgame;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitBudget = 4;

// Every subcommand builds a list of records; both output modes render the
// same records.
struct Output {
    bool json_lines = false;
    std::vector<json> records;

    void add(json j) { records.push_back(std::move(j)); }

    void flush() const {
        for (const json& r : records) {
            if (json_lines) {
                std::cout << r.dump() << "\n";
            } else {
                std::cout << render_human(r) << "\n";
            }
        }
    }

    static std::string render_human(const json& r) {
        std::ostringstream os;
        std::string kind = r.value("record", "");
        if (kind == "utility") {
            os << "player " << r.at("player").get<int>() << ": mean "
               << format_btc(static_cast<Sat>(r.at("mean_sat").get<double>())) << " BTC";
            if (r.at("stderr_defined").get<bool>())
                os << "  (stderr " << r.at("stderr_sat").get<double>() << " sat, "
                   << r.at("trials").get<std::uint64_t>() << " trials)";
            else
                os << "  (single trial, stderr undefined)";
        } else if (kind == "condition") {
            os << (r.at("pass").get<bool>() ? "[pass] " : "[FAIL] ") << r.at("key").get<std::string>()
               << " = " << r.at("value").get<double>() << "  -- " << r.at("note").get<std::string>();
        } else if (kind == "equilibrium") {
            os << "player " << r.at("player").get<int>() << ": "
               << (r.at("is_best_response").get<bool>() ? "best response holds" : "deviation found");
            if (!r.at("witness").get<std::string>().empty())
                os << " (witness: " << r.at("witness").get<std::string>()
                   << ", gap " << r.at("gap_sat").get<double>() << " sat)";
        } else if (kind == "quote") {
            os << r.at("bound").get<std::string>() << ": " << r.at("value_sat").get<Sat>()
               << " sat (" << format_btc(r.at("value_sat").get<Sat>()) << " BTC)";
            if (r.contains("fiat_usd")) os << " = $" << r.at("fiat_usd").get<std::string>();
            if (r.contains("note")) os << "  -- " << r.at("note").get<std::string>();
        } else if (kind == "fee-summary") {
            os << "weeks " << r.at("weeks").get<int>() << ": block fee "
               << format_btc(r.at("min_block_fee_sat").get<Sat>()) << ".."
               << format_btc(r.at("max_block_fee_sat").get<Sat>()) << " BTC, mean tx fee "
               << r.at("mean_tx_fee_sat").get<Sat>() << " sat, mean txs/block "
               << r.at("mean_tx_per_block").get<double>();
        } else if (kind == "pool") {
            os << r.at("name").get<std::string>() << ": " << r.at("blocks").get<std::int64_t>()
               << " blocks, " << r.at("share_pct").get<double>() << "%";
        } else if (kind == "lambda-min") {
            os << "weakest-miner share estimate: " << r.at("estimate").get<double>();
        } else if (kind == "derived-params") {
            os << "derived: n=" << r.at("n").get<int>() << " f_bar=" << r.at("f_bar_sat").get<Sat>()
               << " m=" << r.at("m").get<std::int64_t>()
               << " lambda_s=" << r.at("lambda_s").get<double>();
        } else if (kind == "violation") {
            os << (r.at("warning").get<bool>() ? "[warn] " : "[error] ")
               << r.at("message").get<std::string>();
        } else if (kind == "graph-check") {
            os << (r.at("pass").get<bool>() ? "[pass] " : "[FAIL] ")
               << r.at("name").get<std::string>() << ": " << r.at("detail").get<std::string>();
        } else if (kind == "ownership") {
            os << r.at("tx").get<std::string>() << "[" << r.at("output").get<int>() << "] "
               << r.at("label").get<std::string>() << ": " << r.at("amount_sat").get<Sat>()
               << " sat -> " << r.at("controller").get<std::string>();
        } else if (kind == "deposit") {
            os << "deposit: " << r.at("state").get<std::string>();
        } else if (kind == "note") {
            os << r.at("text").get<std::string>();
        } else {
            os << r.dump();
        }
        return os.str();
    }
};

std::string cents_to_string(std::int64_t cents) {
    std::string whole = std::to_string(cents / 100);
    std::string frac = std::to_string(cents % 100);
    if (frac.size() < 2) frac.insert(frac.begin(), '0');
    return whole + "." + frac;
}

StrategyProfile resolve_profile(const std::string& spec_text, const GameParams& params) {
    if (spec_text == "bribe-and-fork") return bribe_and_fork_profile(params);
    if (spec_text.rfind("all:", 0) == 0) {
        Strategy s = builtin(spec_text.substr(4));
        return StrategyProfile(params.n, s);
    }
    StrategyProfile profile;
    std::stringstream ss(spec_text);
    std::string name;
    while (std::getline(ss, name, ',')) profile.push_back(builtin(name));
    if (static_cast<int>(profile.size()) != params.n)
        throw UnknownStrategy("profile lists " + std::to_string(profile.size()) +
                              " strategies for " + std::to_string(params.n) + " players");
    return profile;
}

GameParams load_and_check(const std::string& path) {
    GameParams p = load_params_file(path);
    auto violations = validate_params(p);
    for (const auto& v : violations)
        if (v.warning_only) std::cerr << "warning: " << v.message << "\n";
    if (has_errors(violations)) {
        for (const auto& v : violations)
            if (!v.warning_only) std::cerr << "error: " << v.message << "\n";
        throw InvalidParams("invalid parameter file: " + path);
    }
    return p;
}

int cmd_simulate(const std::string& params_path, const std::string& profile_text,
                 std::uint64_t trials, std::uint64_t seed, const std::string& trace_path,
                 Output& out) {
    GameParams params = load_and_check(params_path);
    StrategyProfile profile = resolve_profile(profile_text, params);
    if (trials < 1) throw InvalidParams("--trials must be at least 1");

    if (!trace_path.empty()) {
        GameTrace trace = run_game(profile, params, seed, 0);
        std::ofstream trace_out(trace_path);
        write_trace(trace_out, trace);
    }
    UtilityEstimate est = estimate_utilities(profile, params, trials, seed);
    for (int i = 0; i < params.n; ++i)
        out.add({{"record", "utility"},
                 {"player", i},
                 {"strategy", profile[i].name},
                 {"mean_sat", est.mean[i]},
                 {"stderr_sat", est.stderr_[i]},
                 {"stderr_defined", est.stderr_defined},
                 {"trials", est.trials}});
    return kExitOk;
}

int cmd_oracle(const std::string& params_path, const std::string& profile_text, double budget,
               bool conditions_only, Output& out) {
    GameParams params = load_and_check(params_path);
    ConditionReport report = theorem_conditions(params);
    for (const ConditionEntry& e : report.entries)
        out.add({{"record", "condition"},
                 {"key", e.key},
                 {"value", e.value},
                 {"pass", e.pass},
                 {"note", e.note}});
    out.add({{"record", "condition"},
             {"key", "all_attack_conditions"},
             {"value", 0.0},
             {"pass", report.all_attack_conditions_pass},
             {"note", "every hypothesis of the full-attack statement"}});
    if (conditions_only) return kExitOk;

    StrategyProfile profile = resolve_profile(profile_text, params);
    for (int i = 0; i < params.n; ++i) {
        BestResponseReport br =
            best_response_check(profile, i, params, StrategySpace::BuiltinLibrary, budget);
        out.add({{"record", "equilibrium"},
                 {"player", i},
                 {"strategy", profile[i].name},
                 {"is_best_response", br.is_best_response},
                 {"current_sat", br.current_utility},
                 {"best_sat", br.best_utility},
                 {"gap_sat", br.utility_gap},
                 {"witness", br.witness_strategy}});
    }
    return kExitOk;
}

int cmd_cost(Sat f_bar, Sat f1, Sat f, const std::string& lambda_min,
             const std::string& lambda_s, const std::string& lambda_j, int timelock, Sat B,
             const std::string& price, bool lambda_s_defaulted, Output& out) {
    if (f_bar < 0 || f1 < 0 || f < 0) throw DomainError("fees must be non-negative");
    Dec lmin = parse_dec(lambda_min);
    Dec ls = parse_dec(lambda_s);
    Dec lj = parse_dec(lambda_j);
    Dec p = parse_dec(price);

    auto quote = [&](const char* name, Sat value, const std::string& note = "") {
        json j = {{"record", "quote"},
                  {"bound", name},
                  {"value_sat", value},
                  {"fiat_usd", cents_to_string(to_fiat_cents(value, p))}};
        if (!note.empty()) j["note"] = note;
        out.add(std::move(j));
    };
    std::string provenance =
        lambda_s_defaulted ? "lambda_s defaulted to 0.2 (top pools hold over 20%)" : "";
    quote("legacy", legacy_bribe_bound(f1, f, lmin));
    quote("bf-general",
          bf_bribe_bound_general(f_bar, f1, f, ls, timelock, 1, 1, f1 - f, f_bar), provenance);
    quote("bf-simplified", bf_bribe_bound_simplified(f_bar, f1, f, ls), provenance);
    quote("feasibility-ceiling", feasibility_ceiling(f1, f, lj));
    quote("penalty-floor", penalty_floor(ls, f, B), provenance);
    return kExitOk;
}

int cmd_empirics(const std::string& fees_path, const std::string& pools_path,
                 double device_hashrate, double network_hashrate, Output& out) {
    if (!fees_path.empty()) {
        auto records = load_fee_csv(fees_path);
        Sat min_block = INT64_MAX, max_block = 0;
        long double fee_sum = 0, m_sum = 0;
        int warnings = 0;
        for (const auto& r : records) {
            min_block = std::min(min_block, r.avg_block_fee);
            max_block = std::max(max_block, r.avg_block_fee);
            fee_sum += r.avg_tx_fee;
            m_sum += r.tx_per_block;
            if (r.consistency_warning) ++warnings;
        }
        out.add({{"record", "fee-summary"},
                 {"weeks", static_cast<int>(records.size())},
                 {"min_block_fee_sat", min_block},
                 {"max_block_fee_sat", max_block},
                 {"mean_tx_fee_sat", static_cast<Sat>(llroundl(fee_sum / records.size()))},
                 {"mean_tx_per_block", static_cast<double>(m_sum / records.size())},
                 {"consistency_warnings", warnings}});
    }
    PoolShareTable table;
    if (!pools_path.empty()) {
        table = load_pool_csv(pools_path);
        for (const auto& r : table.rows)
            out.add({{"record", "pool"},
                     {"name", r.name},
                     {"blocks", r.blocks},
                     {"share", r.share},
                     {"share_pct", r.share * 100.0}});
    }
    if (device_hashrate > 0 && network_hashrate > 0)
        out.add({{"record", "lambda-min"},
                 {"estimate", estimate_lambda_min(device_hashrate, network_hashrate)}});
    if (!fees_path.empty() && !pools_path.empty()) {
        auto derived = derive_game_params(load_fee_csv(fees_path), table,
                                          parse_btc_to_sat("6.25"), 120, 110, 15'010'000,
                                          15'240'000, 142'597'906);
        out.add({{"record", "derived-params"},
                 {"n", derived.params.n},
                 {"f_bar_sat", derived.params.avg_tx_fee},
                 {"m", derived.params.txs_per_block_m},
                 {"lambda_s", derived.params.lambda[derived.params.strongest()]},
                 {"f_sat", derived.params.f()}});
        for (const auto& v : derived.violations)
            out.add({{"record", "violation"}, {"warning", v.warning_only}, {"message", v.message}});
    }
    return kExitOk;
}

txgraph::LedgerScenario parse_scenario(const std::string& text) {
    txgraph::LedgerScenario scenario;
    std::stringstream ss(text);
    std::string step;
    while (std::getline(ss, step, ',')) {
        auto at = step.find('@');
        if (at == std::string::npos)
            throw ParseError("scenario steps look like txid@height: " + step);
        scenario.push_back({txgraph::tx_id_from_string(step.substr(0, at)),
                            std::stoi(step.substr(at + 1))});
    }
    return scenario;
}

int cmd_txgraph(const std::string& action, Sat channel, Sat bribe, Sat deposit, int timelock,
                int m, int n, bool collusion, const std::string& graph_path,
                const std::string& out_path, const std::string& scenario_text, Output& out) {
    txgraph::Graph graph;
    if (!graph_path.empty()) {
        std::ifstream in(graph_path);
        if (!in) throw ParseError("cannot open graph file: " + graph_path);
        graph = txgraph::graph_from_json(json::parse(in));
    } else {
        graph = txgraph::build_attack_graph(channel, bribe, deposit, timelock, m, n, !collusion);
    }

    if (action == "build") {
        json j = txgraph::to_json(graph);
        if (!out_path.empty()) {
            std::ofstream f(out_path);
            f << j.dump(2) << "\n";
            out.add({{"record", "note"}, {"text", "graph written to " + out_path}});
        } else {
            std::cout << j.dump(2) << "\n";
        }
        return kExitOk;
    }
    if (action == "validate") {
        auto report = txgraph::validate_graph(graph);
        for (const auto& c : report.checks)
            out.add({{"record", "graph-check"},
                     {"name", c.name},
                     {"pass", c.pass},
                     {"detail", c.detail}});
        return report.all_pass ? kExitOk : kExitRuntime;
    }
    if (action == "simulate") {
        if (scenario_text.empty())
            throw InvalidParams("txgraph simulate needs --scenario tx@h,tx@h,...");
        auto result = txgraph::simulate_confirmation(graph, parse_scenario(scenario_text));
        for (const auto& o : result.unspent)
            out.add({{"record", "ownership"},
                     {"tx", txgraph::to_string(o.ref.tx)},
                     {"output", o.ref.index},
                     {"label", o.label},
                     {"amount_sat", o.amount},
                     {"controller", o.controller ? txgraph::to_string(*o.controller) : "contested"}});
        out.add({{"record", "deposit"}, {"state", txgraph::to_string(result.deposit)}});
        out.add({{"record", "note"},
                 {"text", "total fees: " + std::to_string(result.total_fees) + " sat"}});
        return kExitOk;
    }
    throw InvalidParams("unknown txgraph action: " + action);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation, equilibrium checking and cost analysis for timelock bribing"
                 " backed by fork threats"};
    app.require_subcommand(1);
    bool json_lines = false;
    app.add_flag("--json-lines", json_lines, "emit one JSON record per line");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo utility estimation");
    std::string sim_params, sim_profile = "bribe-and-fork", sim_trace;
    std::uint64_t sim_trials = 10'000, sim_seed = 1;
    sim->add_option("--params", sim_params, "parameter file")->required();
    sim->add_option("--profile", sim_profile,
                    "bribe-and-fork | all:<name> | comma list of strategies");
    sim->add_option("--trials", sim_trials, "number of independent games");
    sim->add_option("--seed", sim_seed, "master seed");
    sim->add_option("--trace", sim_trace, "write the first game's per-round records here");

    // oracle
    auto* orc = app.add_subcommand("oracle", "hypothesis report and equilibrium check");
    std::string orc_params, orc_profile = "bribe-and-fork";
    double orc_budget = kDefaultOracleBudget;
    bool orc_conditions_only = false;
    orc->add_option("--params", orc_params, "parameter file")->required();
    orc->add_option("--profile", orc_profile, "profile to test for equilibrium");
    orc->add_option("--budget", orc_budget, "max winner sequences to enumerate");
    orc->add_flag("--conditions-only", orc_conditions_only, "skip the equilibrium check");

    // cost
    auto* cost = app.add_subcommand("cost", "closed-form attack cost bounds");
    Sat c_fbar = 10'000, c_f1 = 0, c_f = 0, c_premium = -1, c_B = 625'000'000;
    std::string c_lmin = "0.0001", c_ls, c_lj = "0.02", c_price = "25000";
    int c_T = 110;
    cost->add_option("--f-bar", c_fbar, "average single-transaction fee, sat");
    cost->add_option("--f1", c_f1, "revocation block fee total, sat");
    cost->add_option("--f", c_f, "average block fee total, sat");
    cost->add_option("--f1-minus-f", c_premium, "revocation premium shortcut, sat");
    cost->add_option("--lambda-min", c_lmin, "weakest miner's share (decimal)");
    cost->add_option("--lambda-s", c_ls, "strongest miner's share (decimal)");
    cost->add_option("--lambda-j", c_lj, "mid-size miner's share (decimal)");
    cost->add_option("--timelock", c_T, "dispute period in blocks");
    cost->add_option("--block-reward", c_B, "block subsidy, sat");
    cost->add_option("--price", c_price, "fiat price per BTC");

    // empirics
    auto* emp = app.add_subcommand("empirics", "historical fee and pool-share statistics");
    std::string e_fees, e_pools;
    double e_device = 0, e_network = 0;
    emp->add_option("--fees", e_fees, "weekly fee CSV");
    emp->add_option("--pools", e_pools, "pool block-count CSV");
    emp->add_option("--device-hashrate", e_device, "single-device hashrate, H/s");
    emp->add_option("--network-hashrate", e_network, "network hashrate, H/s");

    // txgraph
    auto* txg = app.add_subcommand("txgraph", "build, validate or replay the attack wiring");
    std::string t_action = "validate", t_graph, t_out, t_scenario;
    Sat t_channel = 10'000'000, t_bribe = 240'000, t_deposit = 142'597'906;
    int t_T = 144, t_m = 3, t_n = 5;
    bool t_collusion = false;
    txg->add_option("action", t_action, "build | validate | simulate");
    txg->add_option("--channel-amount", t_channel, "channel funds, sat");
    txg->add_option("--bribe", t_bribe, "miner-facing bribe output, sat");
    txg->add_option("--deposit", t_deposit, "self-penalty deposit, sat");
    txg->add_option("--timelock", t_T, "dispute period in blocks");
    txg->add_option("--m", t_m, "multisig threshold");
    txg->add_option("--n", t_n, "multisig party count");
    txg->add_flag("--collusion", t_collusion, "model dishonest co-signers");
    txg->add_option("--graph", t_graph, "load a graph JSON instead of building one");
    txg->add_option("--out", t_out, "write the built graph here");
    txg->add_option("--scenario", t_scenario, "confirmations, e.g. funding@0,commitment-old@1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    Output out;
    out.json_lines = json_lines;
    int code = kExitOk;
    try {
        if (sim->parsed()) {
            code = cmd_simulate(sim_params, sim_profile, sim_trials, sim_seed, sim_trace, out);
        } else if (orc->parsed()) {
            code = cmd_oracle(orc_params, orc_profile, orc_budget, orc_conditions_only, out);
        } else if (cost->parsed()) {
            bool ls_defaulted = c_ls.empty();
            if (ls_defaulted) c_ls = "0.2";
            if (c_premium >= 0) {
                if (c_f1 != 0 || c_f != 0)
                    throw InvalidParams("give either --f1-minus-f or --f1/--f, not both");
                c_f = 15'000'000;  // reference average block fee total
                c_f1 = c_f + c_premium;
            }
            code = cmd_cost(c_fbar, c_f1, c_f, c_lmin, c_ls, c_lj, c_T, c_B, c_price,
                            ls_defaulted, out);
        } else if (emp->parsed()) {
            code = cmd_empirics(e_fees, e_pools, e_device, e_network, out);
        } else if (txg->parsed()) {
            code = cmd_txgraph(t_action, t_channel, t_bribe, t_deposit, t_T, t_m, t_n,
                               t_collusion, t_graph, t_out, t_scenario, out);
        }
    } catch (const InstanceTooLarge& e) {
        std::cerr << "instance too large: " << e.what() << "\n";
        return kExitBudget;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SchemaError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidParams& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UnknownStrategy& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    out.flush();
    return code;
}
