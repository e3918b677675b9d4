#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forkgame/errors.hpp"
#include "forkgame/money.hpp"

#include <nlohmann/json.hpp>

namespace forkgame::txgraph {

enum class TxId { Funding, CommitmentOld, Tx1, Tx2, TxB, TxP1, TxP2 };

inline const char* to_string(TxId id) {
    switch (id) {
        case TxId::Funding: return "funding";
        case TxId::CommitmentOld: return "commitment-old";
        case TxId::Tx1: return "tx1";
        case TxId::Tx2: return "tx2";
        case TxId::TxB: return "txb";
        case TxId::TxP1: return "txp1";
        case TxId::TxP2: return "txp2";
    }
    return "?";
}

inline TxId tx_id_from_string(const std::string& s) {
    for (TxId id : {TxId::Funding, TxId::CommitmentOld, TxId::Tx1, TxId::Tx2, TxId::TxB,
                    TxId::TxP1, TxId::TxP2})
        if (s == to_string(id)) return id;
    throw ParseError("unknown transaction id: " + s);
}

enum class Party { P1, P2, Ns, Miner };

inline const char* to_string(Party p) {
    switch (p) {
        case Party::P1: return "p1";
        case Party::P2: return "p2";
        case Party::Ns: return "ns";
        case Party::Miner: return "miner";
    }
    return "?";
}

inline Party party_from_string(const std::string& s) {
    for (Party p : {Party::P1, Party::P2, Party::Ns, Party::Miner})
        if (s == to_string(p)) return p;
    throw ParseError("unknown party: " + s);
}

struct OutputRef {
    TxId tx;
    int index = 0;
    auto operator<=>(const OutputRef&) const = default;
};

// Spending condition tree.
struct Condition {
    enum class Kind { KeyOwner, MultiSig, RelativeTimelock, AnyOf, RequiresConfirmedOutput };
    Kind kind = Kind::KeyOwner;
    Party party = Party::P1;            // KeyOwner, MultiSig must-include
    int m = 0, n = 0;                   // MultiSig
    int timelock = 0;                   // RelativeTimelock: blocks past the creating tx
    std::vector<Condition> children;    // AnyOf branches; [0] is the timelocked inner condition
    std::optional<OutputRef> required_output;  // RequiresConfirmedOutput

    static Condition key(Party p) { return {Kind::KeyOwner, p, 0, 0, 0, {}, {}}; }
    static Condition multisig(int m, int n, Party must_include) {
        return {Kind::MultiSig, must_include, m, n, 0, {}, {}};
    }
    static Condition timelocked(int blocks, Condition then) {
        Condition c{Kind::RelativeTimelock, Party::P1, 0, 0, blocks, {}, {}};
        c.children.push_back(std::move(then));
        return c;
    }
    static Condition any_of(std::vector<Condition> branches) {
        Condition c{Kind::AnyOf, Party::P1, 0, 0, 0, {}, {}};
        c.children = std::move(branches);
        return c;
    }
    static Condition requires_output(OutputRef ref) {
        Condition c{Kind::RequiresConfirmedOutput, Party::P1, 0, 0, 0, {}, {}};
        c.required_output = ref;
        return c;
    }
};

struct Output {
    Sat amount = 0;
    Condition condition;
    std::string label;
};

struct Input {
    std::optional<OutputRef> ref;  // absent: external funds entering the graph
    Sat external_amount = 0;
};

struct TxTemplate {
    TxId id = TxId::Funding;
    std::vector<Input> inputs;
    std::vector<Output> outputs;
    std::vector<Party> signers;     // attestations carried by this transaction
    int cosigner_grants = 0;        // additional multisig co-signatures collected

    Sat total_in(const std::map<OutputRef, Sat>& amounts) const {
        Sat sum = 0;
        for (const Input& in : inputs)
            sum += in.ref ? amounts.at(*in.ref) : in.external_amount;
        return sum;
    }
    Sat total_out() const {
        Sat sum = 0;
        for (const Output& o : outputs) sum += o.amount;
        return sum;
    }
};

struct Graph {
    std::vector<TxTemplate> txs;
    int timelock_T = 0;
    int multisig_m = 0;
    int multisig_n = 0;
    bool assume_honest_cosigners = true;

    const TxTemplate& tx(TxId id) const {
        for (const TxTemplate& t : txs)
            if (t.id == id) return t;
        throw InvalidParams(std::string("graph lacks transaction ") + to_string(id));
    }
    bool has(TxId id) const {
        return std::any_of(txs.begin(), txs.end(),
                           [id](const TxTemplate& t) { return t.id == id; });
    }
    std::map<OutputRef, Sat> output_amounts() const {
        std::map<OutputRef, Sat> out;
        for (const TxTemplate& t : txs)
            for (int i = 0; i < static_cast<int>(t.outputs.size()); ++i)
                out[{t.id, i}] = t.outputs[i].amount;
        return out;
    }
};

// The full wiring: channel funding and old commitment, the conflicting
// revocation/timelocked spends, the bribe split, and the self-penalty pair.
// With dishonest cosigners the reclaim no longer consumes the bribe marker,
// which is exactly the failure mode the honest-majority assumption rules out.
inline Graph build_attack_graph(Sat channel_amount, Sat bribe_fee, Sat deposit, int T, int m,
                                int n, bool assume_honest_cosigners = true) {
    if (channel_amount <= 0 || bribe_fee <= 0 || deposit <= 0)
        throw InvalidParams("amounts must be positive");
    if (m < 1 || m > n) throw InvalidParams("multisig threshold must satisfy 1 <= m <= n");
    if (T < 1) throw InvalidParams("timelock must be positive");
    if (bribe_fee + 1 > channel_amount)
        throw InvalidParams("bribe and marker output exceed the channel amount");

    Graph g;
    g.timelock_T = T;
    g.multisig_m = m;
    g.multisig_n = n;
    g.assume_honest_cosigners = assume_honest_cosigners;

    TxTemplate funding;
    funding.id = TxId::Funding;
    funding.inputs.push_back({std::nullopt, channel_amount});
    funding.outputs.push_back({channel_amount, Condition::multisig(2, 2, Party::P1), "channel"});
    funding.signers = {Party::P1, Party::P2};
    funding.cosigner_grants = 1;  // the channel peer
    g.txs.push_back(std::move(funding));

    TxTemplate commitment;
    commitment.id = TxId::CommitmentOld;
    commitment.inputs.push_back({OutputRef{TxId::Funding, 0}, 0});
    commitment.outputs.push_back(
        {channel_amount,
         Condition::any_of({Condition::key(Party::P1),
                            Condition::timelocked(T, Condition::key(Party::P2))}),
         "txo"});
    commitment.signers = {Party::P1, Party::P2};
    commitment.cosigner_grants = 1;
    g.txs.push_back(std::move(commitment));

    TxTemplate tx1;
    tx1.id = TxId::Tx1;
    tx1.inputs.push_back({OutputRef{TxId::CommitmentOld, 0}, 0});
    tx1.outputs.push_back({channel_amount, Condition::key(Party::P1), "revoked-funds"});
    tx1.signers = {Party::P1};
    g.txs.push_back(std::move(tx1));

    TxTemplate tx2;
    tx2.id = TxId::Tx2;
    tx2.inputs.push_back({OutputRef{TxId::CommitmentOld, 0}, 0});
    tx2.outputs.push_back({channel_amount, Condition::key(Party::P2), "old-state-funds"});
    tx2.signers = {Party::P2};
    g.txs.push_back(std::move(tx2));

    TxTemplate txb;
    txb.id = TxId::TxB;
    txb.inputs.push_back({OutputRef{TxId::Tx2, 0}, 0});
    txb.outputs.push_back({bribe_fee, Condition::key(Party::Miner), "bribe"});
    txb.outputs.push_back({1, Condition::key(Party::Ns), "dummy"});
    txb.outputs.push_back({channel_amount - bribe_fee - 1, Condition::key(Party::P2), "change"});
    txb.signers = {Party::P2};
    g.txs.push_back(std::move(txb));

    TxTemplate txp1;
    txp1.id = TxId::TxP1;
    txp1.inputs.push_back({std::nullopt, deposit});
    txp1.outputs.push_back({deposit, Condition::multisig(m, n, Party::Ns), "deposit"});
    txp1.signers = {Party::Ns};
    g.txs.push_back(std::move(txp1));

    TxTemplate txp2;
    txp2.id = TxId::TxP2;
    txp2.inputs.push_back({OutputRef{TxId::TxP1, 0}, 0});
    if (assume_honest_cosigners)
        txp2.inputs.push_back({OutputRef{TxId::TxB, 1}, 0});
    txp2.outputs.push_back(
        {deposit + (assume_honest_cosigners ? 1 : 0), Condition::key(Party::Ns), "reclaimed"});
    txp2.signers = {Party::Ns};
    txp2.cosigner_grants = m - 1;
    g.txs.push_back(std::move(txp2));
    return g;
}

struct Confirmation {
    TxId tx;
    int height = 0;
};

using LedgerScenario = std::vector<Confirmation>;

enum class DepositOutcome { NotPosted, LockedLost, Reclaimed };

inline const char* to_string(DepositOutcome d) {
    switch (d) {
        case DepositOutcome::NotPosted: return "not-posted";
        case DepositOutcome::LockedLost: return "locked-lost";
        case DepositOutcome::Reclaimed: return "reclaimed";
    }
    return "?";
}

struct UnspentOutput {
    OutputRef ref;
    Sat amount = 0;
    std::optional<Party> controller;  // absent while multiple branches could claim it
    std::string label;
};

struct SimulationResult {
    std::vector<UnspentOutput> unspent;
    DepositOutcome deposit = DepositOutcome::NotPosted;
    Sat total_fees = 0;
    std::map<TxId, int> confirm_height;
};

namespace detail {

inline bool has_signer(const TxTemplate& tx, Party p) {
    return std::find(tx.signers.begin(), tx.signers.end(), p) != tx.signers.end();
}

inline bool condition_satisfied(const Condition& c, const TxTemplate& spender, int height,
                                int parent_height, const std::map<TxId, int>& confirmed,
                                std::string* why_not) {
    switch (c.kind) {
        case Condition::Kind::KeyOwner:
            if (has_signer(spender, c.party)) return true;
            if (why_not) *why_not = std::string("missing signature of ") + to_string(c.party);
            return false;
        case Condition::Kind::MultiSig: {
            if (!has_signer(spender, c.party)) {
                if (why_not)
                    *why_not = std::string("multisig must include ") + to_string(c.party);
                return false;
            }
            int sigs = 1 + spender.cosigner_grants;
            if (sigs >= c.m) return true;
            if (why_not)
                *why_not = "multisig has " + std::to_string(sigs) + " of " + std::to_string(c.m) +
                           " required signatures";
            return false;
        }
        case Condition::Kind::RelativeTimelock: {
            if (height < parent_height + c.timelock) {
                if (why_not)
                    *why_not = "timelock: spend at height " + std::to_string(height) +
                               " before " + std::to_string(parent_height + c.timelock);
                return false;
            }
            return condition_satisfied(c.children.at(0), spender, height, parent_height,
                                       confirmed, why_not);
        }
        case Condition::Kind::AnyOf: {
            std::string last;
            for (const Condition& b : c.children)
                if (condition_satisfied(b, spender, height, parent_height, confirmed, &last))
                    return true;
            if (why_not) *why_not = "no branch satisfied (" + last + ")";
            return false;
        }
        case Condition::Kind::RequiresConfirmedOutput: {
            auto it = confirmed.find(c.required_output->tx);
            if (it != confirmed.end() && it->second <= height) return true;
            if (why_not)
                *why_not = std::string("requires confirmed ") + to_string(c.required_output->tx);
            return false;
        }
    }
    return false;
}

inline std::optional<Party> controller_of(const Condition& c) {
    switch (c.kind) {
        case Condition::Kind::KeyOwner: return c.party;
        case Condition::Kind::MultiSig: return c.party;
        case Condition::Kind::RelativeTimelock: return controller_of(c.children.at(0));
        case Condition::Kind::AnyOf: return std::nullopt;  // still contested
        case Condition::Kind::RequiresConfirmedOutput: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace detail

// Replays a confirmation sequence, enforcing spend conditions, conflicts and
// the extra reclaim gate, and reports who ends up controlling the coins.
inline SimulationResult simulate_confirmation(const Graph& graph, const LedgerScenario& scenario) {
    std::map<TxId, int> confirmed;                 // tx -> height
    std::map<OutputRef, TxId> spent_by;
    const auto amounts = graph.output_amounts();

    int last_height = INT32_MIN;
    for (const Confirmation& step : scenario) {
        if (!graph.has(step.tx))
            throw ConditionViolation(std::string("scenario references unknown tx ") +
                                     to_string(step.tx));
        if (confirmed.count(step.tx))
            throw ConflictViolation(std::string(to_string(step.tx)) + " confirmed twice");
        if (step.height < last_height)
            throw ConditionViolation("confirmation heights must be non-decreasing");
        last_height = std::max(last_height, step.height);

        const TxTemplate& tx = graph.tx(step.tx);
        for (const Input& in : tx.inputs) {
            if (!in.ref) continue;
            auto parent = confirmed.find(in.ref->tx);
            if (parent == confirmed.end())
                throw ConditionViolation(std::string(to_string(step.tx)) + " spends output of " +
                                         to_string(in.ref->tx) + " which is not confirmed");
            if (auto sp = spent_by.find(*in.ref); sp != spent_by.end())
                throw ConflictViolation(std::string(to_string(step.tx)) + " double-spends " +
                                        to_string(in.ref->tx) + "[" +
                                        std::to_string(in.ref->index) + "] already spent by " +
                                        to_string(sp->second));
            const TxTemplate& parent_tx = graph.tx(in.ref->tx);
            const Condition& cond = parent_tx.outputs.at(in.ref->index).condition;
            std::string why;
            if (!detail::condition_satisfied(cond, tx, step.height, parent->second, confirmed,
                                             &why))
                throw ConditionViolation(std::string(to_string(step.tx)) + " cannot spend " +
                                         to_string(in.ref->tx) + "[" +
                                         std::to_string(in.ref->index) + "]: " + why);
        }
        for (const Input& in : tx.inputs)
            if (in.ref) spent_by[*in.ref] = step.tx;
        confirmed[step.tx] = step.height;
    }

    SimulationResult result;
    result.confirm_height = confirmed;
    for (const auto& [id, h] : confirmed) {
        const TxTemplate& tx = graph.tx(id);
        result.total_fees += tx.total_in(amounts) - tx.total_out();
        for (int i = 0; i < static_cast<int>(tx.outputs.size()); ++i) {
            OutputRef ref{id, i};
            if (spent_by.count(ref)) continue;
            result.unspent.push_back({ref, tx.outputs[i].amount,
                                      detail::controller_of(tx.outputs[i].condition),
                                      tx.outputs[i].label});
        }
    }
    if (confirmed.count(TxId::TxP1))
        result.deposit = confirmed.count(TxId::TxP2) ? DepositOutcome::Reclaimed
                                                     : DepositOutcome::LockedLost;
    return result;
}

struct GraphCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<GraphCheck> checks;
    bool all_pass = true;

    void add(std::string name, bool pass, std::string detail = "") {
        all_pass = all_pass && pass;
        checks.push_back({std::move(name), pass, std::move(detail)});
    }
};

inline ValidationReport validate_graph(const Graph& g) {
    ValidationReport report;

    bool conflict = false;
    if (g.has(TxId::Tx1) && g.has(TxId::Tx2))
        for (const Input& a : g.tx(TxId::Tx1).inputs)
            for (const Input& b : g.tx(TxId::Tx2).inputs)
                if (a.ref && b.ref && *a.ref == *b.ref) conflict = true;
    report.add("conflict-pair", conflict,
               conflict ? "tx1 and tx2 spend the same output"
                        : "tx1 and tx2 do not conflict; the dispute mechanism is void");

    bool timelocked = false;
    if (g.has(TxId::Tx2) && g.has(TxId::CommitmentOld)) {
        // The timelocked party must be unable to spend immediately.
        const TxTemplate& tx2 = g.tx(TxId::Tx2);
        for (const Input& in : tx2.inputs) {
            if (!in.ref || in.ref->tx != TxId::CommitmentOld) continue;
            const Condition& cond = g.tx(TxId::CommitmentOld).outputs.at(in.ref->index).condition;
            std::string why;
            timelocked = !detail::condition_satisfied(cond, tx2, 1, 0, {}, &why);
        }
    }
    report.add("timelock-on-cond2", timelocked,
               timelocked ? "tx2 cannot spend before the dispute period ends"
                          : "cond2 must be encumbered with a timelock");

    bool gated = false;
    if (g.has(TxId::TxP2) && g.has(TxId::TxB))
        for (const Input& in : g.tx(TxId::TxP2).inputs)
            if (in.ref && in.ref->tx == TxId::TxB) gated = true;
    report.add("reclaim-gated-on-bribe", gated,
               gated ? "txp2 consumes a txb output" : "deposit reclaimable without bribe confirmation");

    bool deposit_guarded = false;
    if (g.has(TxId::TxP1)) {
        const TxTemplate& p1 = g.tx(TxId::TxP1);
        for (const Output& o : p1.outputs)
            if (o.condition.kind == Condition::Kind::MultiSig && o.condition.party == Party::Ns &&
                o.condition.m >= 1 && o.condition.m <= o.condition.n)
                deposit_guarded = true;
    }
    report.add("deposit-multisig", deposit_guarded,
               deposit_guarded ? "deposit spendable only via the multisig including the threatener"
                               : "deposit output is not an m-of-n multisig including the threatener");

    bool conserved = true;
    const auto amounts = g.output_amounts();
    for (const TxTemplate& t : g.txs)
        if (t.total_in(amounts) < t.total_out()) conserved = false;
    report.add("value-conservation", conserved,
               conserved ? "every transaction's inputs cover its outputs"
                         : "a transaction creates more value than it consumes");

    bool bribe_shape = g.has(TxId::TxB) && g.tx(TxId::TxB).outputs.size() == 3;
    report.add("bribe-three-way-split", bribe_shape,
               bribe_shape ? "bribe splits into miner claim, marker and change"
                           : "bribe transaction must have exactly three outputs");

    report.add("honest-cosigners", g.assume_honest_cosigners,
               g.assume_honest_cosigners
                   ? "no m-1 coalition assumed"
                   : "collusion mode: the reclaim skips the bribe marker");
    return report;
}

// Every confirmation sequence reachable from the empty ledger: each step
// confirms one more transaction either right away or at the earliest height
// its timelock admits. Used by the exhaustive property checks.
inline std::vector<LedgerScenario> enumerate_scenarios(const Graph& graph) {
    std::vector<LedgerScenario> out;
    std::vector<TxId> ids;
    for (const TxTemplate& t : graph.txs) ids.push_back(t.id);

    struct Frame {
        LedgerScenario scenario;
        int height = 0;
    };
    std::vector<Frame> stack{{{}, 0}};
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (!f.scenario.empty()) out.push_back(f.scenario);
        for (TxId id : ids) {
            bool already = std::any_of(f.scenario.begin(), f.scenario.end(),
                                       [id](const Confirmation& c) { return c.tx == id; });
            if (already) continue;
            for (int dh : {1, graph.timelock_T + 1}) {
                LedgerScenario next = f.scenario;
                next.push_back({id, f.height + dh});
                try {
                    simulate_confirmation(graph, next);
                } catch (const ConflictViolation&) {
                    continue;
                } catch (const ConditionViolation&) {
                    continue;
                }
                stack.push_back({std::move(next), f.height + dh});
                if (dh == 1) break;  // already valid eagerly; the delayed copy adds nothing
            }
        }
    }
    return out;
}

// -- stable JSON schema -------------------------------------------------------

inline nlohmann::json to_json(const Condition& c) {
    using nlohmann::json;
    switch (c.kind) {
        case Condition::Kind::KeyOwner:
            return {{"type", "key"}, {"party", to_string(c.party)}};
        case Condition::Kind::MultiSig:
            return {{"type", "multisig"}, {"m", c.m}, {"n", c.n},
                    {"must_include", to_string(c.party)}};
        case Condition::Kind::RelativeTimelock:
            return {{"type", "timelock"}, {"blocks", c.timelock},
                    {"then", to_json(c.children.at(0))}};
        case Condition::Kind::AnyOf: {
            json branches = json::array();
            for (const Condition& b : c.children) branches.push_back(to_json(b));
            return {{"type", "any"}, {"branches", branches}};
        }
        case Condition::Kind::RequiresConfirmedOutput:
            return {{"type", "requires-output"}, {"tx", to_string(c.required_output->tx)},
                    {"output", c.required_output->index}};
    }
    return {};
}

inline Condition condition_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type");
    if (type == "key") return Condition::key(party_from_string(j.at("party")));
    if (type == "multisig")
        return Condition::multisig(j.at("m"), j.at("n"), party_from_string(j.at("must_include")));
    if (type == "timelock")
        return Condition::timelocked(j.at("blocks"), condition_from_json(j.at("then")));
    if (type == "any") {
        std::vector<Condition> branches;
        for (const auto& b : j.at("branches")) branches.push_back(condition_from_json(b));
        return Condition::any_of(std::move(branches));
    }
    if (type == "requires-output")
        return Condition::requires_output({tx_id_from_string(j.at("tx")), j.at("output")});
    throw ParseError("unknown condition type: " + type);
}

inline nlohmann::json to_json(const Graph& g) {
    using nlohmann::json;
    json txs = json::array();
    for (const TxTemplate& t : g.txs) {
        json inputs = json::array();
        for (const Input& in : t.inputs) {
            if (in.ref)
                inputs.push_back({{"tx", to_string(in.ref->tx)}, {"output", in.ref->index}});
            else
                inputs.push_back({{"external_sat", in.external_amount}});
        }
        json outputs = json::array();
        for (const Output& o : t.outputs)
            outputs.push_back(
                {{"amount_sat", o.amount}, {"label", o.label}, {"condition", to_json(o.condition)}});
        json signers = json::array();
        for (Party p : t.signers) signers.push_back(to_string(p));
        txs.push_back({{"id", to_string(t.id)},
                       {"inputs", inputs},
                       {"outputs", outputs},
                       {"signers", signers},
                       {"cosigner_grants", t.cosigner_grants}});
    }
    return {{"timelock", g.timelock_T},
            {"multisig_m", g.multisig_m},
            {"multisig_n", g.multisig_n},
            {"honest_cosigners", g.assume_honest_cosigners},
            {"transactions", txs}};
}

inline Graph graph_from_json(const nlohmann::json& j) {
    Graph g;
    g.timelock_T = j.at("timelock");
    g.multisig_m = j.at("multisig_m");
    g.multisig_n = j.at("multisig_n");
    g.assume_honest_cosigners = j.at("honest_cosigners");
    for (const auto& jt : j.at("transactions")) {
        TxTemplate t;
        t.id = tx_id_from_string(jt.at("id"));
        for (const auto& ji : jt.at("inputs")) {
            if (ji.contains("external_sat"))
                t.inputs.push_back({std::nullopt, ji.at("external_sat").get<Sat>()});
            else
                t.inputs.push_back(
                    {OutputRef{tx_id_from_string(ji.at("tx")), ji.at("output")}, 0});
        }
        for (const auto& jo : jt.at("outputs"))
            t.outputs.push_back({jo.at("amount_sat").get<Sat>(),
                                 condition_from_json(jo.at("condition")), jo.at("label")});
        for (const auto& js : jt.at("signers")) t.signers.push_back(party_from_string(js));
        t.cosigner_grants = jt.at("cosigner_grants");
        g.txs.push_back(std::move(t));
    }
    return g;
}

}  // namespace forkgame::txgraph
