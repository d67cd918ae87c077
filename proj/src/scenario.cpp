// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "parp/scenario.hpp"

#include <fstream>
#include <memory>
#include <set>
#include <sstream>

namespace parp {

using nlohmann::json;

namespace {

Result<Misbehavior, std::string> parse_behavior_kind(const std::string& kind) {
    if (kind == "honest" || kind == "none") return Misbehavior::None;
    if (kind == "wrong_amount") return Misbehavior::WrongAmount;
    if (kind == "stale_height") return Misbehavior::StaleHeight;
    if (kind == "bogus_proof") return Misbehavior::BogusProof;
    if (kind == "bad_response_sig") return Misbehavior::BadResponseSig;
    if (kind == "wrong_channel_id") return Misbehavior::WrongChannelId;
    if (kind == "wrong_request_hash") return Misbehavior::WrongRequestHash;
    if (kind == "unresponsive") return Misbehavior::Unresponsive;
    if (kind == "stale_state_close") return Misbehavior::StaleStateClose;
    return std::string("unknown behavior kind: " + kind);
}

const std::set<std::string> kKnownOps = {"handshake", "call", "close", "node_close", "spam"};
const std::set<std::string> kKnownMethods = {"get_balance", "send_transaction",
                                             "get_channel_status"};

}  // namespace

Result<Scenario, std::string> parse_scenario(const json& doc) {
    Scenario s;
    try {
        s.name = doc.value("name", "unnamed");
        s.seed = doc.value("seed", uint64_t{1});
        s.horizon = doc.value("horizon", uint64_t{600});
        s.block_interval = doc.value("block_interval", uint64_t{10});
        if (doc.contains("delay")) {
            s.delay_min = doc["delay"].value("min", uint64_t{1});
            s.delay_max = doc["delay"].value("max", uint64_t{3});
        }
        if (doc.contains("params")) {
            const auto& p = doc["params"];
            s.params.dispute_window = p.value("dispute_window", s.params.dispute_window);
            s.params.min_deposit = p.value("min_deposit", s.params.min_deposit);
            s.params.hash_window = p.value("hash_window", s.params.hash_window);
        }
        const auto& actors = doc.at("actors");
        s.witness_balance = actors.value("witness", json::object()).value("balance", uint64_t{100});
        for (const auto& c : actors.value("clients", json::array())) {
            ScenarioClient sc;
            sc.name = c.at("name").get<std::string>();
            sc.balance = c.value("balance", sc.balance);
            sc.budget = c.value("budget", sc.budget);
            sc.probe_every = c.value("probe_every", sc.probe_every);
            sc.hs_timeout = c.value("hs_timeout", sc.hs_timeout);
            sc.response_timeout = c.value("response_timeout", sc.response_timeout);
            s.clients.push_back(std::move(sc));
        }
        for (const auto& n : actors.value("nodes", json::array())) {
            ScenarioNode sn;
            sn.name = n.at("name").get<std::string>();
            sn.balance = n.value("balance", sn.balance);
            sn.deposit = n.value("deposit", sn.deposit);
            sn.consent_ttl = n.value("consent_ttl", sn.consent_ttl);
            if (n.contains("fees")) {
                const auto& f = n["fees"];
                sn.fees.get_balance = f.value("get_balance", sn.fees.get_balance);
                sn.fees.send_transaction = f.value("send_transaction", sn.fees.send_transaction);
                sn.fees.get_channel_status =
                    f.value("get_channel_status", sn.fees.get_channel_status);
            }
            if (n.contains("behavior")) {
                auto kind = parse_behavior_kind(n["behavior"].value("kind", "honest"));
                if (!kind.ok()) return kind.error();
                sn.policy.kind = kind.value();
                sn.policy.param = n["behavior"].value("param", uint64_t{0});
            }
            s.nodes.push_back(std::move(sn));
        }
        if (s.clients.empty() && s.nodes.empty()) return std::string("scenario has no actors");

        std::set<std::string> names;
        for (const auto& c : s.clients) names.insert(c.name);
        for (const auto& n : s.nodes) names.insert(n.name);
        if (names.size() != s.clients.size() + s.nodes.size())
            return std::string("duplicate actor names");

        for (const auto& a : doc.value("script", json::array())) {
            ScriptAction act;
            act.op = a.at("do").get<std::string>();
            if (kKnownOps.count(act.op) == 0) return std::string("unknown op: " + act.op);
            act.at = a.value("at", uint64_t{0});
            act.every = a.value("every", uint64_t{0});
            act.until = a.value("until", uint64_t{0});
            if (act.every > 0 && !a.contains("at")) act.at = a.value("from", uint64_t{0});
            act.client = a.value("client", "");
            act.node = a.value("node", "");
            act.method = a.value("method", "");
            act.of = a.value("of", "");
            act.bytes = a.value("bytes", uint64_t{100});
            act.count = a.value("count", uint64_t{1});
            if (act.op == "handshake" || act.op == "call" || act.op == "close") {
                if (names.count(act.client) == 0)
                    return std::string("script references unknown client: " + act.client);
            }
            if (act.op == "handshake" || act.op == "node_close") {
                if (names.count(act.node) == 0)
                    return std::string("script references unknown node: " + act.node);
            }
            if (act.op == "call" && kKnownMethods.count(act.method) == 0)
                return std::string("unknown method: " + act.method);
            if (!act.of.empty() && names.count(act.of) == 0)
                return std::string("script references unknown account: " + act.of);
            s.script.push_back(std::move(act));
        }
        s.expect = doc.value("expect", json::object());
    } catch (const json::exception& e) {
        return std::string(e.what());
    }
    return s;
}

Result<Scenario, std::string> load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::string("cannot open scenario file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        return std::string(std::string("invalid scenario JSON: ") + e.what());
    }
    return parse_scenario(doc);
}

namespace {

struct Expectations {
    std::vector<std::string> failures;

    void fail(const std::string& what) { failures.push_back(what); }

    template <typename T>
    void want_eq(const std::string& where, const T& want, const T& got) {
        if (want != got) {
            std::ostringstream os;
            os << where << ": want " << want << ", got " << got;
            fail(os.str());
        }
    }

    void want_min(const std::string& where, uint64_t min, uint64_t got) {
        if (got < min) {
            std::ostringstream os;
            os << where << ": want at least " << min << ", got " << got;
            fail(os.str());
        }
    }
};

}  // namespace

RunOutcome run_scenario(const Scenario& scenario, const Overrides& overrides, TraceSink sink) {
    Scenario sc = scenario;
    if (overrides.seed) sc.seed = *overrides.seed;
    if (overrides.horizon) sc.horizon = *overrides.horizon;
    if (overrides.dispute_window) sc.params.dispute_window = *overrides.dispute_window;
    if (overrides.block_interval) sc.block_interval = *overrides.block_interval;

    // Actor keys are derived from fixed streams, independent of the seed,
    // so different-seed runs of one scenario stay comparable.
    Keypair witness_keys = [] {
        Rng r(3000);
        return keygen(r);
    }();
    std::vector<Keypair> client_keys;
    for (size_t i = 0; i < sc.clients.size(); ++i) {
        Rng r(1000 + i);
        client_keys.push_back(keygen(r));
    }
    std::vector<Keypair> node_keys;
    for (size_t i = 0; i < sc.nodes.size(); ++i) {
        Rng r(2000 + i);
        node_keys.push_back(keygen(r));
    }

    std::map<Address, uint64_t> genesis;
    genesis[witness_keys.addr] = sc.witness_balance;
    for (size_t i = 0; i < sc.clients.size(); ++i)
        genesis[client_keys[i].addr] = sc.clients[i].balance;
    for (size_t i = 0; i < sc.nodes.size(); ++i) genesis[node_keys[i].addr] = sc.nodes[i].balance;

    Chain chain(sc.params, genesis, 0);
    Witness witness(witness_keys, &chain);

    std::map<std::string, Address> address_of;
    address_of["witness"] = witness_keys.addr;
    std::vector<std::unique_ptr<FullNode>> nodes;
    std::map<std::string, FullNode*> node_by_name;
    for (size_t i = 0; i < sc.nodes.size(); ++i) {
        NodeConfig cfg{node_keys[i], sc.nodes[i].deposit, sc.nodes[i].consent_ttl,
                       sc.nodes[i].fees, sc.nodes[i].policy};
        nodes.push_back(std::make_unique<FullNode>(cfg, &chain));
        node_by_name[sc.nodes[i].name] = nodes.back().get();
        address_of[sc.nodes[i].name] = node_keys[i].addr;
    }
    std::vector<std::unique_ptr<LightClient>> clients;
    std::map<std::string, LightClient*> client_by_name;
    for (size_t i = 0; i < sc.clients.size(); ++i) {
        ClientConfig cfg{client_keys[i],          sc.clients[i].budget,
                         witness_keys.addr,       sc.clients[i].hs_timeout,
                         sc.clients[i].response_timeout, sc.clients[i].probe_every};
        clients.push_back(std::make_unique<LightClient>(cfg, &chain));
        client_by_name[sc.clients[i].name] = clients.back().get();
        address_of[sc.clients[i].name] = client_keys[i].addr;
    }

    SimNet net(NetConfig{sc.seed, sc.block_interval, sc.delay_min, sc.delay_max}, &chain, sink);
    for (auto& c : clients) net.add_client(c.get());
    for (auto& n : nodes) net.add_node(n.get());
    net.add_witness(&witness);
    for (auto& n : nodes) n->register_deposit();

    Rng payload_rng(sc.seed ^ 0xfeedULL);
    auto payload = [&payload_rng](uint64_t size) {
        Bytes raw(size);
        for (auto& b : raw) b = static_cast<uint8_t>(payload_rng());
        return raw;
    };

    auto hook = [&](uint64_t t) {
        for (const auto& act : sc.script) {
            bool due = act.every == 0
                           ? t == act.at
                           : t >= act.at && (act.until == 0 || t <= act.until) &&
                                 (t - act.at) % act.every == 0;
            if (!due) continue;
            if (act.op == "handshake") {
                client_by_name[act.client]->start_session(address_of[act.node], t);
            } else if (act.op == "call") {
                LightClient* c = client_by_name[act.client];
                if (c->phase() != ClientPhase::Bonded || c->busy()) continue;
                RpcCall call;
                if (act.method == "get_balance") {
                    const std::string& who = act.of.empty() ? act.client : act.of;
                    call = GetBalanceCall{address_of[who]};
                } else if (act.method == "send_transaction") {
                    call = SendTransactionCall{payload(act.bytes)};
                } else {
                    call = GetChannelStatusCall{c->alpha()};
                }
                c->call(std::move(call), t);
            } else if (act.op == "close") {
                client_by_name[act.client]->close_channel();
            } else if (act.op == "node_close") {
                node_by_name[act.node]->close_all();
            } else if (act.op == "spam") {
                for (uint64_t i = 0; i < act.count; ++i)
                    chain.submit({witness_keys.addr, UserTx{payload(act.bytes)}});
            }
        }
    };

    net.run(sc.horizon, hook);

    // Post-run chain sweep for tallies the actors do not track themselves.
    std::map<std::string, uint64_t> tx_results;
    uint64_t fraud_accepted = 0;
    uint64_t fraud_rejected = 0;
    uint64_t settlements = 0;
    uint64_t slash_count = 0;
    std::set<Address> slashed_nodes;
    for (uint64_t h = 0; h <= chain.height(); ++h) {
        const Block& blk = chain.block_at(h);
        settlements += blk.settlements.size();
        slash_count += blk.slashes.size();
        for (const auto& sl : blk.slashes) slashed_nodes.insert(sl.fn);
        for (const auto& rec : blk.txs) {
            tx_results[to_string(rec.result)]++;
            if (std::holds_alternative<SubmitFraudProofTx>(rec.tx.payload)) {
                if (rec.result == TxResult::Accepted)
                    fraud_accepted++;
                else
                    fraud_rejected++;
            }
        }
    }
    uint64_t channels_closed = 0;
    for (const auto& [alpha, chan] : chain.channels())
        if (chan.status == ChannelStatus::Closed) channels_closed++;

    std::map<std::string, uint64_t> verdict_totals;
    for (auto& c : clients)
        for (const auto& v : c->verdicts()) verdict_totals[to_string(v.verdict)]++;

    json summary;
    summary["type"] = "summary";
    summary["scenario"] = sc.name;
    summary["seed"] = sc.seed;
    summary["horizon"] = sc.horizon;
    summary["height"] = chain.height();
    summary["treasury"] = chain.treasury();
    summary["conservation"] = net.conservation_held();
    summary["reference_targets"] = {{"request_bytes", 226},
                                    {"response_bytes", 187},
                                    {"proof_bytes_200tx", 1150},
                                    {"hash_window", 256}};
    summary["chain"] = {{"settlements", settlements},
                        {"slashes", slash_count},
                        {"fraud_accepted", fraud_accepted},
                        {"fraud_rejected", fraud_rejected},
                        {"channels_closed", channels_closed},
                        {"tx_results", tx_results}};
    summary["verdicts"] = verdict_totals;
    summary["witness"] = {{"submitted", witness.submitted()},
                          {"balance", chain.balance(witness_keys.addr)}};
    for (size_t i = 0; i < sc.clients.size(); ++i) {
        const auto& st = clients[i]->stats();
        summary["clients"][sc.clients[i].name] = {
            {"phase", to_string(clients[i]->phase())},
            {"requests_sent", st.requests_sent},
            {"retries", st.retries},
            {"timeouts", st.timeouts},
            {"valid", st.valid},
            {"invalid", st.invalid},
            {"fraud", st.fraud},
            {"probes", st.probes},
            {"probe_mismatches", st.probe_mismatches},
            {"defenses", st.defenses},
            {"fraud_proofs_sent", st.fraud_proofs_sent},
            {"settled", st.settled},
            {"refund", st.settled_refund},
            {"balance", chain.balance(address_of[sc.clients[i].name])}};
    }
    for (size_t i = 0; i < sc.nodes.size(); ++i) {
        summary["nodes"][sc.nodes[i].name] = {
            {"served", nodes[i]->served()},
            {"rejected", nodes[i]->rejected()},
            {"deposit", chain.deposit(address_of[sc.nodes[i].name])},
            {"balance", chain.balance(address_of[sc.nodes[i].name])},
            {"slashed", slashed_nodes.count(address_of[sc.nodes[i].name]) > 0}};
    }
    if (sink) sink(summary);

    // Expectation sweep.
    Expectations ex;
    for (const auto& [key, value] : sc.expect.items()) {
        if (key == "conservation") {
            ex.want_eq("expect.conservation", value.get<bool>(), net.conservation_held());
        } else if (key == "clients") {
            for (const auto& [name, checks] : value.items()) {
                if (client_by_name.count(name) == 0) {
                    ex.fail("expect.clients: unknown client " + name);
                    continue;
                }
                const json& got = summary["clients"][name];
                for (const auto& [ck, cv] : checks.items()) {
                    std::string where = "expect.clients." + name + "." + ck;
                    if (ck == "phase")
                        ex.want_eq(where, cv.get<std::string>(), got["phase"].get<std::string>());
                    else if (ck == "settled")
                        ex.want_eq(where, cv.get<bool>(), got["settled"].get<bool>());
                    else if (ck.size() > 4 && ck.substr(ck.size() - 4) == "_min")
                        ex.want_min(where, cv.get<uint64_t>(),
                                    got[ck.substr(0, ck.size() - 4)].get<uint64_t>());
                    else if (got.contains(ck))
                        ex.want_eq(where, cv.get<uint64_t>(), got[ck].get<uint64_t>());
                    else
                        ex.fail(where + ": unknown expectation key");
                }
            }
        } else if (key == "nodes") {
            for (const auto& [name, checks] : value.items()) {
                if (node_by_name.count(name) == 0) {
                    ex.fail("expect.nodes: unknown node " + name);
                    continue;
                }
                const json& got = summary["nodes"][name];
                for (const auto& [ck, cv] : checks.items()) {
                    std::string where = "expect.nodes." + name + "." + ck;
                    if (ck == "slashed")
                        ex.want_eq(where, cv.get<bool>(), got["slashed"].get<bool>());
                    else if (ck.size() > 4 && ck.substr(ck.size() - 4) == "_min")
                        ex.want_min(where, cv.get<uint64_t>(),
                                    got[ck.substr(0, ck.size() - 4)].get<uint64_t>());
                    else if (got.contains(ck))
                        ex.want_eq(where, cv.get<uint64_t>(), got[ck].get<uint64_t>());
                    else
                        ex.fail(where + ": unknown expectation key");
                }
            }
        } else if (key == "chain") {
            const json& got = summary["chain"];
            for (const auto& [ck, cv] : value.items()) {
                std::string where = "expect.chain." + ck;
                if (ck == "treasury")
                    ex.want_eq(where, cv.get<uint64_t>(), chain.treasury());
                else if (ck == "height_min")
                    ex.want_min(where, cv.get<uint64_t>(), chain.height());
                else if (ck.size() > 4 && ck.substr(ck.size() - 4) == "_min")
                    ex.want_min(where, cv.get<uint64_t>(),
                                got[ck.substr(0, ck.size() - 4)].get<uint64_t>());
                else if (got.contains(ck))
                    ex.want_eq(where, cv.get<uint64_t>(), got[ck].get<uint64_t>());
                else
                    ex.fail(where + ": unknown expectation key");
            }
        } else if (key == "verdicts") {
            for (const auto& [vk, vv] : value.items()) {
                uint64_t got = verdict_totals.count(vk) ? verdict_totals[vk] : 0;
                ex.want_eq("expect.verdicts." + vk, vv.get<uint64_t>(), got);
            }
        } else {
            ex.fail("unknown expectation section: " + key);
        }
    }

    RunOutcome outcome;
    outcome.failures = std::move(ex.failures);
    outcome.ok = outcome.failures.empty();
    outcome.summary = std::move(summary);
    return outcome;
}

}  // namespace parp
