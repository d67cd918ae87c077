// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic discrete-tick network. Messages between actors are queued
// with a seeded, bounded delay and delivered in FIFO order per directed
// link; blocks are produced on a fixed tick cadence and broadcast to every
// actor. Identical seeds and scripts yield byte-identical traces.

#pragma once

#include <functional>
#include <queue>
#include <vector>

#include <json.hpp>

#include "parp/lightclient.hpp"

namespace parp {

// Relays adjudicable misbehavior to the chain and collects the reward.
class Witness {
public:
    Witness(Keypair keys, Chain* chain) : keys_(std::move(keys)), chain_(chain) {}

    const Address& address() const { return keys_.addr; }
    uint64_t submitted() const { return submitted_; }

    void on_message(const MessageBody& body) {
        const auto* proof = std::get_if<FraudProofMsg>(&body);
        if (proof == nullptr) return;
        chain_->submit({keys_.addr, SubmitFraudProofTx{proof->req_bytes, proof->res_bytes,
                                                       proof->header_preimage}});
        submitted_++;
    }

private:
    Keypair keys_;
    Chain* chain_;
    uint64_t submitted_ = 0;
};

struct NetConfig {
    uint64_t seed = 1;
    uint64_t block_interval = 10;  // ticks between blocks
    uint64_t delay_min = 1;        // message latency bounds, ticks
    uint64_t delay_max = 3;
};

using TraceSink = std::function<void(const nlohmann::json&)>;

class SimNet {
public:
    SimNet(NetConfig cfg, Chain* chain, TraceSink sink);

    void add_client(LightClient* c) { clients_.push_back(c); }
    void add_node(FullNode* n) { nodes_.push_back(n); }
    void add_witness(Witness* w) { witnesses_.push_back(w); }

    // Advances one tick: deliver, script hook, client timers, outboxes,
    // and a block when the cadence says so.
    void step(const std::function<void(uint64_t)>& hook);

    void run(uint64_t horizon, const std::function<void(uint64_t)>& hook);

    uint64_t now() const { return now_; }
    bool conservation_held() const { return conservation_held_; }
    uint64_t messages_delivered() const { return delivered_; }

private:
    struct Envelope {
        uint64_t deliver_at;
        uint64_t seq;
        Address from;
        Address to;
        MessageBody body;
    };
    struct Later {
        bool operator()(const Envelope& a, const Envelope& b) const {
            return a.deliver_at != b.deliver_at ? a.deliver_at > b.deliver_at : a.seq > b.seq;
        }
    };

    void deliver_due();
    void drain_outboxes();
    void post(const Address& from, Outbound msg);
    void produce_and_broadcast();
    void emit_new_verdicts();
    void emit_phase_changes();
    void trace(nlohmann::json record);

    NetConfig cfg_;
    Chain* chain_;
    TraceSink sink_;
    Rng rng_;
    uint64_t now_ = 0;
    uint64_t seq_ = 0;
    uint64_t delivered_ = 0;
    uint64_t expected_total_;
    bool conservation_held_ = true;
    std::priority_queue<Envelope, std::vector<Envelope>, Later> queue_;
    std::map<std::pair<Address, Address>, uint64_t> link_last_;
    std::vector<LightClient*> clients_;
    std::vector<FullNode*> nodes_;
    std::vector<Witness*> witnesses_;
    std::vector<size_t> verdicts_seen_;
    std::vector<ClientPhase> phase_seen_;
};

std::string hex_addr(const Address& a);

}  // namespace parp
