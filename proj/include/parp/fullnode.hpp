// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Full-node actor. Serves verifiable RPCs against the chain it watches,
// collects cumulative micropayments, bonds a deposit, and defends its
// channels during disputes. A configurable misbehavior policy lets the
// simulator exercise every fraud and liveness path the protocol handles.

#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parp/chain.hpp"
#include "parp/messages.hpp"

namespace parp {

enum class Misbehavior : uint8_t {
    None,             // honest
    WrongAmount,      // echoes a different cumulative payment (fraud 1)
    StaleHeight,      // serves from `param` blocks behind the tip (fraud 2)
    BogusProof,       // corrupts the inclusion proof (fraud 3)
    BadResponseSig,   // corrupts its own signature (unattributable)
    WrongChannelId,   // answers for the wrong channel (unattributable)
    WrongRequestHash, // echoes the wrong request hash (unattributable)
    Unresponsive,     // serves `param` requests, then goes silent
    StaleStateClose,  // closes with the previous payment state, not the last
};

const char* to_string(Misbehavior m);

struct BehaviorPolicy {
    Misbehavior kind = Misbehavior::None;
    uint64_t param = 0;
};

struct NodeConfig {
    Keypair keys;
    uint64_t deposit = 3000;
    uint64_t consent_ttl = 64;
    FeeSchedule fees;
    BehaviorPolicy policy;
};

// A message the actor wants delivered over the simulated network.
struct Outbound {
    Address to{};
    MessageBody body;
};

class FullNode {
public:
    FullNode(NodeConfig cfg, Chain* chain);

    const Address& address() const { return cfg_.keys.addr; }
    const NodeConfig& config() const { return cfg_; }

    // Stakes the configured deposit so channels can be opened against it.
    void register_deposit();

    // Network input. Replies, if any, land in the outbox.
    void on_message(const Address& from, const MessageBody& body);

    // Chain tick. Emits channel receipts, releases deferred transaction
    // responses, and files defensive state submissions.
    void on_block(const Block& blk);

    std::vector<Outbound> take_outbox();

    // Voluntary close of one channel (or all active ones).
    void initiate_close(uint64_t alpha);
    void close_all();

    uint64_t served() const { return served_; }
    uint64_t rejected() const { return rejected_; }
    const std::string& last_reject_reason() const { return last_reject_reason_; }

private:
    struct Ledger {
        Address lc{};
        uint64_t last_a = 0;
        Signature last_sigma_a{};
        // One state behind, kept so StaleStateClose has something stale.
        uint64_t prev_a = 0;
        Signature prev_sigma_a{};
        uint64_t defended_a = 0;
        bool active = false;
    };

    struct PendingTx {
        ParpRequest req;
        Address lc{};
    };

    void handle_handshake(const Address& from);
    void handle_request(const ParpRequest& req, const Address& from);
    bool verify_request(const ParpRequest& req, const Ledger& ledger,
                        const PaymentChannel& chan, std::string* why) const;
    ParpResponse build_response(const ParpRequest& req, uint64_t m_b, Bytes result,
                                Bytes proof) const;
    void apply_policy_and_send(const ParpRequest& req, ParpResponse res, const Address& to);
    void release_pending(const Block& blk);
    void defend(const Block& blk);

    NodeConfig cfg_;
    Chain* chain_;
    std::map<uint64_t, Ledger> ledgers_;
    std::map<Digest, ParpResponse> response_cache_;
    std::map<Digest, std::deque<PendingTx>> pending_txs_;
    std::vector<Outbound> outbox_;
    uint64_t served_ = 0;
    uint64_t rejected_ = 0;
    std::string last_reject_reason_;
};

}  // namespace parp
