// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Light-client actor. Tracks recent block headers only, pays per request
// over a payment channel, verifies every response against its own header
// view, and escalates to fraud proofs or defensive channel actions when a
// node misbehaves. The session lifecycle is a small state machine:
//
//   Idle -> Handshaking -> Unbonded -> Bonded -> Unbonding -> Idle
//
// Handshaking waits for the node's consent, Unbonded for the on-chain
// channel opening plus the node's receipt, Unbonding for settlement.

#pragma once

#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "parp/chain.hpp"
#include "parp/fullnode.hpp"
#include "parp/messages.hpp"

namespace parp {

enum class ClientPhase : uint8_t { Idle, Handshaking, Unbonded, Bonded, Unbonding };

enum class Verdict : uint8_t {
    Valid,
    Invalid,           // malformed or misaddressed: retry once, then leave
    FraudPayment,      // wrong cumulative amount echoed
    FraudStaleHeight,  // answered from before the reference block
    FraudBadProof,     // result not bound to the claimed block
};

const char* to_string(ClientPhase p);
const char* to_string(Verdict v);

struct ClientConfig {
    Keypair keys;
    uint64_t budget = 100;
    Address witness{};
    uint64_t hs_timeout = 50;        // ticks to wait in Handshaking/Unbonded
    uint64_t response_timeout = 30;  // ticks before a request is retried
    uint64_t probe_every = 8;        // channel liveness probe period, blocks
    size_t header_cap = 300;         // retained headers
};

struct VerdictRecord {
    Verdict verdict;
    Method method;
    uint64_t a;
};

struct ClientStats {
    uint64_t requests_sent = 0;
    uint64_t retries = 0;
    uint64_t timeouts = 0;
    uint64_t valid = 0;
    uint64_t invalid = 0;
    uint64_t fraud = 0;
    uint64_t probes = 0;
    uint64_t probe_mismatches = 0;
    uint64_t defenses = 0;
    uint64_t fraud_proofs_sent = 0;
    uint64_t settled_refund = 0;
    bool settled = false;
};

class LightClient {
public:
    LightClient(ClientConfig cfg, Chain* chain);

    const Address& address() const { return cfg_.keys.addr; }
    ClientPhase phase() const { return phase_; }
    uint64_t alpha() const { return alpha_; }
    uint64_t paid() const { return a_confirmed_; }
    bool busy() const { return outstanding_.has_value(); }
    const ClientStats& stats() const { return stats_; }
    const std::vector<VerdictRecord>& verdicts() const { return verdicts_; }
    const Bytes& last_result() const { return last_result_; }

    void start_session(const Address& fn, uint64_t now);
    // Issues one RPC. Returns false while another is in flight, before the
    // session is bonded, or once the budget cannot cover the fee.
    bool call(RpcCall call, uint64_t now);
    void close_channel();

    void on_message(const Address& from, const MessageBody& body, uint64_t now);
    void on_block(const Block& blk, uint64_t now);
    void on_tick(uint64_t now);
    std::vector<Outbound> take_outbox();

private:
    struct Outstanding {
        ParpRequest req;
        uint64_t sent_at = 0;
        int retries = 0;
        bool probe = false;
        // A response naming a header we have not seen yet is held for one
        // block interval before it is judged.
        std::optional<ParpResponse> held;
    };

    void ingest_header(const BlockHeader& header, const Digest& hash);
    std::optional<uint64_t> height_of(const Digest& hash) const;
    void send_request(const ParpRequest& req, uint64_t now, bool is_retry);
    Verdict judge(const ParpRequest& req, const ParpResponse& res, bool* header_missing) const;
    void settle_verdict(Verdict verdict, const ParpResponse& res, uint64_t now);
    void raise_fraud_proof(const ParpRequest& req, const ParpResponse& res);
    void give_up_and_close();
    void defend();
    void maybe_probe(uint64_t now);

    ClientConfig cfg_;
    Chain* chain_;
    ClientPhase phase_ = ClientPhase::Idle;

    // Header view: the only chain data responses are verified against.
    std::map<uint64_t, BlockHeader> headers_;
    std::map<Digest, uint64_t> height_index_;
    uint64_t tip_height_ = 0;
    Digest tip_hash_{};

    Address peer_{};
    FeeSchedule fees_;
    uint64_t alpha_ = 0;
    uint64_t a_confirmed_ = 0;
    Signature sigma_confirmed_{};
    uint64_t defended_a_ = 0;
    uint64_t phase_entered_at_ = 0;
    std::optional<Outstanding> outstanding_;

    std::vector<Outbound> outbox_;
    ClientStats stats_;
    std::vector<VerdictRecord> verdicts_;
    Bytes last_result_;
};

}  // namespace parp
