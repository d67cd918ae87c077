// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "parp/codec.hpp"
#include "parp/crypto.hpp"
#include "parp/trie.hpp"

namespace parp {

enum class ChannelStatus : uint8_t { Open = 0, Closing = 1, Closed = 2 };

const char* to_string(ChannelStatus s);

// Latest accepted cumulative payment state. sigma_a is absent only for the
// initial (0, unsigned) state a channel opens with.
struct ChannelState {
    uint64_t a = 0;
    std::optional<Signature> sigma_a;
};

struct PaymentChannel {
    uint64_t alpha = 0;
    Address lc{};
    Address fn{};
    uint64_t budget = 0;
    ChannelState cs;
    ChannelStatus status = ChannelStatus::Open;
    uint64_t dispute_deadline = 0;  // meaningful while Closing
};

// On-chain transaction payloads. UserTx carries opaque raw bytes submitted
// through the SendTransaction RPC; the chain includes them for inclusion
// proofs without interpreting them.
struct DepositTx {
    uint64_t amount = 0;
};
struct OpenChannelTx {
    Address fn{};
    uint64_t expiry = 0;
    Signature consent_sig{};
    uint64_t budget = 0;
};
struct CloseChannelTx {
    uint64_t alpha = 0;
    uint64_t a = 0;
    Signature sigma_a{};
};
struct SubmitStateTx {
    uint64_t alpha = 0;
    uint64_t a = 0;
    Signature sigma_a{};
};
struct ConfirmClosureTx {
    uint64_t alpha = 0;
};
struct SubmitFraudProofTx {
    Bytes req_bytes;
    Bytes res_bytes;
    Bytes header_preimage;
};
struct TransferTx {
    Address to{};
    uint64_t amount = 0;
};
struct UserTx {
    Bytes raw;
};

struct OnChainTx {
    Address sender{};
    std::variant<DepositTx, OpenChannelTx, CloseChannelTx, SubmitStateTx, ConfirmClosureTx,
                 SubmitFraudProofTx, TransferTx, UserTx>
        payload;
};

const char* tx_kind(const OnChainTx& tx);

// Deterministic encoding of a transaction as stored in the per-block
// transaction trie. UserTx encodes as its raw bytes so inclusion proofs
// bind exactly what the submitter sent.
Bytes encode_onchain_tx(const OnChainTx& tx);

enum class TxResult : uint8_t {
    Accepted,
    InsufficientBalance,
    BelowMinimum,
    BadConsent,
    ConsentExpired,
    NodeNotDeposited,
    ChannelUnknown,
    ChannelClosed,
    NotParticipant,
    BadPaymentSig,
    OverBudget,
    AlreadyClosing,
    NotClosing,
    StaleState,
    DisputeWindowOpen,
    RequestIntegrityFail,
    OriginMismatch,
    OutsideWindow,
    ProofRejected,
    NothingToSlash,
};

const char* to_string(TxResult r);

struct TxRecord {
    OnChainTx tx;
    TxResult result = TxResult::Accepted;
    uint64_t alpha = 0;          // channel affected, when applicable
    uint8_t fraud_condition = 0;  // 1..3 for an accepted fraud proof
};

struct Settlement {
    uint64_t alpha = 0;
    Address fn{};
    Address lc{};
    uint64_t fn_amount = 0;
    uint64_t lc_refund = 0;
};

struct SlashEvent {
    Address fn{};
    Address lc{};
    Address witness{};
    uint64_t deposit = 0;
    uint64_t share = 0;      // each party's third
    uint64_t to_treasury = 0;  // third plus remainder
};

struct Block {
    BlockHeader header;
    Digest hash{};
    std::vector<TxRecord> txs;
    std::vector<Settlement> settlements;
    std::vector<SlashEvent> slashes;
    Trie tx_trie;     // inclusion structure for this block's transactions
    Trie state_trie;  // post-state snapshot
};

struct ChainParams {
    uint64_t dispute_window = 16;
    uint64_t min_deposit = 1000;
    uint64_t hash_window = 256;
};

// The simulated ledger: block production, balances held in a Merkle
// Patricia state trie, the deposit registry, channel management and
// fraud-proof adjudication. Single-writer; all mutation flows through
// produce_block.
class Chain {
  public:
    Chain(ChainParams params, const std::map<Address, uint64_t>& genesis_balances,
          uint64_t genesis_timestamp);

    // Queues a transaction for the next block.
    void submit(OnChainTx tx);
    size_t pending_count() const { return pending_.size(); }

    // Applies all pending transactions in submission order, auto-finalizes
    // expired disputes, appends the block.
    const Block& produce_block(uint64_t timestamp);

    uint64_t height() const { return blocks_.back().header.height; }
    const Block& tip() const { return blocks_.back(); }
    const Block& block_at(uint64_t h) const { return blocks_.at(h); }
    const BlockHeader& header_at(uint64_t h) const { return blocks_.at(h).header; }

    struct HashLookup {
        enum class Status { Found, Unknown, OutsideWindow } status;
        uint64_t height = 0;
    };
    // Height for a block hash, answered only within the recency window.
    HashLookup height_by_hash(const Digest& h) const;

    uint64_t balance(const Address& a) const;
    uint64_t deposit(const Address& a) const;
    const PaymentChannel* channel(uint64_t alpha) const;
    const std::map<uint64_t, PaymentChannel>& channels() const { return channels_; }
    uint64_t treasury() const { return treasury_; }

    // Conservation probe: balances + deposits + escrowed budgets of
    // non-Closed channels + treasury. Constant across all transitions.
    uint64_t total_tokens() const;

    const ChainParams& params() const { return params_; }

  private:
    void set_balance(const Address& a, uint64_t v);
    TxRecord apply_tx(const OnChainTx& tx, uint64_t new_height);
    TxRecord apply_fraud_proof(const OnChainTx& tx, uint64_t new_height);
    void finalize_channel(PaymentChannel& chan);
    void slash_and_reward(const Address& fn, const Address& lc, const Address& witness);

    ChainParams params_;
    std::vector<Block> blocks_;
    std::map<Digest, uint64_t> hash_index_;
    std::map<Address, uint64_t> balances_;
    std::map<Address, uint64_t> deposits_;
    std::map<uint64_t, PaymentChannel> channels_;
    uint64_t treasury_ = 0;
    uint64_t next_channel_id_ = 1;
    Trie state_trie_;
    std::vector<OnChainTx> pending_;

    // Scratch for the block under construction.
    Block* building_ = nullptr;
};

}  // namespace parp
