// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "parp/chain.hpp"

#include <cassert>

namespace parp {

const char* to_string(ChannelStatus s) {
    switch (s) {
        case ChannelStatus::Open: return "Open";
        case ChannelStatus::Closing: return "Closing";
        case ChannelStatus::Closed: return "Closed";
    }
    return "?";
}

const char* to_string(TxResult r) {
    switch (r) {
        case TxResult::Accepted: return "Accepted";
        case TxResult::InsufficientBalance: return "InsufficientBalance";
        case TxResult::BelowMinimum: return "BelowMinimum";
        case TxResult::BadConsent: return "BadConsent";
        case TxResult::ConsentExpired: return "ConsentExpired";
        case TxResult::NodeNotDeposited: return "NodeNotDeposited";
        case TxResult::ChannelUnknown: return "ChannelUnknown";
        case TxResult::ChannelClosed: return "ChannelClosed";
        case TxResult::NotParticipant: return "NotParticipant";
        case TxResult::BadPaymentSig: return "BadPaymentSig";
        case TxResult::OverBudget: return "OverBudget";
        case TxResult::AlreadyClosing: return "AlreadyClosing";
        case TxResult::NotClosing: return "NotClosing";
        case TxResult::StaleState: return "StaleState";
        case TxResult::DisputeWindowOpen: return "DisputeWindowOpen";
        case TxResult::RequestIntegrityFail: return "RequestIntegrityFail";
        case TxResult::OriginMismatch: return "OriginMismatch";
        case TxResult::OutsideWindow: return "OutsideWindow";
        case TxResult::ProofRejected: return "ProofRejected";
        case TxResult::NothingToSlash: return "NothingToSlash";
    }
    return "?";
}

const char* tx_kind(const OnChainTx& tx) {
    struct Visitor {
        const char* operator()(const DepositTx&) { return "Deposit"; }
        const char* operator()(const OpenChannelTx&) { return "OpenChannel"; }
        const char* operator()(const CloseChannelTx&) { return "CloseChannel"; }
        const char* operator()(const SubmitStateTx&) { return "SubmitState"; }
        const char* operator()(const ConfirmClosureTx&) { return "ConfirmClosure"; }
        const char* operator()(const SubmitFraudProofTx&) { return "SubmitFraudProof"; }
        const char* operator()(const TransferTx&) { return "Transfer"; }
        const char* operator()(const UserTx&) { return "UserTx"; }
    };
    return std::visit(Visitor{}, tx.payload);
}

Bytes encode_onchain_tx(const OnChainTx& tx) {
    struct Visitor {
        const Address& sender;
        Bytes out;

        void header(uint8_t tag) {
            out.push_back(tag);
            out.insert(out.end(), sender.begin(), sender.end());
        }
        void operator()(const DepositTx& t) {
            header(0x10);
            put_u64(out, t.amount);
        }
        void operator()(const OpenChannelTx& t) {
            header(0x11);
            out.insert(out.end(), t.fn.begin(), t.fn.end());
            put_u64(out, t.expiry);
            out.insert(out.end(), t.consent_sig.begin(), t.consent_sig.end());
            put_u64(out, t.budget);
        }
        void operator()(const CloseChannelTx& t) {
            header(0x12);
            put_u64(out, t.alpha);
            put_u64(out, t.a);
            out.insert(out.end(), t.sigma_a.begin(), t.sigma_a.end());
        }
        void operator()(const SubmitStateTx& t) {
            header(0x13);
            put_u64(out, t.alpha);
            put_u64(out, t.a);
            out.insert(out.end(), t.sigma_a.begin(), t.sigma_a.end());
        }
        void operator()(const ConfirmClosureTx& t) {
            header(0x14);
            put_u64(out, t.alpha);
        }
        void operator()(const SubmitFraudProofTx& t) {
            header(0x15);
            put_u32(out, static_cast<uint32_t>(t.req_bytes.size()));
            out.insert(out.end(), t.req_bytes.begin(), t.req_bytes.end());
            put_u32(out, static_cast<uint32_t>(t.res_bytes.size()));
            out.insert(out.end(), t.res_bytes.begin(), t.res_bytes.end());
            put_u32(out, static_cast<uint32_t>(t.header_preimage.size()));
            out.insert(out.end(), t.header_preimage.begin(), t.header_preimage.end());
        }
        void operator()(const TransferTx& t) {
            header(0x16);
            out.insert(out.end(), t.to.begin(), t.to.end());
            put_u64(out, t.amount);
        }
        void operator()(const UserTx& t) { out = t.raw; }
    };
    Visitor v{tx.sender, {}};
    std::visit(v, tx.payload);
    return v.out;
}

namespace {

constexpr Signature kZeroSignature{};

}  // namespace

Chain::Chain(ChainParams params, const std::map<Address, uint64_t>& genesis_balances,
             uint64_t genesis_timestamp)
    : params_(params) {
    for (const auto& [addr, amount] : genesis_balances) set_balance(addr, amount);

    Block genesis;
    genesis.header.height = 0;
    genesis.header.timestamp = genesis_timestamp;
    genesis.header.state_root = state_trie_.root_hash();
    genesis.header.tx_root = genesis.tx_trie.root_hash();
    genesis.hash = header_hash(genesis.header);
    genesis.state_trie = state_trie_;
    hash_index_[genesis.hash] = 0;
    blocks_.push_back(std::move(genesis));
}

void Chain::set_balance(const Address& a, uint64_t v) {
    balances_[a] = v;
    auto updated = state_trie_.insert(ByteView{a.data(), a.size()}, ByteView{be64(v)});
    assert(updated.ok());
    state_trie_ = std::move(updated).value();
}

void Chain::submit(OnChainTx tx) { pending_.push_back(std::move(tx)); }

const Block& Chain::produce_block(uint64_t timestamp) {
    Block block;
    building_ = &block;
    const uint64_t new_height = blocks_.back().header.height + 1;

    std::vector<OnChainTx> txs;
    txs.swap(pending_);
    Trie tx_trie;
    for (size_t i = 0; i < txs.size(); ++i) {
        auto inserted = tx_trie.insert(ByteView{be_minimal(i)}, ByteView{encode_onchain_tx(txs[i])});
        assert(inserted.ok());
        tx_trie = std::move(inserted).value();
        block.txs.push_back(apply_tx(txs[i], new_height));
    }

    // Disputes whose window elapsed settle now; a submission in this very
    // block has already reset its deadline and survives.
    for (auto& [alpha, chan] : channels_) {
        if (chan.status == ChannelStatus::Closing && chan.dispute_deadline < new_height)
            finalize_channel(chan);
    }

    block.header.parent_hash = blocks_.back().hash;
    block.header.height = new_height;
    block.header.state_root = state_trie_.root_hash();
    block.header.tx_root = tx_trie.root_hash();
    block.header.timestamp = timestamp;
    block.hash = header_hash(block.header);
    block.tx_trie = std::move(tx_trie);
    block.state_trie = state_trie_;

    hash_index_[block.hash] = new_height;
    building_ = nullptr;
    blocks_.push_back(std::move(block));
    return blocks_.back();
}

Chain::HashLookup Chain::height_by_hash(const Digest& h) const {
    auto it = hash_index_.find(h);
    if (it == hash_index_.end()) return {HashLookup::Status::Unknown, 0};
    if (height() - it->second > params_.hash_window)
        return {HashLookup::Status::OutsideWindow, it->second};
    return {HashLookup::Status::Found, it->second};
}

uint64_t Chain::balance(const Address& a) const {
    auto it = balances_.find(a);
    return it == balances_.end() ? 0 : it->second;
}

uint64_t Chain::deposit(const Address& a) const {
    auto it = deposits_.find(a);
    return it == deposits_.end() ? 0 : it->second;
}

const PaymentChannel* Chain::channel(uint64_t alpha) const {
    auto it = channels_.find(alpha);
    return it == channels_.end() ? nullptr : &it->second;
}

uint64_t Chain::total_tokens() const {
    uint64_t total = treasury_;
    for (const auto& [addr, v] : balances_) total += v;
    for (const auto& [addr, v] : deposits_) total += v;
    for (const auto& [alpha, chan] : channels_)
        if (chan.status != ChannelStatus::Closed) total += chan.budget;
    return total;
}

void Chain::finalize_channel(PaymentChannel& chan) {
    assert(chan.status == ChannelStatus::Closing);
    const uint64_t fn_amount = chan.cs.a;
    const uint64_t lc_refund = chan.budget - fn_amount;
    set_balance(chan.fn, balance(chan.fn) + fn_amount);
    set_balance(chan.lc, balance(chan.lc) + lc_refund);
    chan.status = ChannelStatus::Closed;
    if (building_ != nullptr)
        building_->settlements.push_back({chan.alpha, chan.fn, chan.lc, fn_amount, lc_refund});
}

void Chain::slash_and_reward(const Address& fn, const Address& lc, const Address& witness) {
    const uint64_t d = deposit(fn);
    const uint64_t third = d / 3;
    const uint64_t to_treasury = third + (d - 3 * third);
    deposits_[fn] = 0;
    set_balance(lc, balance(lc) + third);
    set_balance(witness, balance(witness) + third);
    treasury_ += to_treasury;
    if (building_ != nullptr)
        building_->slashes.push_back({fn, lc, witness, d, third, to_treasury});
}

TxRecord Chain::apply_tx(const OnChainTx& tx, uint64_t new_height) {
    TxRecord record{tx, TxResult::Accepted, 0, 0};

    if (const auto* t = std::get_if<DepositTx>(&tx.payload)) {
        if (t->amount < params_.min_deposit) {
            record.result = TxResult::BelowMinimum;
        } else if (balance(tx.sender) < t->amount) {
            record.result = TxResult::InsufficientBalance;
        } else {
            set_balance(tx.sender, balance(tx.sender) - t->amount);
            deposits_[tx.sender] += t->amount;
        }
        return record;
    }

    if (const auto* t = std::get_if<OpenChannelTx>(&tx.payload)) {
        auto signer = recover(consent_digest(tx.sender, t->expiry), t->consent_sig);
        if (!signer || *signer != t->fn) {
            record.result = TxResult::BadConsent;
        } else if (new_height > t->expiry) {
            record.result = TxResult::ConsentExpired;
        } else if (deposit(t->fn) < params_.min_deposit) {
            record.result = TxResult::NodeNotDeposited;
        } else if (t->budget == 0 || balance(tx.sender) < t->budget) {
            record.result = TxResult::InsufficientBalance;
        } else {
            const uint64_t alpha = next_channel_id_++;
            PaymentChannel chan;
            chan.alpha = alpha;
            chan.lc = tx.sender;
            chan.fn = t->fn;
            chan.budget = t->budget;
            channels_[alpha] = chan;
            set_balance(tx.sender, balance(tx.sender) - t->budget);
            record.alpha = alpha;
        }
        return record;
    }

    if (const auto* t = std::get_if<CloseChannelTx>(&tx.payload)) {
        record.alpha = t->alpha;
        auto it = channels_.find(t->alpha);
        if (it == channels_.end()) {
            record.result = TxResult::ChannelUnknown;
            return record;
        }
        PaymentChannel& chan = it->second;
        if (tx.sender != chan.lc && tx.sender != chan.fn) {
            record.result = TxResult::NotParticipant;
        } else if (chan.status != ChannelStatus::Open) {
            record.result = TxResult::AlreadyClosing;
        } else if (t->a > chan.budget) {
            record.result = TxResult::OverBudget;
        } else if (t->a == 0 && t->sigma_a == kZeroSignature) {
            // Empty-state close: either party may shut an unused channel.
            chan.cs = {0, std::nullopt};
            chan.status = ChannelStatus::Closing;
            chan.dispute_deadline = new_height + params_.dispute_window;
        } else {
            auto signer = recover(payment_digest(t->alpha, t->a), t->sigma_a);
            if (!signer || *signer != chan.lc) {
                record.result = TxResult::BadPaymentSig;
            } else {
                chan.cs = {t->a, t->sigma_a};
                chan.status = ChannelStatus::Closing;
                chan.dispute_deadline = new_height + params_.dispute_window;
            }
        }
        return record;
    }

    if (const auto* t = std::get_if<SubmitStateTx>(&tx.payload)) {
        record.alpha = t->alpha;
        auto it = channels_.find(t->alpha);
        if (it == channels_.end()) {
            record.result = TxResult::ChannelUnknown;
            return record;
        }
        PaymentChannel& chan = it->second;
        auto signer = recover(payment_digest(t->alpha, t->a), t->sigma_a);
        if (chan.status != ChannelStatus::Closing) {
            record.result = TxResult::NotClosing;
        } else if (!signer || *signer != chan.lc) {
            record.result = TxResult::BadPaymentSig;
        } else if (t->a <= chan.cs.a) {
            record.result = TxResult::StaleState;
        } else if (t->a > chan.budget) {
            record.result = TxResult::OverBudget;
        } else {
            chan.cs = {t->a, t->sigma_a};
            chan.dispute_deadline = new_height + params_.dispute_window;
        }
        return record;
    }

    if (const auto* t = std::get_if<ConfirmClosureTx>(&tx.payload)) {
        record.alpha = t->alpha;
        auto it = channels_.find(t->alpha);
        if (it == channels_.end()) {
            record.result = TxResult::ChannelUnknown;
        } else if (it->second.status != ChannelStatus::Closing) {
            record.result = TxResult::NotClosing;
        } else if (new_height <= it->second.dispute_deadline) {
            record.result = TxResult::DisputeWindowOpen;
        } else {
            finalize_channel(it->second);
        }
        return record;
    }

    if (std::get_if<SubmitFraudProofTx>(&tx.payload) != nullptr)
        return apply_fraud_proof(tx, new_height);

    if (const auto* t = std::get_if<TransferTx>(&tx.payload)) {
        if (balance(tx.sender) < t->amount) {
            record.result = TxResult::InsufficientBalance;
        } else {
            set_balance(tx.sender, balance(tx.sender) - t->amount);
            set_balance(t->to, balance(t->to) + t->amount);
        }
        return record;
    }

    assert(std::get_if<UserTx>(&tx.payload) != nullptr);
    return record;  // opaque payload, included for inclusion proofs only
}

TxRecord Chain::apply_fraud_proof(const OnChainTx& tx, uint64_t new_height) {
    const auto& t = std::get<SubmitFraudProofTx>(tx.payload);
    TxRecord record{tx, TxResult::Accepted, 0, 0};

    auto req_decoded = decode_request(ByteView{t.req_bytes});
    auto res_decoded = decode_response(ByteView{t.res_bytes});
    if (!req_decoded.ok() || !res_decoded.ok()) {
        record.result = TxResult::RequestIntegrityFail;
        return record;
    }
    const ParpRequest& req = req_decoded.value();
    const ParpResponse& res = res_decoded.value();

    // The pair is only adjudicable if the response is bound to this exact
    // request: same channel, and the echoed h_req pins the request content.
    if (req.alpha != res.alpha || res.h_req != req.h_req) {
        record.result = TxResult::RequestIntegrityFail;
        return record;
    }
    record.alpha = req.alpha;

    auto it = channels_.find(req.alpha);
    if (it == channels_.end()) {
        record.result = TxResult::ChannelUnknown;
        return record;
    }
    PaymentChannel& chan = it->second;
    if (chan.status == ChannelStatus::Closed) {
        record.result = TxResult::ChannelClosed;
        return record;
    }

    if (request_digest(req.alpha, req.h_b, req.a, req.call) != req.h_req) {
        record.result = TxResult::RequestIntegrityFail;
        return record;
    }
    auto req_signer = recover(req.h_req, req.sigma_req);
    if (!req_signer || *req_signer != chan.lc) {
        record.result = TxResult::OriginMismatch;
        return record;
    }
    auto res_signer = recover(response_digest(res), res.sigma_res);
    if (!res_signer || *res_signer != chan.fn) {
        record.result = TxResult::OriginMismatch;
        return record;
    }

    // Fraud conditions, in protocol order. The third is only decidable for
    // heights still inside the recency window.
    uint8_t condition = 0;
    if (req.a != res.a) {
        condition = 1;
    } else {
        auto h_b = height_by_hash(req.h_b);
        if (h_b.status == HashLookup::Status::Found && res.m_b < h_b.height) condition = 2;
    }
    if (condition == 0) {
        const uint64_t tip_height = height();
        if (res.m_b > tip_height || tip_height - res.m_b > params_.hash_window) {
            record.result = TxResult::OutsideWindow;
            return record;
        }
        auto header = decode_header(ByteView{t.header_preimage});
        if (!header.ok() || header_hash(header.value()) != blocks_[res.m_b].hash) {
            record.result = TxResult::ProofRejected;
            return record;
        }
        const Method method = method_of(req.call);
        const bool needs_proof = (method == Method::GetBalance ||
                                  method == Method::SendTransaction) &&
                                 !is_error_result(ByteView{res.result});
        if (!needs_proof) {
            record.result = TxResult::ProofRejected;
            return record;
        }
        bool bound = false;
        auto proof = decode_proof(ByteView{res.proof});
        if (proof.has_value()) {
            if (method == Method::GetBalance) {
                const auto& call = std::get<GetBalanceCall>(req.call);
                bound = verify_proof(header.value().state_root, *proof) &&
                        proof->key == Bytes(call.address.begin(), call.address.end()) &&
                        proof->value == res.result;
            } else {
                const auto& call = std::get<SendTransactionCall>(req.call);
                Digest value_hash = digest(ByteView{proof->value});
                bound = verify_proof(header.value().tx_root, *proof) &&
                        proof->value == call.tx &&
                        res.result == Bytes(value_hash.begin(), value_hash.end());
            }
        }
        if (bound) {
            record.result = TxResult::ProofRejected;
            return record;
        }
        condition = 3;
    }

    // Fraud established: confiscate the deposit and force the channel into
    // dispute. The request's own a is signed via sigma_req, so it settles
    // the channel even when the standalone sigma_a is unusable.
    slash_and_reward(chan.fn, chan.lc, tx.sender);
    auto sigma_signer = recover(payment_digest(req.alpha, req.a), req.sigma_a);
    const bool sigma_ok = sigma_signer && *sigma_signer == chan.lc;
    const bool upgrade = req.a <= chan.budget && req.a > chan.cs.a;
    if (chan.status == ChannelStatus::Open || upgrade) {
        if (req.a <= chan.budget) {
            chan.cs.a = std::max(chan.cs.a, req.a);
            if (sigma_ok && chan.cs.a == req.a) chan.cs.sigma_a = req.sigma_a;
        }
    }
    chan.status = ChannelStatus::Closing;
    chan.dispute_deadline = new_height + params_.dispute_window;
    record.fraud_condition = condition;
    return record;
}

}  // namespace parp
