// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "parp/fullnode.hpp"

#include <algorithm>
#include <cassert>

namespace parp {

const char* to_string(Misbehavior m) {
    switch (m) {
        case Misbehavior::None: return "none";
        case Misbehavior::WrongAmount: return "wrong_amount";
        case Misbehavior::StaleHeight: return "stale_height";
        case Misbehavior::BogusProof: return "bogus_proof";
        case Misbehavior::BadResponseSig: return "bad_response_sig";
        case Misbehavior::WrongChannelId: return "wrong_channel_id";
        case Misbehavior::WrongRequestHash: return "wrong_request_hash";
        case Misbehavior::Unresponsive: return "unresponsive";
        case Misbehavior::StaleStateClose: return "stale_state_close";
    }
    return "?";
}

FullNode::FullNode(NodeConfig cfg, Chain* chain) : cfg_(std::move(cfg)), chain_(chain) {}

void FullNode::register_deposit() {
    chain_->submit({address(), DepositTx{cfg_.deposit}});
}

void FullNode::on_message(const Address& from, const MessageBody& body) {
    if (const auto* hs = std::get_if<Handshake>(&body)) {
        (void)hs;
        handle_handshake(from);
    } else if (const auto* rm = std::get_if<RequestMsg>(&body)) {
        handle_request(rm->req, from);
    }
}

void FullNode::handle_handshake(const Address& from) {
    uint64_t expiry = chain_->height() + cfg_.consent_ttl;
    HandshakeConfirm confirm;
    confirm.fn = address();
    confirm.expiry = expiry;
    confirm.consent = sign(consent_digest(from, expiry), cfg_.keys.sk);
    confirm.fees = cfg_.fees;
    outbox_.push_back({from, confirm});
}

bool FullNode::verify_request(const ParpRequest& req, const Ledger& ledger,
                              const PaymentChannel& chan, std::string* why) const {
    if (chan.status != ChannelStatus::Open) {
        *why = "channel not open";
        return false;
    }
    if (request_digest(req.alpha, req.h_b, req.a, req.call) != req.h_req) {
        *why = "request hash mismatch";
        return false;
    }
    auto req_signer = recover(req.h_req, req.sigma_req);
    if (!req_signer || *req_signer != chan.lc) {
        *why = "bad request signature";
        return false;
    }
    auto pay_signer = recover(payment_digest(req.alpha, req.a), req.sigma_a);
    if (!pay_signer || *pay_signer != chan.lc) {
        *why = "bad payment signature";
        return false;
    }
    if (req.a < ledger.last_a + cfg_.fees.fee_for(method_of(req.call))) {
        *why = "insufficient payment";
        return false;
    }
    if (req.a > chan.budget) {
        *why = "payment exceeds channel budget";
        return false;
    }
    if (chain_->height_by_hash(req.h_b).status != Chain::HashLookup::Status::Found) {
        *why = "reference block unknown or beyond the recency window";
        return false;
    }
    return true;
}

ParpResponse FullNode::build_response(const ParpRequest& req, uint64_t m_b, Bytes result,
                                      Bytes proof) const {
    ParpResponse res;
    res.alpha = req.alpha;
    res.m_b = m_b;
    res.a = req.a;
    res.result = std::move(result);
    res.proof = std::move(proof);
    res.h_req = req.h_req;
    res.sigma_req = req.sigma_req;
    return res;
}

void FullNode::apply_policy_and_send(const ParpRequest& req, ParpResponse res,
                                     const Address& to) {
    switch (cfg_.policy.kind) {
        case Misbehavior::WrongAmount:
            res.a += std::max<uint64_t>(1, cfg_.policy.param);
            break;
        case Misbehavior::BogusProof:
            if (!res.proof.empty()) res.proof[res.proof.size() / 2] ^= 0x01;
            break;
        case Misbehavior::WrongChannelId:
            res.alpha += 1;
            break;
        case Misbehavior::WrongRequestHash:
            res.h_req[0] ^= 0xff;
            break;
        default:
            break;
    }
    res.sigma_res = sign(response_digest(res), cfg_.keys.sk);
    if (cfg_.policy.kind == Misbehavior::BadResponseSig) res.sigma_res[10] ^= 0xff;
    response_cache_[req.h_req] = res;
    outbox_.push_back({to, ResponseMsg{std::move(res)}});
}

void FullNode::handle_request(const ParpRequest& req, const Address& from) {
    if (cfg_.policy.kind == Misbehavior::Unresponsive && served_ >= cfg_.policy.param) {
        rejected_++;
        last_reject_reason_ = "unresponsive";
        return;
    }
    auto cached = response_cache_.find(req.h_req);
    if (cached != response_cache_.end()) {
        outbox_.push_back({from, ResponseMsg{cached->second}});
        return;
    }
    auto ledger_it = ledgers_.find(req.alpha);
    const PaymentChannel* chan = chain_->channel(req.alpha);
    if (ledger_it == ledgers_.end() || !ledger_it->second.active || chan == nullptr) {
        rejected_++;
        last_reject_reason_ = "unknown channel";
        return;
    }
    Ledger& ledger = ledger_it->second;
    std::string why;
    if (!verify_request(req, ledger, *chan, &why)) {
        rejected_++;
        last_reject_reason_ = why;
        return;
    }

    // Payment accepted: advance the channel ledger, keeping one state back.
    ledger.prev_a = ledger.last_a;
    ledger.prev_sigma_a = ledger.last_sigma_a;
    ledger.last_a = req.a;
    ledger.last_sigma_a = req.sigma_a;
    served_++;

    uint64_t m_b = chain_->height();
    if (cfg_.policy.kind == Misbehavior::StaleHeight)
        m_b = m_b > cfg_.policy.param ? m_b - cfg_.policy.param : 0;

    if (const auto* call = std::get_if<GetBalanceCall>(&req.call)) {
        const Block& blk = chain_->block_at(m_b);
        ByteView key{call->address.data(), call->address.size()};
        auto stored = blk.state_trie.get(key);
        if (!stored) {
            apply_policy_and_send(req, build_response(req, m_b, error_result(ExecError::UnknownAccount), {}), from);
            return;
        }
        auto proof = blk.state_trie.prove(key);
        assert(proof.ok());
        apply_policy_and_send(
            req, build_response(req, m_b, *stored, encode_proof(proof.value())), from);
        return;
    }
    if (const auto* call = std::get_if<GetChannelStatusCall>(&req.call)) {
        const PaymentChannel* target = chain_->channel(call->alpha);
        Bytes result = target == nullptr
                           ? error_result(ExecError::UnknownChannel)
                           : ok_status_result(static_cast<uint8_t>(target->status));
        apply_policy_and_send(req, build_response(req, m_b, std::move(result), {}), from);
        return;
    }
    const auto& call = std::get<SendTransactionCall>(req.call);
    if (call.tx.empty()) {
        apply_policy_and_send(req, build_response(req, m_b, error_result(ExecError::MalformedTx), {}), from);
        return;
    }
    // Submit and defer: the response carries an inclusion proof, so it can
    // only be produced once the transaction has landed in a block.
    chain_->submit({address(), UserTx{call.tx}});
    pending_txs_[digest(ByteView{call.tx})].push_back({req, from});
}

void FullNode::release_pending(const Block& blk) {
    if (pending_txs_.empty()) return;
    for (size_t i = 0; i < blk.txs.size(); ++i) {
        const auto* user = std::get_if<UserTx>(&blk.txs[i].tx.payload);
        if (user == nullptr) continue;
        auto it = pending_txs_.find(digest(ByteView{user->raw}));
        if (it == pending_txs_.end() || it->second.empty()) continue;
        PendingTx pending = std::move(it->second.front());
        it->second.pop_front();
        if (it->second.empty()) pending_txs_.erase(it);

        Digest tx_hash = digest(ByteView{user->raw});
        auto proof = blk.tx_trie.prove(ByteView{be_minimal(i)});
        assert(proof.ok());
        uint64_t m_b = blk.header.height;
        if (cfg_.policy.kind == Misbehavior::StaleHeight)
            m_b = m_b > cfg_.policy.param ? m_b - cfg_.policy.param : 0;
        apply_policy_and_send(pending.req,
                              build_response(pending.req, m_b,
                                             Bytes(tx_hash.begin(), tx_hash.end()),
                                             encode_proof(proof.value())),
                              pending.lc);
    }
}

void FullNode::defend(const Block& blk) {
    (void)blk;
    for (auto& [alpha, ledger] : ledgers_) {
        if (!ledger.active) continue;
        const PaymentChannel* chan = chain_->channel(alpha);
        if (chan == nullptr) continue;
        if (chan->status == ChannelStatus::Closed) {
            ledger.active = false;
            continue;
        }
        if (chan->status != ChannelStatus::Closing) continue;
        if (cfg_.policy.kind == Misbehavior::StaleStateClose) continue;
        if (chan->cs.a >= ledger.last_a || ledger.defended_a >= ledger.last_a) continue;
        chain_->submit({address(), SubmitStateTx{alpha, ledger.last_a, ledger.last_sigma_a}});
        ledger.defended_a = ledger.last_a;
    }
}

void FullNode::on_block(const Block& blk) {
    for (const auto& rec : blk.txs) {
        if (rec.result != TxResult::Accepted) continue;
        const auto* open = std::get_if<OpenChannelTx>(&rec.tx.payload);
        if (open == nullptr || open->fn != address()) continue;
        Ledger ledger;
        ledger.lc = rec.tx.sender;
        ledger.active = true;
        ledgers_[rec.alpha] = ledger;
        ChannelReceipt receipt{rec.alpha, sign(receipt_digest(rec.alpha), cfg_.keys.sk)};
        outbox_.push_back({rec.tx.sender, receipt});
    }
    release_pending(blk);
    defend(blk);
}

void FullNode::initiate_close(uint64_t alpha) {
    auto it = ledgers_.find(alpha);
    if (it == ledgers_.end() || !it->second.active) return;
    const Ledger& ledger = it->second;
    uint64_t a = ledger.last_a;
    Signature sig = ledger.last_sigma_a;
    if (cfg_.policy.kind == Misbehavior::StaleStateClose) {
        a = ledger.prev_a;
        sig = ledger.prev_sigma_a;
    }
    if (a == 0) sig = Signature{};  // empty-state marker
    chain_->submit({address(), CloseChannelTx{alpha, a, sig}});
}

void FullNode::close_all() {
    for (const auto& [alpha, ledger] : ledgers_)
        if (ledger.active) initiate_close(alpha);
}

std::vector<Outbound> FullNode::take_outbox() {
    std::vector<Outbound> out;
    out.swap(outbox_);
    return out;
}

}  // namespace parp
