// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "parp/lightclient.hpp"

#include <algorithm>

namespace parp {

const char* to_string(ClientPhase p) {
    switch (p) {
        case ClientPhase::Idle: return "idle";
        case ClientPhase::Handshaking: return "handshaking";
        case ClientPhase::Unbonded: return "unbonded";
        case ClientPhase::Bonded: return "bonded";
        case ClientPhase::Unbonding: return "unbonding";
    }
    return "?";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Valid: return "valid";
        case Verdict::Invalid: return "invalid";
        case Verdict::FraudPayment: return "fraud_payment";
        case Verdict::FraudStaleHeight: return "fraud_stale_height";
        case Verdict::FraudBadProof: return "fraud_bad_proof";
    }
    return "?";
}

LightClient::LightClient(ClientConfig cfg, Chain* chain) : cfg_(std::move(cfg)), chain_(chain) {
    // Seed the header view with what the chain already has, newest first,
    // so a late-joining client can still judge responses.
    uint64_t h = chain_->height();
    uint64_t floor = h + 1 > cfg_.header_cap ? h + 1 - cfg_.header_cap : 0;
    for (uint64_t i = floor; i <= h; ++i)
        ingest_header(chain_->block_at(i).header, chain_->block_at(i).hash);
}

void LightClient::ingest_header(const BlockHeader& header, const Digest& hash) {
    headers_[header.height] = header;
    height_index_[hash] = header.height;
    if (header.height >= tip_height_) {
        tip_height_ = header.height;
        tip_hash_ = hash;
    }
    while (headers_.size() > cfg_.header_cap) {
        auto oldest = headers_.begin();
        height_index_.erase(header_hash(oldest->second));
        headers_.erase(oldest);
    }
}

std::optional<uint64_t> LightClient::height_of(const Digest& hash) const {
    auto it = height_index_.find(hash);
    if (it == height_index_.end()) return std::nullopt;
    return it->second;
}

void LightClient::start_session(const Address& fn, uint64_t now) {
    if (phase_ != ClientPhase::Idle) return;
    peer_ = fn;
    phase_ = ClientPhase::Handshaking;
    phase_entered_at_ = now;
    outbox_.push_back({peer_, Handshake{address()}});
}

bool LightClient::call(RpcCall call, uint64_t now) {
    if (phase_ != ClientPhase::Bonded || busy()) return false;
    uint64_t a_new = a_confirmed_ + fees_.fee_for(method_of(call));
    if (a_new > cfg_.budget) return false;

    ParpRequest req;
    req.alpha = alpha_;
    req.h_b = tip_hash_;
    req.a = a_new;
    req.call = std::move(call);
    req.h_req = request_digest(req.alpha, req.h_b, req.a, req.call);
    req.sigma_a = sign(payment_digest(req.alpha, req.a), cfg_.keys.sk);
    req.sigma_req = sign(req.h_req, cfg_.keys.sk);
    outstanding_ = Outstanding{req, now, 0, false, std::nullopt};
    send_request(req, now, false);
    return true;
}

void LightClient::send_request(const ParpRequest& req, uint64_t now, bool is_retry) {
    if (is_retry)
        stats_.retries++;
    else
        stats_.requests_sent++;
    (void)now;
    outbox_.push_back({peer_, RequestMsg{req}});
}

Verdict LightClient::judge(const ParpRequest& req, const ParpResponse& res,
                           bool* header_missing) const {
    if (res.h_req != req.h_req || res.sigma_req != req.sigma_req) return Verdict::Invalid;
    auto signer = recover(response_digest(res), res.sigma_res);
    if (!signer || *signer != peer_) return Verdict::Invalid;
    if (res.alpha != req.alpha) return Verdict::Invalid;
    if (res.a != req.a) return Verdict::FraudPayment;

    auto ref_height = height_of(req.h_b);
    if (ref_height && res.m_b < *ref_height) return Verdict::FraudStaleHeight;

    const Method method = method_of(req.call);
    const bool needs_proof = (method == Method::GetBalance ||
                              method == Method::SendTransaction) &&
                             !is_error_result(ByteView{res.result});
    if (!needs_proof) return Verdict::Valid;

    auto header_it = headers_.find(res.m_b);
    if (header_it == headers_.end()) {
        *header_missing = true;
        return Verdict::Invalid;
    }
    const BlockHeader& header = header_it->second;

    auto proof = decode_proof(ByteView{res.proof});
    if (!proof) return Verdict::FraudBadProof;
    if (method == Method::GetBalance) {
        const auto& call = std::get<GetBalanceCall>(req.call);
        if (!verify_proof(header.state_root, *proof) ||
            proof->key != Bytes(call.address.begin(), call.address.end()) ||
            proof->value != res.result)
            return Verdict::FraudBadProof;
    } else {
        const auto& call = std::get<SendTransactionCall>(req.call);
        Digest value_hash = digest(ByteView{proof->value});
        if (!verify_proof(header.tx_root, *proof) || proof->value != call.tx ||
            res.result != Bytes(value_hash.begin(), value_hash.end()))
            return Verdict::FraudBadProof;
    }
    return Verdict::Valid;
}

void LightClient::settle_verdict(Verdict verdict, const ParpResponse& res, uint64_t now) {
    const ParpRequest req = outstanding_->req;
    const bool probe = outstanding_->probe;
    verdicts_.push_back({verdict, method_of(req.call), req.a});

    switch (verdict) {
        case Verdict::Valid: {
            stats_.valid++;
            a_confirmed_ = req.a;
            sigma_confirmed_ = req.sigma_a;
            last_result_ = res.result;
            outstanding_.reset();
            if (probe) {
                const PaymentChannel* chan = chain_->channel(alpha_);
                uint8_t on_chain = chan ? static_cast<uint8_t>(chan->status) : 0xff;
                if (is_error_result(ByteView{res.result}) || res.result.size() != 1 ||
                    res.result[0] != on_chain) {
                    stats_.probe_mismatches++;
                    give_up_and_close();
                }
            }
            return;
        }
        case Verdict::Invalid: {
            stats_.invalid++;
            if (outstanding_->retries == 0) {
                outstanding_->retries = 1;
                outstanding_->sent_at = now;
                outstanding_->held.reset();
                send_request(req, now, true);
            } else {
                give_up_and_close();
            }
            return;
        }
        case Verdict::FraudPayment:
        case Verdict::FraudStaleHeight:
        case Verdict::FraudBadProof: {
            stats_.fraud++;
            raise_fraud_proof(req, res);
            outstanding_.reset();
            // The adjudicator force-closes the channel; await settlement.
            phase_ = ClientPhase::Unbonding;
            return;
        }
    }
}

void LightClient::raise_fraud_proof(const ParpRequest& req, const ParpResponse& res) {
    Bytes header_bytes;
    auto it = headers_.find(res.m_b);
    if (it != headers_.end()) header_bytes = encode_header(it->second);
    outbox_.push_back(
        {cfg_.witness, FraudProofMsg{encode_request(req), encode_response(res), header_bytes}});
    stats_.fraud_proofs_sent++;
}

void LightClient::close_channel() {
    if (alpha_ == 0) {
        phase_ = ClientPhase::Idle;
        return;
    }
    const PaymentChannel* chan = chain_->channel(alpha_);
    if (chan != nullptr && chan->status == ChannelStatus::Open) {
        if (a_confirmed_ == 0)
            chain_->submit({address(), CloseChannelTx{alpha_, 0, Signature{}}});
        else
            chain_->submit({address(), CloseChannelTx{alpha_, a_confirmed_, sigma_confirmed_}});
    }
    phase_ = ClientPhase::Unbonding;
}

void LightClient::give_up_and_close() {
    outstanding_.reset();
    close_channel();
}

void LightClient::defend() {
    if (alpha_ == 0) return;
    const PaymentChannel* chan = chain_->channel(alpha_);
    if (chan == nullptr) return;
    if (chan->status == ChannelStatus::Closing && phase_ == ClientPhase::Bonded)
        phase_ = ClientPhase::Unbonding;
    if (chan->status == ChannelStatus::Closing && chan->cs.a < a_confirmed_ &&
        defended_a_ < a_confirmed_) {
        chain_->submit({address(), SubmitStateTx{alpha_, a_confirmed_, sigma_confirmed_}});
        defended_a_ = a_confirmed_;
        stats_.defenses++;
    }
    if (chan->status == ChannelStatus::Closed) {
        stats_.settled = true;
        stats_.settled_refund += cfg_.budget - chan->cs.a;
        phase_ = ClientPhase::Idle;
        alpha_ = 0;
        a_confirmed_ = 0;
        sigma_confirmed_ = Signature{};
        defended_a_ = 0;
        outstanding_.reset();
    }
}

void LightClient::maybe_probe(uint64_t now) {
    if (phase_ != ClientPhase::Bonded || busy() || alpha_ == 0) return;
    if (cfg_.probe_every == 0 || tip_height_ == 0 || tip_height_ % cfg_.probe_every != 0) return;
    uint64_t a_new = a_confirmed_ + fees_.get_channel_status;
    if (a_new > cfg_.budget) return;

    ParpRequest req;
    req.alpha = alpha_;
    req.h_b = tip_hash_;
    req.a = a_new;
    req.call = GetChannelStatusCall{alpha_};
    req.h_req = request_digest(req.alpha, req.h_b, req.a, req.call);
    req.sigma_a = sign(payment_digest(req.alpha, req.a), cfg_.keys.sk);
    req.sigma_req = sign(req.h_req, cfg_.keys.sk);
    outstanding_ = Outstanding{req, now, 0, true, std::nullopt};
    stats_.probes++;
    send_request(req, now, false);
}

void LightClient::on_message(const Address& from, const MessageBody& body, uint64_t now) {
    if (from != peer_) return;

    if (const auto* confirm = std::get_if<HandshakeConfirm>(&body)) {
        if (phase_ != ClientPhase::Handshaking) return;
        auto signer = recover(consent_digest(address(), confirm->expiry), confirm->consent);
        if (!signer || *signer != peer_ || confirm->expiry <= tip_height_) {
            phase_ = ClientPhase::Idle;
            return;
        }
        fees_ = confirm->fees;
        chain_->submit({address(),
                        OpenChannelTx{peer_, confirm->expiry, confirm->consent, cfg_.budget}});
        phase_ = ClientPhase::Unbonded;
        phase_entered_at_ = now;
        return;
    }

    if (const auto* receipt = std::get_if<ChannelReceipt>(&body)) {
        if (phase_ != ClientPhase::Unbonded) return;
        auto signer = recover(receipt_digest(receipt->alpha), receipt->sig);
        if (!signer || *signer != peer_) return;
        const PaymentChannel* chan = chain_->channel(receipt->alpha);
        if (chan == nullptr || chan->lc != address() || chan->fn != peer_) return;
        alpha_ = receipt->alpha;
        phase_ = ClientPhase::Bonded;
        phase_entered_at_ = now;
        return;
    }

    if (const auto* response = std::get_if<ResponseMsg>(&body)) {
        if (!outstanding_ || outstanding_->held.has_value()) return;
        bool header_missing = false;
        Verdict verdict = judge(outstanding_->req, response->res, &header_missing);
        if (header_missing) {
            outstanding_->held = response->res;
            return;
        }
        settle_verdict(verdict, response->res, now);
        return;
    }
}

void LightClient::on_block(const Block& blk, uint64_t now) {
    ingest_header(blk.header, blk.hash);

    if (phase_ == ClientPhase::Unbonded && alpha_ == 0) {
        for (const auto& rec : blk.txs) {
            const auto* open = std::get_if<OpenChannelTx>(&rec.tx.payload);
            if (open == nullptr || rec.tx.sender != address() || open->fn != peer_) continue;
            if (rec.result == TxResult::Accepted) {
                alpha_ = rec.alpha;  // known, but wait for the node's receipt
            } else {
                phase_ = ClientPhase::Idle;  // opening failed; abort
            }
        }
    }

    // A held response gets exactly one more chance with the new header.
    if (outstanding_ && outstanding_->held) {
        ParpResponse held = *outstanding_->held;
        outstanding_->held.reset();
        bool header_missing = false;
        Verdict verdict = judge(outstanding_->req, held, &header_missing);
        settle_verdict(header_missing ? Verdict::Invalid : verdict, held, now);
    }

    if (phase_ == ClientPhase::Bonded || phase_ == ClientPhase::Unbonding) defend();
    maybe_probe(now);
}

void LightClient::on_tick(uint64_t now) {
    switch (phase_) {
        case ClientPhase::Handshaking:
            if (now - phase_entered_at_ >= cfg_.hs_timeout) {
                stats_.timeouts++;
                phase_ = ClientPhase::Idle;
            }
            return;
        case ClientPhase::Unbonded:
            if (now - phase_entered_at_ >= cfg_.hs_timeout) {
                stats_.timeouts++;
                if (alpha_ != 0)
                    close_channel();  // opened but never acknowledged
                else
                    phase_ = ClientPhase::Idle;
            }
            return;
        case ClientPhase::Bonded:
            if (outstanding_ && now - outstanding_->sent_at >= cfg_.response_timeout) {
                if (outstanding_->retries == 0) {
                    outstanding_->retries = 1;
                    outstanding_->sent_at = now;
                    outstanding_->held.reset();
                    send_request(outstanding_->req, now, true);
                } else {
                    stats_.timeouts++;
                    give_up_and_close();
                }
            }
            return;
        default:
            return;
    }
}

std::vector<Outbound> LightClient::take_outbox() {
    std::vector<Outbound> out;
    out.swap(outbox_);
    return out;
}

}  // namespace parp
