// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "parp/simnet.hpp"

#include <algorithm>

namespace parp {

using nlohmann::json;

std::string hex_addr(const Address& a) {
    return hex_encode(ByteView{a.data(), a.size()});
}

SimNet::SimNet(NetConfig cfg, Chain* chain, TraceSink sink)
    : cfg_(cfg), chain_(chain), sink_(std::move(sink)), rng_(cfg.seed) {
    expected_total_ = chain_->total_tokens();
    if (cfg_.delay_min == 0) cfg_.delay_min = 1;
    if (cfg_.delay_max < cfg_.delay_min) cfg_.delay_max = cfg_.delay_min;
}

void SimNet::trace(json record) {
    if (sink_) sink_(record);
}

void SimNet::post(const Address& from, Outbound msg) {
    uint64_t spread = cfg_.delay_max - cfg_.delay_min + 1;
    uint64_t delay = cfg_.delay_min + (spread > 1 ? rng_() % spread : 0);
    uint64_t at = std::max(now_ + delay, link_last_[{from, msg.to}]);
    link_last_[{from, msg.to}] = at;
    json record = {{"type", "msg"},
                   {"tick", now_},
                   {"kind", message_kind(msg.body)},
                   {"bytes", wire_size(msg.body)},
                   {"from", hex_addr(from)},
                   {"to", hex_addr(msg.to)},
                   {"deliver_at", at}};
    if (const auto* rm = std::get_if<RequestMsg>(&msg.body)) {
        record["method"] = to_string(method_of(rm->req.call));
    } else if (const auto* rs = std::get_if<ResponseMsg>(&msg.body)) {
        record["proof_bytes"] = rs->res.proof.size();
        record["m_b"] = rs->res.m_b;
    }
    trace(std::move(record));
    queue_.push({at, seq_++, from, msg.to, std::move(msg.body)});
}

void SimNet::deliver_due() {
    while (!queue_.empty() && queue_.top().deliver_at <= now_) {
        Envelope env = queue_.top();
        queue_.pop();
        delivered_++;
        for (LightClient* c : clients_)
            if (c->address() == env.to) c->on_message(env.from, env.body, now_);
        for (FullNode* n : nodes_)
            if (n->address() == env.to) n->on_message(env.from, env.body);
        for (Witness* w : witnesses_)
            if (w->address() == env.to) w->on_message(env.body);
    }
}

void SimNet::drain_outboxes() {
    for (LightClient* c : clients_)
        for (Outbound& msg : c->take_outbox()) post(c->address(), std::move(msg));
    for (FullNode* n : nodes_)
        for (Outbound& msg : n->take_outbox()) post(n->address(), std::move(msg));
}

void SimNet::produce_and_broadcast() {
    const Block& blk = chain_->produce_block(now_);
    trace({{"type", "block"},
           {"tick", now_},
           {"height", blk.header.height},
           {"hash", to_hex(blk.hash)},
           {"state_root", to_hex(blk.header.state_root)},
           {"tx_root", to_hex(blk.header.tx_root)},
           {"txs", blk.txs.size()}});
    for (const auto& rec : blk.txs) {
        json r = {{"type", "tx"},
                  {"tick", now_},
                  {"height", blk.header.height},
                  {"kind", tx_kind(rec.tx)},
                  {"sender", hex_addr(rec.tx.sender)},
                  {"result", to_string(rec.result)}};
        if (rec.alpha != 0) r["alpha"] = rec.alpha;
        if (rec.fraud_condition != 0) r["fraud_condition"] = rec.fraud_condition;
        trace(std::move(r));
    }
    for (const auto& s : blk.settlements)
        trace({{"type", "settlement"},
               {"tick", now_},
               {"height", blk.header.height},
               {"alpha", s.alpha},
               {"fn_amount", s.fn_amount},
               {"lc_refund", s.lc_refund}});
    for (const auto& s : blk.slashes)
        trace({{"type", "slash"},
               {"tick", now_},
               {"height", blk.header.height},
               {"fn", hex_addr(s.fn)},
               {"deposit", s.deposit},
               {"share", s.share},
               {"to_treasury", s.to_treasury}});
    bool ok = chain_->total_tokens() == expected_total_;
    conservation_held_ = conservation_held_ && ok;
    trace({{"type", "conservation"},
           {"tick", now_},
           {"height", blk.header.height},
           {"total", chain_->total_tokens()},
           {"ok", ok}});
    for (FullNode* n : nodes_) n->on_block(blk);
    for (LightClient* c : clients_) c->on_block(blk, now_);
}

void SimNet::emit_new_verdicts() {
    while (verdicts_seen_.size() < clients_.size()) verdicts_seen_.push_back(0);
    for (size_t i = 0; i < clients_.size(); ++i) {
        const auto& all = clients_[i]->verdicts();
        for (size_t j = verdicts_seen_[i]; j < all.size(); ++j)
            trace({{"type", "verdict"},
                   {"tick", now_},
                   {"client", hex_addr(clients_[i]->address())},
                   {"verdict", to_string(all[j].verdict)},
                   {"method", to_string(all[j].method)},
                   {"a", all[j].a}});
        verdicts_seen_[i] = all.size();
    }
}

void SimNet::emit_phase_changes() {
    while (phase_seen_.size() < clients_.size()) phase_seen_.push_back(ClientPhase::Idle);
    for (size_t i = 0; i < clients_.size(); ++i) {
        if (clients_[i]->phase() == phase_seen_[i]) continue;
        phase_seen_[i] = clients_[i]->phase();
        trace({{"type", "client_phase"},
               {"tick", now_},
               {"client", hex_addr(clients_[i]->address())},
               {"phase", to_string(phase_seen_[i])}});
    }
}

void SimNet::step(const std::function<void(uint64_t)>& hook) {
    deliver_due();
    if (hook) hook(now_);
    for (LightClient* c : clients_) c->on_tick(now_);
    drain_outboxes();
    if (now_ > 0 && now_ % cfg_.block_interval == 0) {
        produce_and_broadcast();
        drain_outboxes();
    }
    emit_new_verdicts();
    emit_phase_changes();
    now_++;
}

void SimNet::run(uint64_t horizon, const std::function<void(uint64_t)>& hook) {
    while (now_ < horizon) step(hook);
}

}  // namespace parp
