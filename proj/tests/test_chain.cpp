// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "parp/chain.hpp"
#include "trie_oracle.hpp"

using namespace parp;

namespace {

struct Fixture {
    Keypair lc;
    Keypair fn;
    Keypair witness;
    Chain chain;

    Fixture()
        : lc(make_kp(1)),
          fn(make_kp(2)),
          witness(make_kp(3)),
          chain(ChainParams{},
                std::map<Address, uint64_t>{{lc.addr, 10000}, {fn.addr, 5000}, {witness.addr, 100}},
                0) {}

    static Keypair make_kp(uint64_t seed) {
        Rng rng(seed);
        return keygen(rng);
    }

    void produce() { chain.produce_block((chain.height() + 1) * 10); }

    void produce_until_height(uint64_t h) {
        while (chain.height() < h) produce();
    }

    Signature consent(uint64_t expiry) const {
        return sign(consent_digest(lc.addr, expiry), fn.sk);
    }

    Signature payment_sig(uint64_t alpha, uint64_t a) const {
        return sign(payment_digest(alpha, a), lc.sk);
    }

    // Deposits the node and opens a channel; returns the assigned alpha.
    uint64_t open(uint64_t budget = 100, uint64_t dep = 3000) {
        chain.submit({fn.addr, DepositTx{dep}});
        chain.submit({lc.addr, OpenChannelTx{fn.addr, chain.height() + 100, consent(chain.height() + 100), budget}});
        produce();
        for (const auto& rec : chain.tip().txs) {
            if (std::holds_alternative<OpenChannelTx>(rec.tx.payload)) {
                REQUIRE(rec.result == TxResult::Accepted);
                return rec.alpha;
            }
        }
        FAIL("open channel record missing");
        return 0;
    }

    ParpRequest make_request(uint64_t alpha, uint64_t a, RpcCall call) const {
        ParpRequest req;
        req.alpha = alpha;
        req.h_b = chain.tip().hash;
        req.a = a;
        req.call = std::move(call);
        req.h_req = request_digest(req.alpha, req.h_b, req.a, req.call);
        req.sigma_a = sign(payment_digest(alpha, a), lc.sk);
        req.sigma_req = sign(req.h_req, lc.sk);
        return req;
    }

    // Honest full-node behavior, reconstructed locally: answer from the
    // block named by m_b with a state-trie proof.
    ParpResponse honest_balance_response(const ParpRequest& req, uint64_t m_b) const {
        const auto& call = std::get<GetBalanceCall>(req.call);
        const Block& blk = chain.block_at(m_b);
        ParpResponse res;
        res.alpha = req.alpha;
        res.m_b = m_b;
        res.a = req.a;
        auto stored = blk.state_trie.get(ByteView{call.address.data(), call.address.size()});
        REQUIRE(stored.has_value());
        res.result = *stored;
        auto proof = blk.state_trie.prove(ByteView{call.address.data(), call.address.size()});
        REQUIRE(proof.ok());
        res.proof = encode_proof(proof.value());
        res.h_req = req.h_req;
        res.sigma_req = req.sigma_req;
        res.sigma_res = sign(response_digest(res), fn.sk);
        return res;
    }

    TxRecord adjudicate(const ParpRequest& req, const ParpResponse& res) {
        Bytes header_bytes;
        if (res.m_b <= chain.height()) header_bytes = encode_header(chain.header_at(res.m_b));
        chain.submit({witness.addr,
                      SubmitFraudProofTx{encode_request(req), encode_response(res), header_bytes}});
        produce();
        for (const auto& rec : chain.tip().txs)
            if (std::holds_alternative<SubmitFraudProofTx>(rec.tx.payload)) return rec;
        FAIL("fraud proof record missing");
        return {};
    }
};

}  // namespace

TEST_CASE("genesis constants are frozen") {
    Fixture f;
    CHECK(to_hex(f.chain.tip().hash) ==
          "215e306b36632c6ff82464502a25f937898fd6c898401a8f0a165e1933e4077c");
    CHECK(to_hex(f.chain.tip().header.state_root) ==
          "779208654a1dd0eac3e8f1b47f888307b3d5e1e99177e422157ef2d8e47b17f4");
    // The state root must be reproducible from first principles.
    std::map<Bytes, Bytes> accounts;
    accounts[Bytes(f.lc.addr.begin(), f.lc.addr.end())] = be64(10000);
    accounts[Bytes(f.fn.addr.begin(), f.fn.addr.end())] = be64(5000);
    accounts[Bytes(f.witness.addr.begin(), f.witness.addr.end())] = be64(100);
    CHECK(f.chain.tip().header.state_root == oracle::root_of(accounts));
    // No genesis transactions: the tx root is the empty-trie sentinel.
    CHECK(to_hex(f.chain.tip().header.tx_root) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(f.chain.height() == 0);
    CHECK(f.chain.total_tokens() == 15100);
}

TEST_CASE("empty blocks extend the chain without touching state") {
    Fixture f;
    Digest genesis_hash = f.chain.tip().hash;
    Digest state_root = f.chain.tip().header.state_root;
    f.produce();
    CHECK(f.chain.height() == 1);
    CHECK(f.chain.tip().header.parent_hash == genesis_hash);
    CHECK(f.chain.tip().header.state_root == state_root);
    CHECK(f.chain.tip().hash != genesis_hash);
    auto lookup = f.chain.height_by_hash(genesis_hash);
    CHECK(lookup.status == Chain::HashLookup::Status::Found);
    CHECK(lookup.height == 0);
}

TEST_CASE("transfers move exact amounts and reject overdrafts") {
    Fixture f;
    f.chain.submit({f.lc.addr, TransferTx{f.fn.addr, 5}});
    f.produce();
    CHECK(f.chain.tip().txs[0].result == TxResult::Accepted);
    CHECK(f.chain.balance(f.lc.addr) == 9995);
    CHECK(f.chain.balance(f.fn.addr) == 5005);

    f.chain.submit({f.witness.addr, TransferTx{f.lc.addr, 101}});
    f.produce();
    CHECK(f.chain.tip().txs[0].result == TxResult::InsufficientBalance);
    CHECK(f.chain.balance(f.witness.addr) == 100);
    CHECK(f.chain.total_tokens() == 15100);
}

TEST_CASE("deposits enforce the minimum and accumulate") {
    Fixture f;
    f.chain.submit({f.fn.addr, DepositTx{999}});
    f.chain.submit({f.fn.addr, DepositTx{1500}});
    f.chain.submit({f.fn.addr, DepositTx{1500}});
    f.chain.submit({f.fn.addr, DepositTx{9999}});
    f.produce();
    const auto& txs = f.chain.tip().txs;
    CHECK(txs[0].result == TxResult::BelowMinimum);
    CHECK(txs[1].result == TxResult::Accepted);
    CHECK(txs[2].result == TxResult::Accepted);
    CHECK(txs[3].result == TxResult::InsufficientBalance);  // only 2000 left
    CHECK(f.chain.deposit(f.fn.addr) == 3000);
    CHECK(f.chain.balance(f.fn.addr) == 2000);
    CHECK(f.chain.total_tokens() == 15100);
}

TEST_CASE("channel opening validates consent, deposit and budget") {
    Fixture f;
    uint64_t expiry = f.chain.height() + 10;

    // No deposit yet.
    f.chain.submit({f.lc.addr, OpenChannelTx{f.fn.addr, expiry, f.consent(expiry), 100}});
    // Consent signed by the wrong key.
    f.chain.submit({f.lc.addr, OpenChannelTx{f.fn.addr, expiry, sign(consent_digest(f.lc.addr, expiry), f.witness.sk), 100}});
    f.produce();
    CHECK(f.chain.tip().txs[0].result == TxResult::NodeNotDeposited);
    CHECK(f.chain.tip().txs[1].result == TxResult::BadConsent);

    f.chain.submit({f.fn.addr, DepositTx{3000}});
    f.produce();

    // Expired consent; then three valid opens to check alpha assignment.
    f.chain.submit({f.lc.addr, OpenChannelTx{f.fn.addr, 1, f.consent(1), 100}});
    f.chain.submit({f.lc.addr, OpenChannelTx{f.fn.addr, expiry, f.consent(expiry), 0}});
    f.chain.submit({f.lc.addr, OpenChannelTx{f.fn.addr, expiry, f.consent(expiry), 100}});
    f.chain.submit({f.lc.addr, OpenChannelTx{f.fn.addr, expiry, f.consent(expiry), 200}});
    f.produce();
    const auto& txs = f.chain.tip().txs;
    CHECK(txs[0].result == TxResult::ConsentExpired);
    CHECK(txs[1].result == TxResult::InsufficientBalance);  // zero budget
    CHECK(txs[2].result == TxResult::Accepted);
    CHECK(txs[2].alpha == 1);
    CHECK(txs[3].result == TxResult::Accepted);
    CHECK(txs[3].alpha == 2);
    CHECK(f.chain.balance(f.lc.addr) == 10000 - 300);
    CHECK(f.chain.channel(1)->status == ChannelStatus::Open);
    CHECK(f.chain.channel(1)->budget == 100);
    CHECK(f.chain.total_tokens() == 15100);
}

TEST_CASE("close, dispute deadline and automatic settlement") {
    Fixture f;
    uint64_t alpha = f.open(100);
    uint64_t close_height = f.chain.height() + 1;
    f.chain.submit({f.fn.addr, CloseChannelTx{alpha, 40, f.payment_sig(alpha, 40)}});
    f.produce();
    const PaymentChannel* chan = f.chain.channel(alpha);
    REQUIRE(chan != nullptr);
    CHECK(chan->status == ChannelStatus::Closing);
    CHECK(chan->cs.a == 40);
    CHECK(chan->dispute_deadline == close_height + 16);

    uint64_t fn_before = f.chain.balance(f.fn.addr);
    uint64_t lc_before = f.chain.balance(f.lc.addr);
    f.produce_until_height(chan->dispute_deadline + 1);
    CHECK(f.chain.channel(alpha)->status == ChannelStatus::Closed);
    CHECK(f.chain.balance(f.fn.addr) == fn_before + 40);
    CHECK(f.chain.balance(f.lc.addr) == lc_before + 60);
    CHECK(f.chain.total_tokens() == 15100);

    // Closed channels are immutable.
    f.chain.submit({f.lc.addr, SubmitStateTx{alpha, 50, f.payment_sig(alpha, 50)}});
    f.produce();
    CHECK(f.chain.tip().txs[0].result == TxResult::NotClosing);
    CHECK(f.chain.channel(alpha)->cs.a == 40);
}

TEST_CASE("close validation: participants, signatures, budget boundary") {
    Fixture f;
    uint64_t alpha = f.open(100);

    f.chain.submit({f.witness.addr, CloseChannelTx{alpha, 10, f.payment_sig(alpha, 10)}});
    f.chain.submit({f.fn.addr, CloseChannelTx{alpha, 101, f.payment_sig(alpha, 101)}});
    f.chain.submit({f.fn.addr, CloseChannelTx{alpha, 10, f.payment_sig(alpha, 11)}});
    f.chain.submit({f.fn.addr, CloseChannelTx{99, 10, f.payment_sig(99, 10)}});
    f.produce();
    const auto& txs = f.chain.tip().txs;
    CHECK(txs[0].result == TxResult::NotParticipant);
    CHECK(txs[1].result == TxResult::OverBudget);
    CHECK(txs[2].result == TxResult::BadPaymentSig);
    CHECK(txs[3].result == TxResult::ChannelUnknown);
    CHECK(f.chain.channel(alpha)->status == ChannelStatus::Open);

    // a = budget exactly is legal; a second close attempt is not.
    f.chain.submit({f.fn.addr, CloseChannelTx{alpha, 100, f.payment_sig(alpha, 100)}});
    f.produce();
    CHECK(f.chain.tip().txs[0].result == TxResult::Accepted);
    f.chain.submit({f.lc.addr, CloseChannelTx{alpha, 100, f.payment_sig(alpha, 100)}});
    f.produce();
    CHECK(f.chain.tip().txs[0].result == TxResult::AlreadyClosing);
}

TEST_CASE("either party may close an unused channel with the empty-state marker") {
    Fixture f;
    uint64_t a1 = f.open(100);
    uint64_t a2 = f.open(50);
    f.chain.submit({f.lc.addr, CloseChannelTx{a1, 0, Signature{}}});
    f.chain.submit({f.fn.addr, CloseChannelTx{a2, 0, Signature{}}});
    f.produce();
    CHECK(f.chain.tip().txs[0].result == TxResult::Accepted);
    CHECK(f.chain.tip().txs[1].result == TxResult::Accepted);
    uint64_t lc_before = f.chain.balance(f.lc.addr);
    f.produce_until_height(f.chain.channel(a2)->dispute_deadline + 1);
    // Full refunds: cs.a stayed 0 on both.
    CHECK(f.chain.balance(f.lc.addr) == lc_before + 150);
    CHECK(f.chain.channel(a1)->status == ChannelStatus::Closed);
    CHECK(f.chain.channel(a2)->status == ChannelStatus::Closed);
}

TEST_CASE("state submission beats a stale close and resets the window") {
    Fixture f;
    uint64_t alpha = f.open(100);

    // Premature submission: channel not closing yet.
    f.chain.submit({f.lc.addr, SubmitStateTx{alpha, 70, f.payment_sig(alpha, 70)}});
    f.produce();
    CHECK(f.chain.tip().txs[0].result == TxResult::NotClosing);

    f.chain.submit({f.fn.addr, CloseChannelTx{alpha, 40, f.payment_sig(alpha, 40)}});
    f.produce();
    uint64_t first_deadline = f.chain.channel(alpha)->dispute_deadline;

    f.produce();
    f.produce();
    uint64_t submit_height = f.chain.height() + 1;
    f.chain.submit({f.lc.addr, SubmitStateTx{alpha, 70, f.payment_sig(alpha, 70)}});
    f.produce();
    CHECK(f.chain.tip().txs[0].result == TxResult::Accepted);
    CHECK(f.chain.channel(alpha)->cs.a == 70);
    CHECK(f.chain.channel(alpha)->dispute_deadline == submit_height + 16);
    CHECK(f.chain.channel(alpha)->dispute_deadline > first_deadline);

    // Stale, forged and over-budget submissions all bounce.
    f.chain.submit({f.lc.addr, SubmitStateTx{alpha, 40, f.payment_sig(alpha, 40)}});
    f.chain.submit({f.lc.addr, SubmitStateTx{alpha, 80, f.payment_sig(alpha, 79)}});
    f.chain.submit({f.lc.addr, SubmitStateTx{alpha, 101, f.payment_sig(alpha, 101)}});
    f.produce();
    CHECK(f.chain.tip().txs[0].result == TxResult::StaleState);
    CHECK(f.chain.tip().txs[1].result == TxResult::BadPaymentSig);
    CHECK(f.chain.tip().txs[2].result == TxResult::OverBudget);
    CHECK(f.chain.channel(alpha)->cs.a == 70);

    uint64_t fn_before = f.chain.balance(f.fn.addr);
    f.produce_until_height(f.chain.channel(alpha)->dispute_deadline + 1);
    CHECK(f.chain.balance(f.fn.addr) == fn_before + 70);
}

TEST_CASE("explicit closure confirmation respects the dispute window") {
    Fixture f;
    uint64_t alpha = f.open(100);
    f.chain.submit({f.lc.addr, CloseChannelTx{alpha, 25, f.payment_sig(alpha, 25)}});
    f.produce();

    f.chain.submit({f.witness.addr, ConfirmClosureTx{alpha}});
    f.chain.submit({f.witness.addr, ConfirmClosureTx{777}});
    f.produce();
    CHECK(f.chain.tip().txs[0].result == TxResult::DisputeWindowOpen);
    CHECK(f.chain.tip().txs[1].result == TxResult::ChannelUnknown);

    f.produce_until_height(f.chain.channel(alpha)->dispute_deadline);
    // Deadline reached but not passed: still open for disputes.
    f.chain.submit({f.witness.addr, ConfirmClosureTx{alpha}});
    f.produce();
    // This block's height exceeds the deadline, so the window has elapsed
    // and the explicit confirmation lands.
    CHECK(f.chain.tip().txs[0].result == TxResult::Accepted);
    CHECK(f.chain.channel(alpha)->status == ChannelStatus::Closed);
    CHECK(f.chain.tip().settlements.size() == 1);
    CHECK(f.chain.tip().settlements[0].fn_amount == 25);
    CHECK(f.chain.tip().settlements[0].lc_refund == 75);
}

TEST_CASE("user transactions land in the tx trie, matching the oracle") {
    Fixture f;
    Rng rng(77);
    std::map<Bytes, Bytes> expected;
    for (uint64_t i = 0; i < 200; ++i) {
        Bytes raw(100);
        for (auto& b : raw) b = static_cast<uint8_t>(rng());
        expected[be_minimal(i)] = raw;
        f.chain.submit({f.lc.addr, UserTx{raw}});
    }
    f.produce();
    const Block& blk = f.chain.tip();
    CHECK(blk.txs.size() == 200);
    CHECK(blk.header.tx_root == oracle::root_of(expected));

    auto proof = blk.tx_trie.prove(ByteView{be_minimal(123)});
    REQUIRE(proof.ok());
    CHECK(verify_proof(blk.header.tx_root, proof.value()));
    CHECK(proof.value().value == expected[be_minimal(123)]);
}

TEST_CASE("honest exchanges survive fraud-proof adjudication") {
    Fixture f;
    uint64_t alpha = f.open(100);
    ParpRequest req = f.make_request(alpha, 1, GetBalanceCall{f.lc.addr});
    ParpResponse res = f.honest_balance_response(req, f.chain.height());
    TxRecord rec = f.adjudicate(req, res);
    CHECK(rec.result == TxResult::ProofRejected);
    CHECK(f.chain.deposit(f.fn.addr) == 3000);
    CHECK(f.chain.channel(alpha)->status == ChannelStatus::Open);
}

TEST_CASE("payment mismatch is slashed and splits the deposit in thirds") {
    Fixture f;
    uint64_t alpha = f.open(100, 3000);
    ParpRequest req = f.make_request(alpha, 5, GetBalanceCall{f.lc.addr});
    ParpResponse res = f.honest_balance_response(req, f.chain.height());
    res.a = 4;  // echoes less than the request committed
    res.sigma_res = sign(response_digest(res), f.fn.sk);

    uint64_t lc_before = f.chain.balance(f.lc.addr);
    uint64_t witness_before = f.chain.balance(f.witness.addr);
    TxRecord rec = f.adjudicate(req, res);
    CHECK(rec.result == TxResult::Accepted);
    CHECK(rec.fraud_condition == 1);
    CHECK(f.chain.deposit(f.fn.addr) == 0);
    CHECK(f.chain.balance(f.lc.addr) == lc_before + 1000);
    CHECK(f.chain.balance(f.witness.addr) == witness_before + 1000);
    CHECK(f.chain.treasury() == 1000);

    const PaymentChannel* chan = f.chain.channel(alpha);
    CHECK(chan->status == ChannelStatus::Closing);
    CHECK(chan->cs.a == 5);  // the fraudulent exchange's a settles the channel
    CHECK(f.chain.total_tokens() == 15100);

    // A slashed node cannot open new channels.
    f.chain.submit({f.lc.addr, OpenChannelTx{f.fn.addr, f.chain.height() + 10,
                                             f.consent(f.chain.height() + 10), 10}});
    f.produce();
    CHECK(f.chain.tip().txs[0].result == TxResult::NodeNotDeposited);
}

TEST_CASE("slash remainder goes to the treasury") {
    Fixture f;
    // Override minimum so a 100-token deposit is eligible.
    Chain chain(ChainParams{16, 100, 256},
                std::map<Address, uint64_t>{{f.lc.addr, 1000}, {f.fn.addr, 1000}, {f.witness.addr, 0}},
                0);
    chain.submit({f.fn.addr, DepositTx{100}});
    uint64_t expiry = 100;
    chain.submit({f.lc.addr, OpenChannelTx{f.fn.addr, expiry, f.consent(expiry), 50}});
    chain.produce_block(10);
    uint64_t alpha = chain.tip().txs[1].alpha;

    ParpRequest req;
    req.alpha = alpha;
    req.h_b = chain.tip().hash;
    req.a = 5;
    req.call = GetChannelStatusCall{alpha};
    req.h_req = request_digest(req.alpha, req.h_b, req.a, req.call);
    req.sigma_a = sign(payment_digest(alpha, 5), f.lc.sk);
    req.sigma_req = sign(req.h_req, f.lc.sk);
    ParpResponse res;
    res.alpha = alpha;
    res.m_b = chain.height();
    res.a = 4;  // mismatch
    res.result = ok_status_result(0);
    res.h_req = req.h_req;
    res.sigma_req = req.sigma_req;
    res.sigma_res = sign(response_digest(res), f.fn.sk);
    chain.submit({f.witness.addr,
                  SubmitFraudProofTx{encode_request(req), encode_response(res), {}}});
    chain.produce_block(20);
    CHECK(chain.tip().txs[0].result == TxResult::Accepted);
    CHECK(chain.balance(f.witness.addr) == 33);
    CHECK(chain.treasury() == 34);  // 33 + remainder 1
    CHECK(chain.deposit(f.fn.addr) == 0);
    CHECK(chain.total_tokens() == 2000);
}

TEST_CASE("stale response height is provable fraud; the boundary is not") {
    Fixture f;
    uint64_t alpha = f.open(100);
    f.produce();
    f.produce();
    uint64_t ref_height = f.chain.height();  // h_b names this block

    // Node answers from one block earlier than the client's reference.
    ParpRequest req = f.make_request(alpha, 1, GetBalanceCall{f.lc.addr});
    ParpResponse stale = f.honest_balance_response(req, ref_height - 1);
    TxRecord rec = f.adjudicate(req, stale);
    CHECK(rec.result == TxResult::Accepted);
    CHECK(rec.fraud_condition == 2);

    // Same height as the reference is explicitly allowed.
    Fixture g;
    uint64_t beta = g.open(100);
    ParpRequest req2 = g.make_request(beta, 1, GetBalanceCall{g.lc.addr});
    ParpResponse even = g.honest_balance_response(req2, g.chain.height());
    CHECK(even.m_b == g.chain.height_by_hash(req2.h_b).height);
    TxRecord rec2 = g.adjudicate(req2, even);
    CHECK(rec2.result == TxResult::ProofRejected);
}

TEST_CASE("tampered results and proofs are provable fraud") {
    Fixture f;
    uint64_t alpha = f.open(100);
    ParpRequest req = f.make_request(alpha, 1, GetBalanceCall{f.lc.addr});

    // Result inflated; the inclusion proof still shows the true balance.
    ParpResponse lied = f.honest_balance_response(req, f.chain.height());
    lied.result = ok_balance_result(999999);
    lied.sigma_res = sign(response_digest(lied), f.fn.sk);
    TxRecord rec = f.adjudicate(req, lied);
    CHECK(rec.result == TxResult::Accepted);
    CHECK(rec.fraud_condition == 3);

    // Garbage proof bytes on a fresh channel.
    Fixture g;
    uint64_t beta = g.open(100);
    ParpRequest req2 = g.make_request(beta, 1, GetBalanceCall{g.lc.addr});
    ParpResponse garbled = g.honest_balance_response(req2, g.chain.height());
    garbled.proof = Bytes{0xde, 0xad};
    garbled.sigma_res = sign(response_digest(garbled), g.fn.sk);
    TxRecord rec2 = g.adjudicate(req2, garbled);
    CHECK(rec2.result == TxResult::Accepted);
    CHECK(rec2.fraud_condition == 3);
}

TEST_CASE("integrity preconditions reject malformed submissions without slashing") {
    Fixture f;
    uint64_t alpha = f.open(100);
    ParpRequest req = f.make_request(alpha, 1, GetBalanceCall{f.lc.addr});
    ParpResponse res = f.honest_balance_response(req, f.chain.height());

    // Undecodable bytes.
    f.chain.submit({f.witness.addr, SubmitFraudProofTx{{0x01}, encode_response(res), {}}});
    // Channel id mismatch between the pair.
    ParpResponse other = res;
    other.alpha = alpha + 1;
    f.chain.submit({f.witness.addr,
                    SubmitFraudProofTx{encode_request(req), encode_response(other), {}}});
    // h_req that does not recompute.
    ParpRequest bad_h = req;
    bad_h.h_req[0] ^= 1;
    f.chain.submit({f.witness.addr,
                    SubmitFraudProofTx{encode_request(bad_h), encode_response(res), {}}});
    // Mix-and-match: an honest response paired with a different request
    // from the same channel must not be adjudicable, or honest nodes could
    // be slashed with recombined exchanges.
    ParpRequest later = f.make_request(alpha, 2, GetBalanceCall{f.lc.addr});
    f.chain.submit({f.witness.addr,
                    SubmitFraudProofTx{encode_request(later), encode_response(res), {}}});
    // Response signed by someone other than the channel's node.
    ParpResponse forged = res;
    forged.a = 0;  // would be fraud if the origin check passed
    forged.sigma_res = sign(response_digest(forged), f.witness.sk);
    f.chain.submit({f.witness.addr,
                    SubmitFraudProofTx{encode_request(req), encode_response(forged), {}}});
    // Unknown channel in a correctly paired exchange.
    ParpRequest ghost = f.make_request(42, 1, GetBalanceCall{f.lc.addr});
    ParpResponse ghost_res = res;
    ghost_res.alpha = 42;
    ghost_res.h_req = ghost.h_req;
    ghost_res.sigma_req = ghost.sigma_req;
    ghost_res.sigma_res = sign(response_digest(ghost_res), f.fn.sk);
    f.chain.submit({f.witness.addr,
                    SubmitFraudProofTx{encode_request(ghost), encode_response(ghost_res), {}}});
    f.produce();

    const auto& txs = f.chain.tip().txs;
    CHECK(txs[0].result == TxResult::RequestIntegrityFail);
    CHECK(txs[1].result == TxResult::RequestIntegrityFail);
    CHECK(txs[2].result == TxResult::RequestIntegrityFail);
    CHECK(txs[3].result == TxResult::RequestIntegrityFail);
    CHECK(txs[4].result == TxResult::OriginMismatch);
    CHECK(txs[5].result == TxResult::ChannelUnknown);
    CHECK(f.chain.deposit(f.fn.addr) == 3000);
    CHECK(f.chain.channel(alpha)->status == ChannelStatus::Open);

    // Closed channels cannot be adjudicated.
    f.chain.submit({f.lc.addr, CloseChannelTx{alpha, 0, Signature{}}});
    f.produce();
    f.produce_until_height(f.chain.channel(alpha)->dispute_deadline + 1);
    REQUIRE(f.chain.channel(alpha)->status == ChannelStatus::Closed);
    ParpResponse fraud = res;
    fraud.a = 0;
    fraud.sigma_res = sign(response_digest(fraud), f.fn.sk);
    TxRecord rec = f.adjudicate(req, fraud);
    CHECK(rec.result == TxResult::ChannelClosed);
}

TEST_CASE("proofs referencing heights outside the recency window are rejected") {
    Fixture f;
    uint64_t alpha = f.open(100);
    ParpRequest req = f.make_request(alpha, 1, GetBalanceCall{f.lc.addr});
    ParpResponse res = f.honest_balance_response(req, f.chain.height());
    uint64_t m_b = res.m_b;

    // Make the response reference a height 257 blocks behind the tip at
    // the moment of adjudication.
    f.produce_until_height(m_b + 257);
    TxRecord rec = f.adjudicate(req, res);
    CHECK(rec.result == TxResult::OutsideWindow);
    CHECK(f.chain.deposit(f.fn.addr) == 3000);

    // 255 behind: adjudicated normally (an honest pair is rejected on the
    // merits, not the window).
    Fixture g;
    uint64_t beta = g.open(100);
    ParpRequest req2 = g.make_request(beta, 1, GetBalanceCall{g.lc.addr});
    ParpResponse res2 = g.honest_balance_response(req2, g.chain.height());
    g.produce_until_height(res2.m_b + 255);
    TxRecord rec2 = g.adjudicate(req2, res2);
    CHECK(rec2.result == TxResult::ProofRejected);

    // A height the chain has not reached yet is equally undecidable.
    Fixture h;
    uint64_t gamma = h.open(100);
    ParpRequest req3 = h.make_request(gamma, 1, GetBalanceCall{h.lc.addr});
    ParpResponse res3 = h.honest_balance_response(req3, h.chain.height());
    res3.m_b = h.chain.height() + 50;
    res3.sigma_res = sign(response_digest(res3), h.fn.sk);
    TxRecord rec3 = h.adjudicate(req3, res3);
    CHECK(rec3.result == TxResult::OutsideWindow);
}

TEST_CASE("hash lookups honor the recency window") {
    Fixture f;
    Digest genesis_hash = f.chain.tip().hash;
    f.produce_until_height(256);
    CHECK(f.chain.height_by_hash(genesis_hash).status == Chain::HashLookup::Status::Found);
    f.produce();
    CHECK(f.chain.height_by_hash(genesis_hash).status ==
          Chain::HashLookup::Status::OutsideWindow);
    Digest unknown{};
    CHECK(f.chain.height_by_hash(unknown).status == Chain::HashLookup::Status::Unknown);
}

TEST_CASE("token conservation and payment monotonicity under random traffic") {
    // 10k randomized transactions, valid and invalid alike; the global
    // token sum must hold after every block and no channel's recorded a
    // may ever decrease.
    std::vector<Keypair> actors;
    std::map<Address, uint64_t> genesis;
    Rng seed_rng(2026);
    for (int i = 0; i < 6; ++i) {
        Rng kr(seed_rng());
        actors.push_back(keygen(kr));
        genesis[actors.back().addr] = 50000;
    }
    Chain chain(ChainParams{8, 1000, 256}, genesis, 0);
    const uint64_t expected_total = 6 * 50000;

    Rng rng(42);
    std::map<uint64_t, uint64_t> last_seen_a;
    const Keypair* lc_of_channel[512] = {};
    int produced = 0;
    for (int t = 0; t < 10000; ++t) {
        const Keypair& actor = actors[rng() % actors.size()];
        const Keypair& other = actors[rng() % actors.size()];
        switch (rng() % 8) {
            case 0:
                chain.submit({actor.addr, TransferTx{other.addr, rng() % 4000}});
                break;
            case 1:
                chain.submit({actor.addr, DepositTx{500 + rng() % 2000}});
                break;
            case 2: {
                uint64_t expiry = chain.height() + rng() % 6;
                Signature consent = sign(consent_digest(actor.addr, expiry), other.sk);
                chain.submit({actor.addr,
                              OpenChannelTx{other.addr, expiry, consent, rng() % 3000}});
                break;
            }
            case 3: {
                uint64_t alpha = 1 + rng() % 40;
                uint64_t a = rng() % 2500;
                const Keypair& signer = (rng() % 4 == 0) ? other : actor;
                chain.submit({actor.addr,
                              CloseChannelTx{alpha, a, sign(payment_digest(alpha, a), signer.sk)}});
                break;
            }
            case 4: {
                uint64_t alpha = 1 + rng() % 40;
                uint64_t a = rng() % 2500;
                const PaymentChannel* chan = chain.channel(alpha);
                const Keypair* signer = &actor;
                if (chan != nullptr && lc_of_channel[alpha % 512] != nullptr && rng() % 2 == 0)
                    signer = lc_of_channel[alpha % 512];
                chain.submit({actor.addr,
                              SubmitStateTx{alpha, a, sign(payment_digest(alpha, a), signer->sk)}});
                break;
            }
            case 5:
                chain.submit({actor.addr, ConfirmClosureTx{1 + rng() % 40}});
                break;
            case 6: {
                Bytes junk(rng() % 64);
                for (auto& b : junk) b = static_cast<uint8_t>(rng());
                chain.submit({actor.addr, SubmitFraudProofTx{junk, junk, junk}});
                break;
            }
            default: {
                Bytes raw(rng() % 120);
                for (auto& b : raw) b = static_cast<uint8_t>(rng());
                chain.submit({actor.addr, UserTx{raw}});
                break;
            }
        }
        if (rng() % 10 == 0 || t + 1 == 10000) {
            const Block& blk = chain.produce_block(++produced * 10);
            for (const auto& rec : blk.txs) {
                if (rec.result == TxResult::Accepted && rec.alpha != 0 && rec.alpha < 512 &&
                    std::holds_alternative<OpenChannelTx>(rec.tx.payload)) {
                    for (const auto& kp : actors)
                        if (kp.addr == rec.tx.sender) lc_of_channel[rec.alpha % 512] = &kp;
                }
            }
            REQUIRE(chain.total_tokens() == expected_total);
            for (const auto& [alpha, chan] : chain.channels()) {
                REQUIRE(chan.cs.a >= last_seen_a[alpha]);
                last_seen_a[alpha] = chan.cs.a;
                REQUIRE(chan.cs.a <= chan.budget);
            }
        }
    }
    CHECK(produced > 500);
}
