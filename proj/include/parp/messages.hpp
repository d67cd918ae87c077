// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Off-chain message envelopes exchanged between light clients, full nodes
// and witnesses. Only requests and responses have a pinned wire format;
// the remaining envelopes are sized by their field widths so that traffic
// accounting stays meaningful.

#pragma once

#include <cstdint>
#include <variant>

#include "parp/codec.hpp"

namespace parp {

struct FeeSchedule {
    uint64_t get_balance = 1;
    uint64_t send_transaction = 5;
    uint64_t get_channel_status = 0;

    uint64_t fee_for(Method m) const {
        switch (m) {
            case Method::GetBalance: return get_balance;
            case Method::SendTransaction: return send_transaction;
            case Method::GetChannelStatus: return get_channel_status;
        }
        return 0;
    }
};

// Client hails a node it wants to bond with.
struct Handshake {
    Address lc{};
};

// Node agrees to serve: session terms plus the consent signature the
// client needs for the on-chain channel opening.
struct HandshakeConfirm {
    Address fn{};
    uint64_t expiry = 0;
    Signature consent{};
    FeeSchedule fees;
};

// Node acknowledges the opened channel once it appears on chain.
struct ChannelReceipt {
    uint64_t alpha = 0;
    Signature sig{};
};

struct RequestMsg {
    ParpRequest req;
};

struct ResponseMsg {
    ParpResponse res;
};

// Client hands an adjudicable misbehavior record to a witness.
struct FraudProofMsg {
    Bytes req_bytes;
    Bytes res_bytes;
    Bytes header_preimage;
};

using MessageBody = std::variant<Handshake, HandshakeConfirm, ChannelReceipt,
                                 RequestMsg, ResponseMsg, FraudProofMsg>;

size_t wire_size(const MessageBody& body);
const char* message_kind(const MessageBody& body);

}  // namespace parp
