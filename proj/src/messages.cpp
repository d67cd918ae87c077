// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "parp/messages.hpp"

namespace parp {

size_t wire_size(const MessageBody& body) {
    struct Sizer {
        size_t operator()(const Handshake&) const { return kAddressBytes; }
        size_t operator()(const HandshakeConfirm&) const {
            return kAddressBytes + 8 + kSignatureBytes + 3 * 8;
        }
        size_t operator()(const ChannelReceipt&) const { return 8 + kSignatureBytes; }
        size_t operator()(const RequestMsg& m) const { return encode_request(m.req).size(); }
        size_t operator()(const ResponseMsg& m) const { return encode_response(m.res).size(); }
        size_t operator()(const FraudProofMsg& m) const {
            return 3 * 4 + m.req_bytes.size() + m.res_bytes.size() + m.header_preimage.size();
        }
    };
    return std::visit(Sizer{}, body);
}

const char* message_kind(const MessageBody& body) {
    struct Namer {
        const char* operator()(const Handshake&) const { return "handshake"; }
        const char* operator()(const HandshakeConfirm&) const { return "handshake_confirm"; }
        const char* operator()(const ChannelReceipt&) const { return "channel_receipt"; }
        const char* operator()(const RequestMsg&) const { return "request"; }
        const char* operator()(const ResponseMsg&) const { return "response"; }
        const char* operator()(const FraudProofMsg&) const { return "fraud_proof"; }
    };
    return std::visit(Namer{}, body);
}

}  // namespace parp
