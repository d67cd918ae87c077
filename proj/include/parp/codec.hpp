// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <variant>

#include "parp/bytes.hpp"
#include "parp/crypto.hpp"
#include "parp/result.hpp"

namespace parp {

enum class CodecError {
    Truncated,
    BadLengthPrefix,
    UnknownMethodTag,
};

const char* to_string(CodecError e);

enum class Method : uint8_t {
    GetBalance = 0x01,
    SendTransaction = 0x02,
    GetChannelStatus = 0x03,
};

const char* to_string(Method m);

struct GetBalanceCall {
    Address address{};
    bool operator==(const GetBalanceCall&) const = default;
};

struct SendTransactionCall {
    Bytes tx;
    bool operator==(const SendTransactionCall&) const = default;
};

struct GetChannelStatusCall {
    uint64_t alpha = 0;
    bool operator==(const GetChannelStatusCall&) const = default;
};

using RpcCall = std::variant<GetBalanceCall, SendTransactionCall, GetChannelStatusCall>;

Method method_of(const RpcCall& call);

// gamma payload: 1-byte method tag followed by method-specific params.
Bytes encode_call(const RpcCall& call);
Result<RpcCall, CodecError> decode_call(ByteView payload);

struct ParpRequest {
    uint64_t alpha = 0;
    Digest h_b{};
    uint64_t a = 0;
    RpcCall call;
    Digest h_req{};
    Signature sigma_a{};
    Signature sigma_req{};
    bool operator==(const ParpRequest&) const = default;
};

struct ParpResponse {
    uint64_t alpha = 0;
    uint64_t m_b = 0;
    uint64_t a = 0;
    Bytes result;
    Bytes proof;
    Digest h_req{};
    Signature sigma_req{};
    Signature sigma_res{};
    bool operator==(const ParpResponse&) const = default;
};

// Fixed-width request fields: alpha(8) + h_b(32) + a(8) + h_req(32) +
// sigma_a(65) + sigma_req(65). The gamma length prefix and payload are
// method overhead, not metadata.
inline constexpr size_t kRequestMetadataBytes = 210;

// Fixed-width response fields: alpha(8) + m_b(8) + a(8) + h_req(32) +
// sigma_req(65) + sigma_res(65).
inline constexpr size_t kResponseMetadataBytes = 186;

Bytes encode_request(const ParpRequest& req);
Result<ParpRequest, CodecError> decode_request(ByteView wire);

Bytes encode_response(const ParpResponse& res);
Result<ParpResponse, CodecError> decode_response(ByteView wire);

// h_req: digest over alpha(8) | h_b(32) | a(8) | gamma exactly as they
// appear on the wire (gamma carries its 4-byte length prefix).
Digest request_digest(uint64_t alpha, const Digest& h_b, uint64_t a, const RpcCall& call);

// h_res: digest over alpha(8) | m_b(8) | a(8) | result | proof | h_req(32)
// | sigma_req(65), with result and proof in wire form (length-prefixed).
// sigma_res is excluded; it signs this digest.
Digest response_digest(const ParpResponse& res);

// Subject of sigma_a: digest over alpha(8) | a(8).
Digest payment_digest(uint64_t alpha, uint64_t a);

// Subject of a handshake consent signature: lc address(20) | expiry(8).
Digest consent_digest(const Address& lc, uint64_t expiry);

// Subject of a channel-open receipt signature: alpha(8).
Digest receipt_digest(uint64_t alpha);

struct BlockHeader {
    Digest parent_hash{};
    uint64_t height = 0;
    Digest state_root{};
    Digest tx_root{};
    uint64_t timestamp = 0;
    bool operator==(const BlockHeader&) const = default;
};

// parent_hash(32) | height(8) | state_root(32) | tx_root(32) | timestamp(8).
inline constexpr size_t kHeaderBytes = 112;

Bytes encode_header(const BlockHeader& h);
Result<BlockHeader, CodecError> decode_header(ByteView wire);
Digest header_hash(const BlockHeader& h);

// Result payloads. Successful shapes are fixed per method: GetBalance an
// 8-byte balance, SendTransaction a 32-byte transaction hash,
// GetChannelStatus a 1-byte channel status. Execution failures use a
// 2-byte marker distinguishable by shape from every success layout.
inline constexpr uint8_t kErrorResultTag = 0xff;

enum class ExecError : uint8_t {
    UnknownAccount = 0x01,
    MalformedTx = 0x02,
    UnknownChannel = 0x03,
};

Bytes ok_balance_result(uint64_t balance);
Bytes ok_txhash_result(const Digest& tx_hash);
Bytes ok_status_result(uint8_t status);
Bytes error_result(ExecError code);
bool is_error_result(ByteView result);

}  // namespace parp
