// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "parp/codec.hpp"

namespace parp {

const char* to_string(CodecError e) {
    switch (e) {
        case CodecError::Truncated: return "Truncated";
        case CodecError::BadLengthPrefix: return "BadLengthPrefix";
        case CodecError::UnknownMethodTag: return "UnknownMethodTag";
    }
    return "?";
}

const char* to_string(Method m) {
    switch (m) {
        case Method::GetBalance: return "GetBalance";
        case Method::SendTransaction: return "SendTransaction";
        case Method::GetChannelStatus: return "GetChannelStatus";
    }
    return "?";
}

Method method_of(const RpcCall& call) {
    if (std::holds_alternative<GetBalanceCall>(call)) return Method::GetBalance;
    if (std::holds_alternative<SendTransactionCall>(call)) return Method::SendTransaction;
    return Method::GetChannelStatus;
}

Bytes encode_call(const RpcCall& call) {
    Bytes out;
    out.push_back(static_cast<uint8_t>(method_of(call)));
    if (const auto* gb = std::get_if<GetBalanceCall>(&call)) {
        out.insert(out.end(), gb->address.begin(), gb->address.end());
    } else if (const auto* st = std::get_if<SendTransactionCall>(&call)) {
        put_u32(out, static_cast<uint32_t>(st->tx.size()));
        out.insert(out.end(), st->tx.begin(), st->tx.end());
    } else {
        put_u64(out, std::get<GetChannelStatusCall>(call).alpha);
    }
    return out;
}

namespace {

// Decodes an RpcCall from an already-positioned reader. The caller decides
// whether trailing bytes are acceptable.
Result<RpcCall, CodecError> read_call(ByteReader& r) {
    uint8_t tag = 0;
    if (!r.get_u8(tag)) return CodecError::Truncated;
    switch (tag) {
        case static_cast<uint8_t>(Method::GetBalance): {
            GetBalanceCall gb;
            if (!r.get_array(gb.address)) return CodecError::Truncated;
            return RpcCall{gb};
        }
        case static_cast<uint8_t>(Method::SendTransaction): {
            uint32_t len = 0;
            if (!r.get_u32(len)) return CodecError::Truncated;
            if (len > r.remaining()) return CodecError::BadLengthPrefix;
            SendTransactionCall st;
            if (!r.get_bytes(len, st.tx)) return CodecError::Truncated;
            return RpcCall{st};
        }
        case static_cast<uint8_t>(Method::GetChannelStatus): {
            GetChannelStatusCall cs;
            if (!r.get_u64(cs.alpha)) return CodecError::Truncated;
            return RpcCall{cs};
        }
        default:
            return CodecError::UnknownMethodTag;
    }
}

void put_prefixed(Bytes& out, const Bytes& payload) {
    put_u32(out, static_cast<uint32_t>(payload.size()));
    out.insert(out.end(), payload.begin(), payload.end());
}

bool read_prefixed(ByteReader& r, Bytes& out, CodecError& err) {
    uint32_t len = 0;
    if (!r.get_u32(len)) {
        err = CodecError::Truncated;
        return false;
    }
    if (len > r.remaining()) {
        err = CodecError::BadLengthPrefix;
        return false;
    }
    if (!r.get_bytes(len, out)) {
        err = CodecError::Truncated;
        return false;
    }
    return true;
}

}  // namespace

Result<RpcCall, CodecError> decode_call(ByteView payload) {
    ByteReader r{payload};
    auto call = read_call(r);
    if (!call) return call.error();
    if (!r.done()) return CodecError::BadLengthPrefix;
    return call;
}

Bytes encode_request(const ParpRequest& req) {
    Bytes out;
    put_u64(out, req.alpha);
    out.insert(out.end(), req.h_b.begin(), req.h_b.end());
    put_u64(out, req.a);
    put_prefixed(out, encode_call(req.call));
    out.insert(out.end(), req.h_req.begin(), req.h_req.end());
    out.insert(out.end(), req.sigma_a.begin(), req.sigma_a.end());
    out.insert(out.end(), req.sigma_req.begin(), req.sigma_req.end());
    return out;
}

Result<ParpRequest, CodecError> decode_request(ByteView wire) {
    ByteReader r{wire};
    ParpRequest req;
    if (!r.get_u64(req.alpha)) return CodecError::Truncated;
    if (!r.get_array(req.h_b)) return CodecError::Truncated;
    if (!r.get_u64(req.a)) return CodecError::Truncated;

    Bytes gamma;
    CodecError err{};
    if (!read_prefixed(r, gamma, err)) return err;
    auto call = decode_call(gamma);
    if (!call) return call.error();
    req.call = std::move(call).value();

    if (!r.get_array(req.h_req)) return CodecError::Truncated;
    if (!r.get_array(req.sigma_a)) return CodecError::Truncated;
    if (!r.get_array(req.sigma_req)) return CodecError::Truncated;
    if (!r.done()) return CodecError::BadLengthPrefix;
    return req;
}

Bytes encode_response(const ParpResponse& res) {
    Bytes out;
    put_u64(out, res.alpha);
    put_u64(out, res.m_b);
    put_u64(out, res.a);
    put_prefixed(out, res.result);
    put_prefixed(out, res.proof);
    out.insert(out.end(), res.h_req.begin(), res.h_req.end());
    out.insert(out.end(), res.sigma_req.begin(), res.sigma_req.end());
    out.insert(out.end(), res.sigma_res.begin(), res.sigma_res.end());
    return out;
}

Result<ParpResponse, CodecError> decode_response(ByteView wire) {
    ByteReader r{wire};
    ParpResponse res;
    if (!r.get_u64(res.alpha)) return CodecError::Truncated;
    if (!r.get_u64(res.m_b)) return CodecError::Truncated;
    if (!r.get_u64(res.a)) return CodecError::Truncated;

    CodecError err{};
    if (!read_prefixed(r, res.result, err)) return err;
    if (!read_prefixed(r, res.proof, err)) return err;

    if (!r.get_array(res.h_req)) return CodecError::Truncated;
    if (!r.get_array(res.sigma_req)) return CodecError::Truncated;
    if (!r.get_array(res.sigma_res)) return CodecError::Truncated;
    if (!r.done()) return CodecError::BadLengthPrefix;
    return res;
}

Digest request_digest(uint64_t alpha, const Digest& h_b, uint64_t a, const RpcCall& call) {
    Bytes pre;
    put_u64(pre, alpha);
    pre.insert(pre.end(), h_b.begin(), h_b.end());
    put_u64(pre, a);
    put_prefixed(pre, encode_call(call));
    return digest(pre);
}

Digest response_digest(const ParpResponse& res) {
    Bytes pre;
    put_u64(pre, res.alpha);
    put_u64(pre, res.m_b);
    put_u64(pre, res.a);
    put_prefixed(pre, res.result);
    put_prefixed(pre, res.proof);
    pre.insert(pre.end(), res.h_req.begin(), res.h_req.end());
    pre.insert(pre.end(), res.sigma_req.begin(), res.sigma_req.end());
    return digest(pre);
}

Digest payment_digest(uint64_t alpha, uint64_t a) {
    Bytes pre;
    put_u64(pre, alpha);
    put_u64(pre, a);
    return digest(pre);
}

Digest consent_digest(const Address& lc, uint64_t expiry) {
    Bytes pre(lc.begin(), lc.end());
    put_u64(pre, expiry);
    return digest(pre);
}

Digest receipt_digest(uint64_t alpha) { return digest(be64(alpha)); }

Bytes encode_header(const BlockHeader& h) {
    Bytes out;
    out.reserve(kHeaderBytes);
    out.insert(out.end(), h.parent_hash.begin(), h.parent_hash.end());
    put_u64(out, h.height);
    out.insert(out.end(), h.state_root.begin(), h.state_root.end());
    out.insert(out.end(), h.tx_root.begin(), h.tx_root.end());
    put_u64(out, h.timestamp);
    return out;
}

Result<BlockHeader, CodecError> decode_header(ByteView wire) {
    ByteReader r{wire};
    BlockHeader h;
    if (!r.get_array(h.parent_hash)) return CodecError::Truncated;
    if (!r.get_u64(h.height)) return CodecError::Truncated;
    if (!r.get_array(h.state_root)) return CodecError::Truncated;
    if (!r.get_array(h.tx_root)) return CodecError::Truncated;
    if (!r.get_u64(h.timestamp)) return CodecError::Truncated;
    if (!r.done()) return CodecError::BadLengthPrefix;
    return h;
}

Digest header_hash(const BlockHeader& h) { return digest(encode_header(h)); }

Bytes ok_balance_result(uint64_t balance) { return be64(balance); }

Bytes ok_txhash_result(const Digest& tx_hash) { return Bytes(tx_hash.begin(), tx_hash.end()); }

Bytes ok_status_result(uint8_t status) { return Bytes{status}; }

Bytes error_result(ExecError code) { return Bytes{kErrorResultTag, static_cast<uint8_t>(code)}; }

bool is_error_result(ByteView result) {
    return result.size() == 2 && result[0] == kErrorResultTag;
}

}  // namespace parp
