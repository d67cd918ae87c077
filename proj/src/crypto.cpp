// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "parp/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>
#include <openssl/sha.h>

#include <cassert>
#include <memory>
#include <stdexcept>

namespace parp {

std::string hex_encode(ByteView data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::optional<Bytes> hex_decode(std::string_view hex) {
    if (hex.size() % 2 != 0) return std::nullopt;
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out.push_back(static_cast<uint8_t>((hi << 4) | lo));
    }
    return out;
}

Bytes be_minimal(uint64_t v) {
    Bytes out;
    bool started = false;
    for (int i = 7; i >= 0; --i) {
        uint8_t byte = static_cast<uint8_t>(v >> (8 * i));
        if (byte != 0) started = true;
        if (started) out.push_back(byte);
    }
    if (out.empty()) out.push_back(0x00);
    return out;
}

bool ByteReader::get_u8(uint8_t& out) {
    if (remaining() < 1) return false;
    out = data_[pos_++];
    return true;
}

bool ByteReader::get_u16(uint16_t& out) {
    if (remaining() < 2) return false;
    out = static_cast<uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
    pos_ += 2;
    return true;
}

bool ByteReader::get_u32(uint32_t& out) {
    if (remaining() < 4) return false;
    out = 0;
    for (int i = 0; i < 4; ++i) out = (out << 8) | data_[pos_ + i];
    pos_ += 4;
    return true;
}

bool ByteReader::get_u64(uint64_t& out) {
    if (remaining() < 8) return false;
    out = 0;
    for (int i = 0; i < 8; ++i) out = (out << 8) | data_[pos_ + i];
    pos_ += 8;
    return true;
}

bool ByteReader::get_bytes(size_t n, Bytes& out) {
    if (remaining() < n) return false;
    out.assign(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return true;
}

Digest digest(ByteView data) {
    Digest out;
    SHA256(data.data(), data.size(), out.data());
    return out;
}

std::string to_hex(const Digest& d) { return hex_encode(ByteView{d.data(), d.size()}); }
std::string to_hex(const Address& a) { return hex_encode(ByteView{a.data(), a.size()}); }

namespace {

struct BnDeleter {
    void operator()(BIGNUM* p) const { BN_free(p); }
};
struct BnCtxDeleter {
    void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};
struct PointDeleter {
    void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;
using BnCtxPtr = std::unique_ptr<BN_CTX, BnCtxDeleter>;
using PointPtr = std::unique_ptr<EC_POINT, PointDeleter>;

// secp256k1 group parameters, initialized once. Read-only use of an
// EC_GROUP is thread-safe.
struct Curve {
    EC_GROUP* group;
    BIGNUM* order;        // n
    BIGNUM* field_prime;  // p

    Curve() {
        group = EC_GROUP_new_by_curve_name(NID_secp256k1);
        if (group == nullptr) throw std::runtime_error("secp256k1 unavailable");
        order = BN_new();
        field_prime = BN_new();
        BnCtxPtr ctx(BN_CTX_new());
        EC_GROUP_get_order(group, order, ctx.get());
        EC_GROUP_get_curve(group, field_prime, nullptr, nullptr, ctx.get());
    }
};

const Curve& curve() {
    static const Curve c;
    return c;
}

BnPtr bn_from(ByteView data) {
    return BnPtr(BN_bin2bn(data.data(), static_cast<int>(data.size()), nullptr));
}

void bn_to_32(const BIGNUM* bn, uint8_t* out) {
    int ok = BN_bn2binpad(bn, out, 32);
    assert(ok == 32);
    (void)ok;
}

// Uncompressed public point as X(32) || Y(32); the address is the last 20
// bytes of its digest.
Address address_from_point(const EC_POINT* q, BN_CTX* ctx) {
    BnPtr x(BN_new()), y(BN_new());
    EC_POINT_get_affine_coordinates(curve().group, q, x.get(), y.get(), ctx);
    std::array<uint8_t, 64> xy{};
    bn_to_32(x.get(), xy.data());
    bn_to_32(y.get(), xy.data() + 32);
    Digest h = digest(ByteView{xy.data(), xy.size()});
    Address addr;
    std::copy(h.begin() + 12, h.end(), addr.begin());
    return addr;
}

// Deterministic nonce: SHA256(secret || digest || counter) reduced mod n.
BnPtr derive_nonce(const PrivateKey& sk, const Digest& d, uint8_t counter, BN_CTX* ctx) {
    Bytes seed;
    seed.insert(seed.end(), sk.secret.begin(), sk.secret.end());
    seed.insert(seed.end(), d.begin(), d.end());
    seed.push_back(counter);
    Digest h = digest(seed);
    BnPtr k = bn_from(ByteView{h.data(), h.size()});
    BnPtr reduced(BN_new());
    BN_mod(reduced.get(), k.get(), curve().order, ctx);
    return reduced;
}

}  // namespace

Address address_of(const PrivateKey& sk) {
    BnCtxPtr ctx(BN_CTX_new());
    BnPtr d = bn_from(ByteView{sk.secret.data(), sk.secret.size()});
    PointPtr q(EC_POINT_new(curve().group));
    EC_POINT_mul(curve().group, q.get(), d.get(), nullptr, nullptr, ctx.get());
    return address_from_point(q.get(), ctx.get());
}

Keypair keygen(Rng& rng) {
    // 32 engine-derived bytes reduced into [1, n-1]; never zero.
    std::array<uint8_t, 32> raw;
    for (int i = 0; i < 4; ++i) {
        uint64_t word = rng();
        for (int b = 0; b < 8; ++b) raw[i * 8 + b] = static_cast<uint8_t>(word >> (8 * (7 - b)));
    }
    BnCtxPtr ctx(BN_CTX_new());
    BnPtr v = bn_from(ByteView{raw.data(), raw.size()});
    BnPtr n_minus_1(BN_dup(curve().order));
    BN_sub_word(n_minus_1.get(), 1);
    BnPtr scalar(BN_new());
    BN_mod(scalar.get(), v.get(), n_minus_1.get(), ctx.get());
    BN_add_word(scalar.get(), 1);

    Keypair kp;
    bn_to_32(scalar.get(), kp.sk.secret.data());
    kp.addr = address_of(kp.sk);
    return kp;
}

Signature sign(const Digest& d, const PrivateKey& sk) {
    BnCtxPtr ctx(BN_CTX_new());
    const Curve& c = curve();
    BnPtr z = bn_from(ByteView{d.data(), d.size()});
    BnPtr priv = bn_from(ByteView{sk.secret.data(), sk.secret.size()});
    assert(!BN_is_zero(priv.get()) && BN_cmp(priv.get(), c.order) < 0);

    for (uint8_t counter = 0;; ++counter) {
        BnPtr k = derive_nonce(sk, d, counter, ctx.get());
        if (BN_is_zero(k.get())) continue;

        PointPtr r_point(EC_POINT_new(c.group));
        EC_POINT_mul(c.group, r_point.get(), k.get(), nullptr, nullptr, ctx.get());
        BnPtr rx(BN_new()), ry(BN_new());
        EC_POINT_get_affine_coordinates(c.group, r_point.get(), rx.get(), ry.get(), ctx.get());

        BnPtr r(BN_new());
        BN_mod(r.get(), rx.get(), c.order, ctx.get());
        if (BN_is_zero(r.get())) continue;

        // s = k^-1 (z + r*priv) mod n
        BnPtr s(BN_new());
        BN_mod_mul(s.get(), r.get(), priv.get(), c.order, ctx.get());
        BN_mod_add(s.get(), s.get(), z.get(), c.order, ctx.get());
        BnPtr k_inv(BN_mod_inverse(nullptr, k.get(), c.order, ctx.get()));
        BN_mod_mul(s.get(), s.get(), k_inv.get(), c.order, ctx.get());
        if (BN_is_zero(s.get())) continue;

        uint8_t tag = static_cast<uint8_t>(BN_is_odd(ry.get()) ? 1 : 0);
        if (BN_cmp(rx.get(), c.order) >= 0) tag |= 2;

        Signature sig{};
        bn_to_32(r.get(), sig.data());
        bn_to_32(s.get(), sig.data() + 32);
        sig[64] = tag;
        return sig;
    }
}

std::optional<Address> recover(const Digest& d, const Signature& sig) {
    const uint8_t tag = sig[64];
    if (tag > 3) return std::nullopt;

    BnCtxPtr ctx(BN_CTX_new());
    const Curve& c = curve();
    BnPtr r = bn_from(ByteView{sig.data(), 32});
    BnPtr s = bn_from(ByteView{sig.data() + 32, 32});
    if (BN_is_zero(r.get()) || BN_cmp(r.get(), c.order) >= 0) return std::nullopt;
    if (BN_is_zero(s.get()) || BN_cmp(s.get(), c.order) >= 0) return std::nullopt;

    // Rebuild the ephemeral point R from r and the recovery tag.
    BnPtr x(BN_dup(r.get()));
    if (tag & 2) BN_add(x.get(), x.get(), c.order);
    if (BN_cmp(x.get(), c.field_prime) >= 0) return std::nullopt;
    PointPtr r_point(EC_POINT_new(c.group));
    if (EC_POINT_set_compressed_coordinates(c.group, r_point.get(), x.get(), tag & 1, ctx.get()) != 1) {
        return std::nullopt;
    }

    // Q = r^-1 (s*R - z*G)
    BnPtr z = bn_from(ByteView{d.data(), d.size()});
    BnPtr r_inv(BN_mod_inverse(nullptr, r.get(), c.order, ctx.get()));
    BnPtr u1(BN_new()), u2(BN_new());
    BN_mod_mul(u2.get(), s.get(), r_inv.get(), c.order, ctx.get());
    BN_mod_mul(u1.get(), z.get(), r_inv.get(), c.order, ctx.get());
    BN_mod_sub(u1.get(), c.order, u1.get(), c.order, ctx.get());  // u1 = -z*r^-1

    PointPtr q(EC_POINT_new(c.group));
    if (EC_POINT_mul(c.group, q.get(), u1.get(), r_point.get(), u2.get(), ctx.get()) != 1) {
        return std::nullopt;
    }
    if (EC_POINT_is_at_infinity(c.group, q.get())) return std::nullopt;
    return address_from_point(q.get(), ctx.get());
}

}  // namespace parp
