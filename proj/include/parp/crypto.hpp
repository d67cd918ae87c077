// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <random>

#include "parp/bytes.hpp"

namespace parp {

// 32-byte hash output. One hash family (SHA-256) backs message digests,
// trie node hashes and block hashes.
inline constexpr size_t kDigestBytes = 32;
using Digest = std::array<uint8_t, kDigestBytes>;

// 20-byte account identifier, the last 20 bytes of the digest of the
// public key.
inline constexpr size_t kAddressBytes = 20;
using Address = std::array<uint8_t, kAddressBytes>;

// Recoverable signature: 64-byte (r, s) core plus a 1-byte recovery tag.
inline constexpr size_t kSignatureBytes = 65;
using Signature = std::array<uint8_t, kSignatureBytes>;

struct PrivateKey {
    std::array<uint8_t, 32> secret{};
    bool operator==(const PrivateKey&) const = default;
};

struct Keypair {
    PrivateKey sk;
    Address addr{};
};

// All randomness in the simulator flows through injected engines of this
// type so that a fixed seed reproduces runs byte for byte.
using Rng = std::mt19937_64;

Digest digest(ByteView data);
inline Digest digest(const Bytes& data) { return digest(ByteView{data}); }

// Draws a fresh secp256k1 keypair from the engine. Deterministic for a
// fixed engine state.
Keypair keygen(Rng& rng);

// Recomputes the address for a private key (public point derivation).
Address address_of(const PrivateKey& sk);

// Deterministic ECDSA over the given 32-byte digest. The recovery tag in
// byte 64 lets verifiers recover the signer address without the public key.
Signature sign(const Digest& d, const PrivateKey& sk);

// Returns the unique signer address for (digest, signature), or nullopt if
// the signature is malformed or recovery fails.
std::optional<Address> recover(const Digest& d, const Signature& sig);

std::string to_hex(const Digest& d);
std::string to_hex(const Address& a);

}  // namespace parp
