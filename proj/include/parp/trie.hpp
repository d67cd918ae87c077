// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "parp/bytes.hpp"
#include "parp/crypto.hpp"
#include "parp/result.hpp"

namespace parp {

enum class TrieError {
    EmptyKey,
    KeyAbsent,
};

const char* to_string(TrieError e);

// Inclusion proof: encoded nodes ordered root to terminal, plus the claimed
// key/value binding. Verification is pure and trusts nothing but the root.
struct MerkleProof {
    std::vector<Bytes> nodes;
    Bytes key;
    Bytes value;
    bool operator==(const MerkleProof&) const = default;
};

// Wire form: u16 node count, each node length-prefixed (u32), then
// length-prefixed key and value.
Bytes encode_proof(const MerkleProof& proof);
std::optional<MerkleProof> decode_proof(ByteView wire);

// Internal node representation, defined in trie.cpp.
struct TrieNodeRep;

// Hexary Merkle Patricia trie over byte-string keys. Snapshots are
// immutable: insert returns a new logical version sharing unchanged
// subtrees, so any held snapshot stays readable forever.
class Trie {
  public:
    Trie() = default;

    // Updated snapshot with key bound to value (overwrites an existing
    // binding). Keys must be non-empty.
    Result<Trie, TrieError> insert(ByteView key, ByteView value) const;

    std::optional<Bytes> get(ByteView key) const;

    // Digest of the root node encoding; the empty trie uses the digest of
    // the empty byte string as its sentinel.
    Digest root_hash() const;

    // Proof for a present key: exactly the nodes on the root-to-terminal
    // path, in order.
    Result<MerkleProof, TrieError> prove(ByteView key) const;

    bool empty() const { return root_ == nullptr; }

  private:
    using NodePtr = std::shared_ptr<const TrieNodeRep>;

    explicit Trie(NodePtr root) : root_(std::move(root)) {}

    NodePtr root_;
};

// True iff the proof's hash chain links root to (key, value). Malformed
// input of any kind yields false, never a crash.
bool verify_proof(const Digest& root, const MerkleProof& proof);

}  // namespace parp
