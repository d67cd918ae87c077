// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#include "parp/trie.hpp"

#include <algorithm>
#include <array>
#include <cassert>

namespace parp {

const char* to_string(TrieError e) {
    switch (e) {
        case TrieError::EmptyKey: return "EmptyKey";
        case TrieError::KeyAbsent: return "KeyAbsent";
    }
    return "?";
}

namespace {

constexpr uint8_t kTagLeaf = 0x01;
constexpr uint8_t kTagExtension = 0x02;
constexpr uint8_t kTagBranch = 0x03;

using Nibbles = std::vector<uint8_t>;

Nibbles to_nibbles(ByteView key) {
    Nibbles out;
    out.reserve(key.size() * 2);
    for (uint8_t b : key) {
        out.push_back(b >> 4);
        out.push_back(b & 0x0f);
    }
    return out;
}

size_t common_prefix(const Nibbles& a, size_t a_from, const Nibbles& b, size_t b_from) {
    size_t n = std::min(a.size() - a_from, b.size() - b_from);
    size_t i = 0;
    while (i < n && a[a_from + i] == b[b_from + i]) ++i;
    return i;
}

}  // namespace

struct TrieNodeRep {
    uint8_t tag;
    Nibbles nibbles;  // leaf suffix / extension shared prefix
    Bytes value;      // leaf value / branch value (when has_value)
    bool has_value = false;
    std::shared_ptr<const TrieNodeRep> child;                       // extension target
    std::array<std::shared_ptr<const TrieNodeRep>, 16> children{};  // branch slots
    Bytes encoding;  // canonical form, fixed at construction
    Digest hash{};
};

namespace {

using Node = TrieNodeRep;
using NodePtr = std::shared_ptr<const Node>;

void put_nibbles(Bytes& out, const Nibbles& n) {
    put_u32(out, static_cast<uint32_t>(n.size()));
    out.insert(out.end(), n.begin(), n.end());
}

void put_value(Bytes& out, const Bytes& v) {
    put_u32(out, static_cast<uint32_t>(v.size()));
    out.insert(out.end(), v.begin(), v.end());
}

NodePtr finalize(Node n) {
    Bytes& e = n.encoding;
    e.push_back(n.tag);
    switch (n.tag) {
        case kTagLeaf:
            put_nibbles(e, n.nibbles);
            put_value(e, n.value);
            break;
        case kTagExtension:
            put_nibbles(e, n.nibbles);
            e.insert(e.end(), n.child->hash.begin(), n.child->hash.end());
            break;
        case kTagBranch: {
            uint16_t bitmap = 0;
            for (int i = 0; i < 16; ++i)
                if (n.children[i]) bitmap |= static_cast<uint16_t>(1u << i);
            put_u16(e, bitmap);
            for (int i = 0; i < 16; ++i)
                if (n.children[i])
                    e.insert(e.end(), n.children[i]->hash.begin(), n.children[i]->hash.end());
            e.push_back(n.has_value ? 1 : 0);
            if (n.has_value) put_value(e, n.value);
            break;
        }
    }
    n.hash = digest(e);
    return std::make_shared<const Node>(std::move(n));
}

NodePtr make_leaf(Nibbles suffix, Bytes value) {
    Node n;
    n.tag = kTagLeaf;
    n.nibbles = std::move(suffix);
    n.value = std::move(value);
    return finalize(std::move(n));
}

NodePtr make_extension(Nibbles prefix, NodePtr child) {
    assert(!prefix.empty() && child);
    Node n;
    n.tag = kTagExtension;
    n.nibbles = std::move(prefix);
    n.child = std::move(child);
    return finalize(std::move(n));
}

NodePtr make_branch(std::array<NodePtr, 16> children, bool has_value, Bytes value) {
    Node n;
    n.tag = kTagBranch;
    n.children = std::move(children);
    n.has_value = has_value;
    if (has_value) n.value = std::move(value);
    return finalize(std::move(n));
}

Nibbles slice(const Nibbles& n, size_t from, size_t count) {
    return Nibbles(n.begin() + from, n.begin() + from + count);
}

Nibbles tail(const Nibbles& n, size_t from) { return Nibbles(n.begin() + from, n.end()); }

NodePtr insert_rec(const NodePtr& node, const Nibbles& key, size_t pos, const Bytes& value) {
    if (!node) return make_leaf(tail(key, pos), value);

    switch (node->tag) {
        case kTagLeaf: {
            size_t c = common_prefix(node->nibbles, 0, key, pos);
            bool same_suffix = c == node->nibbles.size() && pos + c == key.size();
            if (same_suffix) return make_leaf(node->nibbles, value);

            // Split: both residues descend from a fresh branch at depth c.
            std::array<NodePtr, 16> children{};
            bool has_value = false;
            Bytes bvalue;
            if (c == node->nibbles.size()) {
                has_value = true;
                bvalue = node->value;
            } else {
                uint8_t idx = node->nibbles[c];
                children[idx] = make_leaf(slice(node->nibbles, c + 1, node->nibbles.size() - c - 1),
                                          node->value);
            }
            if (pos + c == key.size()) {
                has_value = true;
                bvalue = value;
            } else {
                uint8_t idx = key[pos + c];
                children[idx] = make_leaf(tail(key, pos + c + 1), value);
            }
            NodePtr branch = make_branch(std::move(children), has_value, std::move(bvalue));
            if (c > 0) return make_extension(slice(node->nibbles, 0, c), std::move(branch));
            return branch;
        }
        case kTagExtension: {
            size_t c = common_prefix(node->nibbles, 0, key, pos);
            if (c == node->nibbles.size()) {
                NodePtr child = insert_rec(node->child, key, pos + c, value);
                return make_extension(node->nibbles, std::move(child));
            }

            // Key diverges inside the shared prefix: split the extension.
            std::array<NodePtr, 16> children{};
            bool has_value = false;
            Bytes bvalue;
            uint8_t eidx = node->nibbles[c];
            size_t erest = node->nibbles.size() - c - 1;
            children[eidx] = erest == 0
                                 ? node->child
                                 : make_extension(slice(node->nibbles, c + 1, erest), node->child);
            if (pos + c == key.size()) {
                has_value = true;
                bvalue = value;
            } else {
                uint8_t kidx = key[pos + c];
                children[kidx] = make_leaf(tail(key, pos + c + 1), value);
            }
            NodePtr branch = make_branch(std::move(children), has_value, std::move(bvalue));
            if (c > 0) return make_extension(slice(node->nibbles, 0, c), std::move(branch));
            return branch;
        }
        case kTagBranch: {
            if (pos == key.size()) return make_branch(node->children, true, value);
            uint8_t idx = key[pos];
            std::array<NodePtr, 16> children = node->children;
            children[idx] = insert_rec(children[idx], key, pos + 1, value);
            return make_branch(std::move(children), node->has_value, node->value);
        }
    }
    assert(false && "corrupt node tag");
    return nullptr;
}

}  // namespace

Result<Trie, TrieError> Trie::insert(ByteView key, ByteView value) const {
    if (key.empty()) return TrieError::EmptyKey;
    Nibbles nibs = to_nibbles(key);
    Bytes v(value.begin(), value.end());
    return Trie(insert_rec(root_, nibs, 0, v));
}

std::optional<Bytes> Trie::get(ByteView key) const {
    if (key.empty() || !root_) return std::nullopt;
    Nibbles nibs = to_nibbles(key);
    const Node* node = root_.get();
    size_t pos = 0;
    while (node != nullptr) {
        switch (node->tag) {
            case kTagLeaf: {
                if (nibs.size() - pos == node->nibbles.size() &&
                    std::equal(node->nibbles.begin(), node->nibbles.end(), nibs.begin() + pos))
                    return node->value;
                return std::nullopt;
            }
            case kTagExtension: {
                size_t len = node->nibbles.size();
                if (nibs.size() - pos < len ||
                    !std::equal(node->nibbles.begin(), node->nibbles.end(), nibs.begin() + pos))
                    return std::nullopt;
                pos += len;
                node = node->child.get();
                break;
            }
            case kTagBranch: {
                if (pos == nibs.size())
                    return node->has_value ? std::optional<Bytes>(node->value) : std::nullopt;
                const Node* next = node->children[nibs[pos]].get();
                if (next == nullptr) return std::nullopt;
                ++pos;
                node = next;
                break;
            }
            default:
                return std::nullopt;
        }
    }
    return std::nullopt;
}

Digest Trie::root_hash() const {
    if (!root_) return digest(ByteView{});
    return root_->hash;
}

Result<MerkleProof, TrieError> Trie::prove(ByteView key) const {
    if (key.empty()) return TrieError::EmptyKey;
    if (!root_) return TrieError::KeyAbsent;

    MerkleProof proof;
    proof.key.assign(key.begin(), key.end());
    Nibbles nibs = to_nibbles(key);
    const Node* node = root_.get();
    size_t pos = 0;
    while (node != nullptr) {
        proof.nodes.push_back(node->encoding);
        switch (node->tag) {
            case kTagLeaf: {
                if (nibs.size() - pos == node->nibbles.size() &&
                    std::equal(node->nibbles.begin(), node->nibbles.end(), nibs.begin() + pos)) {
                    proof.value = node->value;
                    return proof;
                }
                return TrieError::KeyAbsent;
            }
            case kTagExtension: {
                size_t len = node->nibbles.size();
                if (nibs.size() - pos < len ||
                    !std::equal(node->nibbles.begin(), node->nibbles.end(), nibs.begin() + pos))
                    return TrieError::KeyAbsent;
                pos += len;
                node = node->child.get();
                break;
            }
            case kTagBranch: {
                if (pos == nibs.size()) {
                    if (!node->has_value) return TrieError::KeyAbsent;
                    proof.value = node->value;
                    return proof;
                }
                const Node* next = node->children[nibs[pos]].get();
                if (next == nullptr) return TrieError::KeyAbsent;
                ++pos;
                node = next;
                break;
            }
            default:
                return TrieError::KeyAbsent;
        }
    }
    return TrieError::KeyAbsent;
}

Bytes encode_proof(const MerkleProof& proof) {
    Bytes out;
    put_u16(out, static_cast<uint16_t>(proof.nodes.size()));
    for (const Bytes& node : proof.nodes) {
        put_u32(out, static_cast<uint32_t>(node.size()));
        out.insert(out.end(), node.begin(), node.end());
    }
    put_u32(out, static_cast<uint32_t>(proof.key.size()));
    out.insert(out.end(), proof.key.begin(), proof.key.end());
    put_u32(out, static_cast<uint32_t>(proof.value.size()));
    out.insert(out.end(), proof.value.begin(), proof.value.end());
    return out;
}

std::optional<MerkleProof> decode_proof(ByteView wire) {
    ByteReader r{wire};
    MerkleProof proof;
    uint16_t count = 0;
    if (!r.get_u16(count)) return std::nullopt;
    proof.nodes.reserve(count);
    for (uint16_t i = 0; i < count; ++i) {
        uint32_t len = 0;
        if (!r.get_u32(len) || len > r.remaining()) return std::nullopt;
        Bytes node;
        if (!r.get_bytes(len, node)) return std::nullopt;
        proof.nodes.push_back(std::move(node));
    }
    uint32_t klen = 0;
    if (!r.get_u32(klen) || klen > r.remaining()) return std::nullopt;
    if (!r.get_bytes(klen, proof.key)) return std::nullopt;
    uint32_t vlen = 0;
    if (!r.get_u32(vlen) || vlen > r.remaining()) return std::nullopt;
    if (!r.get_bytes(vlen, proof.value)) return std::nullopt;
    if (!r.done()) return std::nullopt;
    return proof;
}

namespace {

// Verifier-side node view decoded from untrusted bytes.
struct DecodedNode {
    uint8_t tag = 0;
    Nibbles nibbles;
    Bytes value;
    bool has_value = false;
    Digest child{};
    std::array<std::optional<Digest>, 16> children;
};

std::optional<DecodedNode> decode_node(ByteView wire) {
    ByteReader r{wire};
    DecodedNode n;
    if (!r.get_u8(n.tag)) return std::nullopt;
    switch (n.tag) {
        case kTagLeaf: {
            uint32_t nnib = 0;
            if (!r.get_u32(nnib) || nnib > r.remaining()) return std::nullopt;
            if (!r.get_bytes(nnib, n.nibbles)) return std::nullopt;
            uint32_t vlen = 0;
            if (!r.get_u32(vlen) || vlen > r.remaining()) return std::nullopt;
            if (!r.get_bytes(vlen, n.value)) return std::nullopt;
            break;
        }
        case kTagExtension: {
            uint32_t nnib = 0;
            if (!r.get_u32(nnib) || nnib == 0 || nnib > r.remaining()) return std::nullopt;
            if (!r.get_bytes(nnib, n.nibbles)) return std::nullopt;
            if (!r.get_array(n.child)) return std::nullopt;
            break;
        }
        case kTagBranch: {
            uint16_t bitmap = 0;
            if (!r.get_u16(bitmap)) return std::nullopt;
            for (int i = 0; i < 16; ++i) {
                if ((bitmap & (1u << i)) == 0) continue;
                Digest d;
                if (!r.get_array(d)) return std::nullopt;
                n.children[i] = d;
            }
            uint8_t has_value = 0;
            if (!r.get_u8(has_value) || has_value > 1) return std::nullopt;
            n.has_value = has_value == 1;
            if (n.has_value) {
                uint32_t vlen = 0;
                if (!r.get_u32(vlen) || vlen > r.remaining()) return std::nullopt;
                if (!r.get_bytes(vlen, n.value)) return std::nullopt;
            }
            break;
        }
        default:
            return std::nullopt;
    }
    if (!r.done()) return std::nullopt;
    for (uint8_t nib : n.nibbles)
        if (nib > 0x0f) return std::nullopt;
    return n;
}

}  // namespace

bool verify_proof(const Digest& root, const MerkleProof& proof) {
    if (proof.key.empty() || proof.nodes.empty()) return false;
    Nibbles nibs = to_nibbles(ByteView{proof.key});
    Digest expected = root;
    size_t pos = 0;

    for (size_t i = 0; i < proof.nodes.size(); ++i) {
        const Bytes& bytes = proof.nodes[i];
        if (digest(bytes) != expected) return false;
        auto node = decode_node(ByteView{bytes});
        if (!node) return false;
        bool last = i + 1 == proof.nodes.size();

        switch (node->tag) {
            case kTagLeaf: {
                if (!last) return false;
                if (nibs.size() - pos != node->nibbles.size()) return false;
                if (!std::equal(node->nibbles.begin(), node->nibbles.end(), nibs.begin() + pos))
                    return false;
                return node->value == proof.value;
            }
            case kTagExtension: {
                if (last) return false;
                size_t len = node->nibbles.size();
                if (nibs.size() - pos < len) return false;
                if (!std::equal(node->nibbles.begin(), node->nibbles.end(), nibs.begin() + pos))
                    return false;
                pos += len;
                expected = node->child;
                break;
            }
            case kTagBranch: {
                if (pos == nibs.size()) {
                    if (!last || !node->has_value) return false;
                    return node->value == proof.value;
                }
                if (last) return false;
                const auto& slot = node->children[nibs[pos]];
                if (!slot) return false;
                expected = *slot;
                ++pos;
                break;
            }
            default:
                return false;
        }
    }
    return false;
}

}  // namespace parp
