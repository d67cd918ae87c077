// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

// Test-only oracle: rebuilds a trie root from the complete key set by
// direct recursion over sorted pairs. Shares no code with the incremental
// implementation; encodings are rewritten here from the documented layout.

#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <vector>

#include "parp/bytes.hpp"
#include "parp/crypto.hpp"

namespace oracle {

using parp::Bytes;
using parp::ByteView;
using parp::Digest;
using Nibbles = std::vector<uint8_t>;

inline Nibbles nibbles_of(const Bytes& key) {
    Nibbles out;
    for (uint8_t b : key) {
        out.push_back(b >> 4);
        out.push_back(b & 0x0f);
    }
    return out;
}

struct Pair {
    Nibbles nibs;
    Bytes value;
};

inline Digest leaf_hash(const Nibbles& suffix, const Bytes& value) {
    Bytes e{0x01};
    parp::put_u32(e, static_cast<uint32_t>(suffix.size()));
    e.insert(e.end(), suffix.begin(), suffix.end());
    parp::put_u32(e, static_cast<uint32_t>(value.size()));
    e.insert(e.end(), value.begin(), value.end());
    return parp::digest(e);
}

inline Digest ext_hash(const Nibbles& prefix, const Digest& child) {
    Bytes e{0x02};
    parp::put_u32(e, static_cast<uint32_t>(prefix.size()));
    e.insert(e.end(), prefix.begin(), prefix.end());
    e.insert(e.end(), child.begin(), child.end());
    return parp::digest(e);
}

inline Digest branch_hash(const std::array<std::optional<Digest>, 16>& children,
                          const std::optional<Bytes>& value) {
    Bytes e{0x03};
    uint16_t bitmap = 0;
    for (int i = 0; i < 16; ++i)
        if (children[i]) bitmap |= static_cast<uint16_t>(1u << i);
    parp::put_u16(e, bitmap);
    for (int i = 0; i < 16; ++i)
        if (children[i]) e.insert(e.end(), children[i]->begin(), children[i]->end());
    e.push_back(value ? 1 : 0);
    if (value) {
        parp::put_u32(e, static_cast<uint32_t>(value->size()));
        e.insert(e.end(), value->begin(), value->end());
    }
    return parp::digest(e);
}

Digest build(const std::vector<Pair>& pairs, size_t depth);

inline Digest build_branch(const std::vector<Pair>& pairs, size_t depth) {
    std::optional<Bytes> value;
    std::array<std::vector<Pair>, 16> groups;
    for (const Pair& p : pairs) {
        if (p.nibs.size() == depth) {
            value = p.value;
        } else {
            groups[p.nibs[depth]].push_back(p);
        }
    }
    std::array<std::optional<Digest>, 16> children;
    for (int i = 0; i < 16; ++i)
        if (!groups[i].empty()) children[i] = build(groups[i], depth + 1);
    return branch_hash(children, value);
}

inline Digest build(const std::vector<Pair>& pairs, size_t depth) {
    if (pairs.size() == 1) {
        const Pair& p = pairs.front();
        return leaf_hash(Nibbles(p.nibs.begin() + depth, p.nibs.end()), p.value);
    }
    size_t limit = pairs.front().nibs.size() - depth;
    for (const Pair& p : pairs) limit = std::min(limit, p.nibs.size() - depth);
    size_t common = 0;
    while (common < limit) {
        uint8_t nib = pairs.front().nibs[depth + common];
        bool all = std::all_of(pairs.begin(), pairs.end(),
                               [&](const Pair& p) { return p.nibs[depth + common] == nib; });
        if (!all) break;
        ++common;
    }
    if (common == 0) return build_branch(pairs, depth);
    Nibbles prefix(pairs.front().nibs.begin() + depth,
                   pairs.front().nibs.begin() + depth + common);
    return ext_hash(prefix, build_branch(pairs, depth + common));
}

inline Digest root_of(const std::map<Bytes, Bytes>& kv) {
    if (kv.empty()) return parp::digest(ByteView{});
    std::vector<Pair> pairs;
    for (const auto& [k, v] : kv) pairs.push_back({nibbles_of(k), v});
    return build(pairs, 0);
}

}  // namespace oracle
