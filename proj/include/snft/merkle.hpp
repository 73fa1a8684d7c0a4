#pragma once

#include <span>
#include <vector>

#include "snft/crypto.hpp"
#include "snft/error.hpp"

namespace snft::merkle {

// Binary Merkle tree over 32-byte leaf digests. Odd node at any level
// is paired with a duplicate of itself. Leaf and interior nodes hash
// under distinct domains, so a leaf can never be replayed as a node.

inline Digest leaf_hash(std::span<const uint8_t> leaf_bytes) {
    return crypto::hash(crypto::Domain::MerkleLeaf, leaf_bytes);
}

inline Digest leaf_hash(const Digest& d) {
    return crypto::hash(crypto::Domain::MerkleLeaf, std::span<const uint8_t>(d.data(), d.size()));
}

struct Proof {
    size_t leaf_index = 0;
    size_t leaf_count = 0;
    std::vector<Digest> siblings;  // bottom-up
};

// All levels of the tree, level 0 = leaf hashes, last level = {root}.
inline std::vector<std::vector<Digest>> build_levels(std::span<const Digest> leaf_hashes) {
    if (leaf_hashes.empty()) throw Error(Errc::EmptyList, "merkle tree over zero leaves");
    std::vector<std::vector<Digest>> levels;
    levels.emplace_back(leaf_hashes.begin(), leaf_hashes.end());
    while (levels.back().size() > 1) {
        const auto& cur = levels.back();
        std::vector<Digest> next;
        next.reserve((cur.size() + 1) / 2);
        for (size_t i = 0; i < cur.size(); i += 2) {
            const Digest& left = cur[i];
            const Digest& right = (i + 1 < cur.size()) ? cur[i + 1] : cur[i];
            next.push_back(crypto::hash2(crypto::Domain::MerkleNode, left, right));
        }
        levels.push_back(std::move(next));
    }
    return levels;
}

inline Digest root(std::span<const Digest> leaf_hashes) {
    return build_levels(leaf_hashes).back().front();
}

inline Proof prove(std::span<const Digest> leaf_hashes, size_t index) {
    if (index >= leaf_hashes.size()) throw Error(Errc::NotFound, "leaf index out of range");
    auto levels = build_levels(leaf_hashes);
    Proof proof{index, leaf_hashes.size(), {}};
    size_t pos = index;
    for (size_t lvl = 0; lvl + 1 < levels.size(); ++lvl) {
        const auto& cur = levels[lvl];
        size_t sibling = (pos % 2 == 0) ? pos + 1 : pos - 1;
        if (sibling >= cur.size()) sibling = pos;  // odd node pairs with itself
        proof.siblings.push_back(cur[sibling]);
        pos /= 2;
    }
    return proof;
}

inline bool verify(const Digest& expected_root, const Digest& leaf, const Proof& proof) {
    if (proof.leaf_index >= proof.leaf_count) return false;
    Digest acc = leaf;
    size_t pos = proof.leaf_index;
    size_t width = proof.leaf_count;
    for (const Digest& sibling : proof.siblings) {
        if (width <= 1) return false;  // more siblings than levels
        acc = (pos % 2 == 0) ? crypto::hash2(crypto::Domain::MerkleNode, acc, sibling)
                             : crypto::hash2(crypto::Domain::MerkleNode, sibling, acc);
        pos /= 2;
        width = (width + 1) / 2;
    }
    return width == 1 && acc == expected_root;
}

}  // namespace snft::merkle
