#include <gtest/gtest.h>

#include "snft/merkle.hpp"
#include "snft/rng.hpp"

using namespace snft;

namespace {

// Independent straight-line oracle: recursive definition, written
// against the documented convention (duplicate last node on odd
// levels), sharing nothing with merkle::build_levels.
Digest oracle_root(const std::vector<Digest>& level) {
    if (level.size() == 1) return level[0];
    std::vector<Digest> parents;
    for (size_t i = 0; i < level.size(); i += 2) {
        const Digest& l = level[i];
        const Digest& r = (i + 1 == level.size()) ? level[i] : level[i + 1];
        parents.push_back(crypto::hash2(crypto::Domain::MerkleNode, l, r));
    }
    return oracle_root(parents);
}

std::vector<Digest> random_leaves(size_t n, uint64_t seed) {
    Rng rng(seed);
    std::vector<Digest> leaves;
    for (size_t i = 0; i < n; ++i) {
        Bytes b;
        append_u64le(b, rng.next_u64());
        leaves.push_back(merkle::leaf_hash(std::span<const uint8_t>(b.data(), b.size())));
    }
    return leaves;
}

}  // namespace

TEST(Merkle, SingleLeafRootIsLeaf) {
    auto leaves = random_leaves(1, 1);
    EXPECT_EQ(merkle::root(leaves), leaves[0]);
}

TEST(Merkle, TwoLeaves) {
    auto leaves = random_leaves(2, 2);
    EXPECT_EQ(merkle::root(leaves), crypto::hash2(crypto::Domain::MerkleNode, leaves[0], leaves[1]));
}

TEST(Merkle, EmptyThrows) {
    std::vector<Digest> none;
    EXPECT_THROW(merkle::root(none), Error);
}

TEST(Merkle, OracleComparisonUpTo33Leaves) {
    for (size_t n = 1; n <= 33; ++n) {
        auto leaves = random_leaves(n, 100 + n);
        EXPECT_EQ(merkle::root(leaves), oracle_root(leaves)) << "n=" << n;
    }
}

TEST(Merkle, SevenLeafOracle) {
    auto leaves = random_leaves(7, 7);
    EXPECT_EQ(merkle::root(leaves), oracle_root(leaves));
}

TEST(Merkle, AllProofsVerify) {
    for (size_t n : {1u, 2u, 3u, 5u, 8u, 13u, 20u, 64u, 65u}) {
        auto leaves = random_leaves(n, 500 + n);
        const Digest root = merkle::root(leaves);
        for (size_t i = 0; i < n; ++i) {
            auto proof = merkle::prove(leaves, i);
            EXPECT_TRUE(merkle::verify(root, leaves[i], proof)) << "n=" << n << " i=" << i;
        }
    }
}

TEST(Merkle, WrongLeafFailsProof) {
    auto leaves = random_leaves(9, 9);
    const Digest root = merkle::root(leaves);
    auto proof = merkle::prove(leaves, 4);
    Digest wrong = leaves[4];
    wrong[0] ^= 0xff;
    EXPECT_FALSE(merkle::verify(root, wrong, proof));
}

TEST(Merkle, ForeignLeafFailsProof) {
    auto leaves = random_leaves(9, 10);
    const Digest root = merkle::root(leaves);
    auto proof = merkle::prove(leaves, 2);
    const Digest foreign = random_leaves(1, 777)[0];
    EXPECT_FALSE(merkle::verify(root, foreign, proof));
}

TEST(Merkle, TruncatedProofFails) {
    auto leaves = random_leaves(8, 11);
    const Digest root = merkle::root(leaves);
    auto proof = merkle::prove(leaves, 3);
    proof.siblings.pop_back();
    EXPECT_FALSE(merkle::verify(root, leaves[3], proof));
}
