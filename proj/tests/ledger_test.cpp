#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "snft/ledger.hpp"
#include "snft/rng.hpp"
#include "test_support.hpp"

using namespace snft;
using testsupport::Consortium;

namespace {

LedgerStore build_chain(const Consortium& c, size_t blocks, size_t txs_per_block = 3,
                        uint64_t seed = 1) {
    LedgerStore store;
    Rng rng(seed);
    uint64_t t = 0;
    for (size_t h = 0; h < blocks; ++h) {
        std::vector<Transaction> txs;
        for (size_t i = 0; i < txs_per_block; ++i) {
            t += 100;
            const LayerTag layer = (rng.uniform_u64(3) == 0) ? LayerTag::Operational
                                                             : LayerTag::Supervisory;
            txs.push_back(testsupport::make_tx(
                c, "carrier", TxType::SensorBatch, layer,
                "payload-" + std::to_string(h) + "-" + std::to_string(i), t));
        }
        testsupport::append(store, c, std::move(txs), t);
    }
    return store;
}

}  // namespace

TEST(Ledger, GenesisBlock) {
    auto c = testsupport::make_consortium();
    LedgerStore store;
    auto tx = testsupport::make_tx(c, "consignor", TxType::PermitRequest, LayerTag::Supervisory,
                                   "permit", 10);
    const Block& b = testsupport::append(store, c, {tx}, 10);
    EXPECT_EQ(b.height, 0u);
    EXPECT_EQ(b.prev_hash, kZeroDigest);
}

TEST(Ledger, QuorumNotMetWithForgedSignature) {
    auto c = testsupport::make_consortium(3);
    LedgerStore store;
    auto tx = testsupport::make_tx(c, "carrier", TxType::SensorBatch, LayerTag::Supervisory, "p", 1);
    Block b = store.build_block({tx}, "node-0", 1);
    // one valid signature plus one forged: 2-of-3 quorum not met
    const Digest h = b.header_hash();
    const Bytes msg(h.begin(), h.end());
    b.commit_signatures.push_back({"node-0", crypto::sign(c.node_sks.at("node-0"), msg)});
    NodeSignature forged{"node-1", crypto::sign(c.node_sks.at("node-0"), msg)};  // wrong key
    b.commit_signatures.push_back(forged);
    try {
        store.append_block(std::move(b), c.registry, 2, c.node_keys);
        FAIL() << "expected QuorumNotMet";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::QuorumNotMet);
    }
}

TEST(Ledger, HundredAppendsVerify) {
    auto c = testsupport::make_consortium();
    LedgerStore store = build_chain(c, 100);
    EXPECT_FALSE(store.verify_chain().has_value());
}

TEST(Ledger, OperationalInlinePayloadRejected) {
    auto c = testsupport::make_consortium();
    LedgerStore store;
    Transaction tx;
    tx.tx_type = TxType::SensorBatch;
    tx.submitter = "carrier";
    tx.sim_time_ms = 5;
    tx.layer = LayerTag::Operational;
    tx.body = to_bytes("raw payload on ledger");
    EXPECT_THROW(tx.seal(c.sk("carrier")), Error);
}

// Mutation battery: every field-class mutation must be detected at the
// mutated height (or the successor for whole-block forgeries).
TEST(Ledger, TamperDetectionBattery) {
    auto c = testsupport::make_consortium();
    Rng rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        LedgerStore store = build_chain(c, 12, 3, 100 + trial);
        auto& blocks = store.mutable_blocks();
        const size_t h = rng.uniform_u64(blocks.size());
        Block& b = blocks[h];
        const int field = static_cast<int>(rng.uniform_u64(5));
        switch (field) {
            case 0: {  // tx payload / anchor
                Transaction& tx = b.txs[rng.uniform_u64(b.txs.size())];
                if (tx.has_anchor()) std::get<PrivateAnchor>(tx.body).anchor[0] ^= 0x01;
                else std::get<Bytes>(tx.body)[0] ^= 0x01;
                break;
            }
            case 1: b.txs[rng.uniform_u64(b.txs.size())].sim_time_ms += 1; break;
            case 2: b.txs[rng.uniform_u64(b.txs.size())].signature.bytes[5] ^= 0x10; break;
            case 3: b.merkle_root[3] ^= 0x04; break;
            case 4: b.prev_hash[0] ^= 0x80; break;
        }
        const auto violation = store.verify_chain();
        ASSERT_TRUE(violation.has_value()) << "trial " << trial << " field " << field;
        EXPECT_EQ(violation->height, h) << "trial " << trial << " field " << field;
    }
}

TEST(Ledger, PayloadFlipAtHeightSeven) {
    auto c = testsupport::make_consortium();
    LedgerStore store = build_chain(c, 20);
    auto& b = store.mutable_blocks()[7];
    Transaction& tx = b.txs[0];
    if (tx.has_anchor()) std::get<PrivateAnchor>(tx.body).anchor[0] ^= 0x01;
    else std::get<Bytes>(tx.body)[0] ^= 0x01;
    const auto v = store.verify_chain();
    ASSERT_TRUE(v.has_value());
    EXPECT_EQ(v->height, 7u);
    EXPECT_TRUE(v->reason == ChainViolation::TxIdMismatch ||
                v->reason == ChainViolation::MerkleMismatch);
}

// A self-consistent forged block breaks the link to its successor.
TEST(Ledger, SelfConsistentForgery) {
    auto c = testsupport::make_consortium();
    LedgerStore store = build_chain(c, 10);
    auto& blocks = store.mutable_blocks();
    Block forged;
    forged.height = 3;
    forged.prev_hash = blocks[2].header_hash();
    forged.sim_time_ms = blocks[3].sim_time_ms;
    forged.proposer = "node-0";
    forged.txs = {testsupport::make_tx(c, "carrier", TxType::SensorBatch, LayerTag::Supervisory,
                                       "forged content", blocks[3].sim_time_ms)};
    forged.merkle_root = tx_merkle_root(forged.txs);
    blocks[3] = forged;
    const auto v = store.verify_chain();
    ASSERT_TRUE(v.has_value());
    EXPECT_EQ(v->height, 4u);
    EXPECT_EQ(v->reason, ChainViolation::PrevHashMismatch);
}

TEST(Ledger, InclusionProofSweep) {
    auto c = testsupport::make_consortium();
    LedgerStore store = build_chain(c, 20, 4);
    for (const auto& b : store.blocks()) {
        for (const auto& tx : b.txs) {
            const auto ip = store.query_tx(tx.tx_id);
            EXPECT_EQ(ip.height, b.height);
            EXPECT_TRUE(LedgerStore::verify_inclusion(store.blocks()[ip.height], ip));
        }
    }
}

TEST(Ledger, QueryUnknownTx) {
    auto c = testsupport::make_consortium();
    LedgerStore store = build_chain(c, 2);
    Digest unknown{};
    unknown[0] = 0xde;
    try {
        store.query_tx(unknown);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NotFound);
    }
}

TEST(Ledger, DeterministicChains) {
    auto c = testsupport::make_consortium();
    LedgerStore a = build_chain(c, 15, 3, 9);
    LedgerStore b = build_chain(c, 15, 3, 9);
    ASSERT_EQ(a.blocks().size(), b.blocks().size());
    for (size_t i = 0; i < a.blocks().size(); ++i)
        EXPECT_EQ(block_to_json(a.blocks()[i]).dump(), block_to_json(b.blocks()[i]).dump());
}

TEST(Ledger, NdjsonRoundTrip) {
    auto c = testsupport::make_consortium();
    LedgerStore store = build_chain(c, 8);
    const std::string path = std::filesystem::temp_directory_path() / "snft_ledger_test.ndjson";
    save_ledger(store, path);
    LedgerStore loaded = load_ledger(path);
    EXPECT_FALSE(loaded.verify_chain().has_value());
    ASSERT_EQ(loaded.blocks().size(), store.blocks().size());
    for (size_t i = 0; i < store.blocks().size(); ++i)
        EXPECT_EQ(block_to_json(loaded.blocks()[i]).dump(), block_to_json(store.blocks()[i]).dump());
    // loaded index serves queries
    const auto& tx = store.blocks()[2].txs[1];
    EXPECT_TRUE(LedgerStore::verify_inclusion(loaded.blocks()[2], loaded.query_tx(tx.tx_id)));
    std::remove(path.c_str());
}

TEST(Ledger, CommitSignatureMutationDetected) {
    auto c = testsupport::make_consortium();
    LedgerStore store = build_chain(c, 5);
    auto& b = store.mutable_blocks()[2];
    b.commit_signatures[0].sig[0] ^= 0x01;
    EXPECT_LT(LedgerStore::count_valid_commit_sigs(b, c.node_keys), c.node_keys.size());
}
