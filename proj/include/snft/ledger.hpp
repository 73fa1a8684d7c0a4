#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "snft/bytes.hpp"
#include "snft/crypto.hpp"
#include "snft/error.hpp"
#include "snft/identity.hpp"
#include "snft/layeraccess.hpp"
#include "snft/merkle.hpp"

namespace snft {

enum class TxType {
    PermitRequest,
    PermitApproval,
    SensorBatch,
    Alert,
    Handover,
    Delivery,
    Attestation,
    PublicAggregate,
    AdminPolicy,
};

inline const char* tx_type_name(TxType t) {
    switch (t) {
        case TxType::PermitRequest: return "permit_request";
        case TxType::PermitApproval: return "permit_approval";
        case TxType::SensorBatch: return "sensor_batch";
        case TxType::Alert: return "alert";
        case TxType::Handover: return "handover";
        case TxType::Delivery: return "delivery";
        case TxType::Attestation: return "attestation";
        case TxType::PublicAggregate: return "public_aggregate";
        case TxType::AdminPolicy: return "admin_policy";
    }
    return "unknown";
}

inline TxType tx_type_from_name(std::string_view name) {
    for (TxType t : {TxType::PermitRequest, TxType::PermitApproval, TxType::SensorBatch,
                     TxType::Alert, TxType::Handover, TxType::Delivery, TxType::Attestation,
                     TxType::PublicAggregate, TxType::AdminPolicy})
        if (name == tx_type_name(t)) return t;
    throw Error(Errc::ParseError, "unknown tx type: " + std::string(name));
}

struct Transaction {
    Digest tx_id{};
    TxType tx_type = TxType::AdminPolicy;
    std::string submitter;
    uint64_t sim_time_ms = 0;
    LayerTag layer = LayerTag::Public;
    std::variant<Bytes, PrivateAnchor> body;  // inline payload or anchor
    Signature signature;

    bool has_anchor() const { return std::holds_alternative<PrivateAnchor>(body); }
    const PrivateAnchor& anchor() const { return std::get<PrivateAnchor>(body); }
    const Bytes& inline_payload() const { return std::get<Bytes>(body); }

    // Bytes the submitter signs: everything except tx_id and signature.
    Bytes signing_bytes() const {
        CanonicalWriter w;
        w.field("tx_type", std::string_view(tx_type_name(tx_type)));
        w.field("submitter", std::string_view(submitter));
        w.field_u64("sim_time_ms", sim_time_ms);
        w.field("layer", std::string_view(layer_name(layer)));
        if (has_anchor()) {
            const auto& a = anchor();
            w.field("body_kind", std::string_view("anchor"));
            w.field("anchor", a.anchor);
            w.field("collection_id", std::string_view(a.collection_id));
            std::string orgs;
            for (const auto& o : a.authorized_orgs) orgs += o + ";";
            w.field("authorized_orgs", std::string_view(orgs));
        } else {
            w.field("body_kind", std::string_view("inline"));
            w.field("payload", inline_payload());
        }
        return w.finish();
    }

    // tx_id covers the signature too, so any mutation of a committed tx
    // (payload, timestamp, signer, signature bytes) shifts the id.
    Digest compute_tx_id() const {
        CanonicalWriter w;
        w.field("content", signing_bytes());
        w.field("signer_id", std::string_view(signature.signer_id));
        w.field("sig_bytes", std::span<const uint8_t>(signature.bytes.data(), signature.bytes.size()));
        w.field("sig_over", signature.over);
        return crypto::hash(crypto::Domain::TxId, w.finish());
    }

    void seal(const crypto::SecretKey& sk) {
        if (layer == LayerTag::Operational && !has_anchor())
            throw Error(Errc::InvalidTx, "operational tx body must be an anchor");
        signature = make_signature(signature.signer_id.empty() ? submitter : signature.signer_id,
                                   sk, signing_bytes());
        signature.signer_id = submitter;
        tx_id = compute_tx_id();
    }
};

struct NodeSignature {
    std::string node_id;
    crypto::SignatureBytes sig{};
};

struct Block {
    uint64_t height = 0;
    Digest prev_hash{};
    Digest merkle_root{};
    uint64_t sim_time_ms = 0;
    std::string proposer;
    std::vector<Transaction> txs;
    std::vector<NodeSignature> commit_signatures;

    Bytes header_bytes() const {
        CanonicalWriter w;
        w.field_u64("height", height);
        w.field("prev_hash", prev_hash);
        w.field("merkle_root", merkle_root);
        w.field_u64("sim_time_ms", sim_time_ms);
        w.field("proposer", std::string_view(proposer));
        w.field_u64("tx_count", txs.size());
        return w.finish();
    }

    Digest header_hash() const { return crypto::hash(crypto::Domain::BlockHeader, header_bytes()); }
};

inline Digest tx_merkle_root(const std::vector<Transaction>& txs) {
    if (txs.empty()) throw Error(Errc::EmptyList, "block with zero txs");
    std::vector<Digest> leaves;
    leaves.reserve(txs.size());
    for (const auto& tx : txs) leaves.push_back(merkle::leaf_hash(tx.tx_id));
    return merkle::root(leaves);
}

enum class ChainViolation { PrevHashMismatch, MerkleMismatch, TxIdMismatch };

inline const char* violation_name(ChainViolation v) {
    switch (v) {
        case ChainViolation::PrevHashMismatch: return "PrevHashMismatch";
        case ChainViolation::MerkleMismatch: return "MerkleMismatch";
        case ChainViolation::TxIdMismatch: return "TxIdMismatch";
    }
    return "unknown";
}

struct FirstViolation {
    uint64_t height;
    ChainViolation reason;
};

struct TxLocation {
    uint64_t height;
    size_t offset;
};

struct InclusionProof {
    Transaction tx;
    uint64_t height;
    merkle::Proof proof;
};

// Append-only block store with a tx index. One writer, shared readers
// over the committed prefix.
class LedgerStore {
public:
    Block build_block(std::vector<Transaction> txs, std::string proposer,
                      uint64_t sim_time_ms) const {
        if (txs.empty()) throw Error(Errc::EmptyList, "block with zero txs");
        Block b;
        b.height = blocks_.size();
        b.prev_hash = blocks_.empty() ? kZeroDigest : blocks_.back().header_hash();
        b.merkle_root = tx_merkle_root(txs);
        b.sim_time_ms = sim_time_ms;
        b.proposer = std::move(proposer);
        b.txs = std::move(txs);
        return b;
    }

    // Quorum is validated against the supplied node verification keys;
    // txs are re-authenticated against the registry.
    const Block& append_block(Block block, const Registry& registry, size_t quorum,
                              const std::map<std::string, crypto::PublicKey>& node_keys) {
        if (block.height != blocks_.size() ||
            block.prev_hash != (blocks_.empty() ? kZeroDigest : blocks_.back().header_hash()))
            throw Error(Errc::InvalidTx, "block does not extend the chain");
        for (const auto& tx : block.txs) {
            if (tx.tx_id != tx.compute_tx_id()) throw Error(Errc::InvalidTx, "tx_id mismatch");
            registry.authenticate(tx.signature, tx.signing_bytes());
            if (tx.layer == LayerTag::Operational && !tx.has_anchor())
                throw Error(Errc::InvalidTx, "operational tx carries inline payload");
        }
        if (block.merkle_root != tx_merkle_root(block.txs))
            throw Error(Errc::InvalidTx, "merkle root mismatch");
        if (count_valid_commit_sigs(block, node_keys) < quorum)
            throw Error(Errc::QuorumNotMet, "insufficient valid commit signatures");
        for (size_t i = 0; i < block.txs.size(); ++i)
            tx_index_[to_hex(block.txs[i].tx_id)] = TxLocation{block.height, i};
        blocks_.push_back(std::move(block));
        return blocks_.back();
    }

    static size_t count_valid_commit_sigs(const Block& block,
                                          const std::map<std::string, crypto::PublicKey>& node_keys) {
        const Digest h = block.header_hash();
        const Bytes msg(h.begin(), h.end());
        std::set<std::string> seen;
        for (const auto& ns : block.commit_signatures) {
            auto it = node_keys.find(ns.node_id);
            if (it == node_keys.end()) continue;
            if (!crypto::verify(it->second, msg, ns.sig)) continue;
            seen.insert(ns.node_id);
        }
        return seen.size();
    }

    // Ok iff every prev_hash link, merkle root, and tx id recomputes.
    std::optional<FirstViolation> verify_chain() const {
        Digest expect_prev = kZeroDigest;
        for (const auto& b : blocks_) {
            if (b.prev_hash != expect_prev)
                return FirstViolation{b.height, ChainViolation::PrevHashMismatch};
            for (const auto& tx : b.txs)
                if (tx.tx_id != tx.compute_tx_id())
                    return FirstViolation{b.height, ChainViolation::TxIdMismatch};
            if (b.txs.empty() || b.merkle_root != tx_merkle_root(b.txs))
                return FirstViolation{b.height, ChainViolation::MerkleMismatch};
            expect_prev = b.header_hash();
        }
        return std::nullopt;
    }

    InclusionProof query_tx(const Digest& tx_id) const {
        auto it = tx_index_.find(to_hex(tx_id));
        if (it == tx_index_.end()) throw Error(Errc::NotFound, "tx not in ledger");
        const auto [height, offset] = it->second;
        const Block& b = blocks_[height];
        std::vector<Digest> leaves;
        leaves.reserve(b.txs.size());
        for (const auto& tx : b.txs) leaves.push_back(merkle::leaf_hash(tx.tx_id));
        return InclusionProof{b.txs[offset], height, merkle::prove(leaves, offset)};
    }

    static bool verify_inclusion(const Block& block, const InclusionProof& ip) {
        return merkle::verify(block.merkle_root, merkle::leaf_hash(ip.tx.tx_id), ip.proof);
    }

    const std::vector<Block>& blocks() const { return blocks_; }
    std::vector<Block>& mutable_blocks() { return blocks_; }  // test/tamper hooks only
    size_t tx_count() const { return tx_index_.size(); }

    void rebuild_index() {
        tx_index_.clear();
        for (const auto& b : blocks_)
            for (size_t i = 0; i < b.txs.size(); ++i)
                tx_index_[to_hex(b.txs[i].tx_id)] = TxLocation{b.height, i};
    }

private:
    std::vector<Block> blocks_;
    std::map<std::string, TxLocation> tx_index_;
};

// ---- JSON serialization (one block per NDJSON line, hex digests) ----

inline nlohmann::json tx_to_json(const Transaction& tx) {
    nlohmann::json j;
    j["tx_id"] = to_hex(tx.tx_id);
    j["tx_type"] = tx_type_name(tx.tx_type);
    j["submitter"] = tx.submitter;
    j["sim_time_ms"] = tx.sim_time_ms;
    j["layer"] = layer_name(tx.layer);
    if (tx.has_anchor()) {
        const auto& a = tx.anchor();
        j["body"] = {{"kind", "anchor"},
                     {"anchor", to_hex(a.anchor)},
                     {"collection_id", a.collection_id},
                     {"authorized_orgs", a.authorized_orgs}};
    } else {
        j["body"] = {{"kind", "inline"},
                     {"payload_hex", to_hex(std::span<const uint8_t>(tx.inline_payload().data(),
                                                                     tx.inline_payload().size()))}};
    }
    j["signature"] = {
        {"signer_id", tx.signature.signer_id},
        {"bytes", to_hex(std::span<const uint8_t>(tx.signature.bytes.data(), tx.signature.bytes.size()))},
        {"over", to_hex(tx.signature.over)}};
    return j;
}

inline Transaction tx_from_json(const nlohmann::json& j) {
    Transaction tx;
    tx.tx_id = digest_from_hex(j.at("tx_id").get<std::string>());
    tx.tx_type = tx_type_from_name(j.at("tx_type").get<std::string>());
    tx.submitter = j.at("submitter").get<std::string>();
    tx.sim_time_ms = j.at("sim_time_ms").get<uint64_t>();
    tx.layer = layer_from_name(j.at("layer").get<std::string>());
    const auto& body = j.at("body");
    if (body.at("kind") == "anchor") {
        PrivateAnchor a;
        a.anchor = digest_from_hex(body.at("anchor").get<std::string>());
        a.collection_id = body.at("collection_id").get<std::string>();
        for (const auto& o : body.at("authorized_orgs")) a.authorized_orgs.insert(o.get<std::string>());
        tx.body = std::move(a);
    } else {
        tx.body = from_hex(body.at("payload_hex").get<std::string>());
    }
    const auto& sig = j.at("signature");
    tx.signature.signer_id = sig.at("signer_id").get<std::string>();
    Bytes sb = from_hex(sig.at("bytes").get<std::string>());
    if (sb.size() != tx.signature.bytes.size()) throw Error(Errc::ParseError, "bad signature size");
    std::copy(sb.begin(), sb.end(), tx.signature.bytes.begin());
    tx.signature.over = digest_from_hex(sig.at("over").get<std::string>());
    return tx;
}

inline nlohmann::json block_to_json(const Block& b) {
    nlohmann::json j;
    j["height"] = b.height;
    j["prev_hash"] = to_hex(b.prev_hash);
    j["merkle_root"] = to_hex(b.merkle_root);
    j["sim_time_ms"] = b.sim_time_ms;
    j["proposer"] = b.proposer;
    j["txs"] = nlohmann::json::array();
    for (const auto& tx : b.txs) j["txs"].push_back(tx_to_json(tx));
    j["commit_signatures"] = nlohmann::json::array();
    for (const auto& ns : b.commit_signatures)
        j["commit_signatures"].push_back(
            {{"node_id", ns.node_id},
             {"sig", to_hex(std::span<const uint8_t>(ns.sig.data(), ns.sig.size()))}});
    return j;
}

inline Block block_from_json(const nlohmann::json& j) {
    Block b;
    b.height = j.at("height").get<uint64_t>();
    b.prev_hash = digest_from_hex(j.at("prev_hash").get<std::string>());
    b.merkle_root = digest_from_hex(j.at("merkle_root").get<std::string>());
    b.sim_time_ms = j.at("sim_time_ms").get<uint64_t>();
    b.proposer = j.at("proposer").get<std::string>();
    for (const auto& tj : j.at("txs")) b.txs.push_back(tx_from_json(tj));
    for (const auto& sj : j.at("commit_signatures")) {
        NodeSignature ns;
        ns.node_id = sj.at("node_id").get<std::string>();
        Bytes sb = from_hex(sj.at("sig").get<std::string>());
        if (sb.size() != ns.sig.size()) throw Error(Errc::ParseError, "bad commit sig size");
        std::copy(sb.begin(), sb.end(), ns.sig.begin());
        b.commit_signatures.push_back(ns);
    }
    return b;
}

inline void save_ledger(const LedgerStore& store, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoFailure, "cannot open " + path);
    for (const auto& b : store.blocks()) out << block_to_json(b).dump() << '\n';
}

// Loads without re-verifying; callers run verify_chain on the result.
inline LedgerStore load_ledger(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
    LedgerStore store;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::ParseError, e.what());
        }
        store.mutable_blocks().push_back(block_from_json(j));
    }
    store.rebuild_index();
    return store;
}

}  // namespace snft
