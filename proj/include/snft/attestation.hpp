#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "snft/crypto.hpp"
#include "snft/error.hpp"
#include "snft/identity.hpp"
#include "snft/merkle.hpp"
#include "snft/rng.hpp"
#include "snft/telemetry.hpp"

namespace snft {

// Salted Merkle commitments plus cut-and-choose statistical audits.
// This stands in for the ZKP layer: statistical soundness, bounded
// leakage of the k opened leaves. The boundary is drawn so a real
// proof system could replace it behind the same claim/commit surface.

struct BatchCommitment {
    Digest root{};
    uint64_t leaf_count = 0;
    Digest salt_seed_commitment{};
};

inline Bytes derive_leaf_salt(const Bytes& salt_seed, uint64_t index) {
    Bytes b = salt_seed;
    append_u64le(b, index);
    const Digest d = crypto::hash(crypto::Domain::LeafSalt, b);
    return Bytes(d.begin(), d.end());
}

inline Digest commitment_leaf(const SensorReading& reading, const Bytes& salt) {
    Bytes b = salt;
    const Bytes canon = reading.canonical_bytes();
    b.insert(b.end(), canon.begin(), canon.end());
    return crypto::hash(crypto::Domain::CommitmentLeaf, b);
}

inline std::vector<Digest> commitment_leaves(const std::vector<SensorReading>& readings,
                                             const Bytes& salt_seed) {
    std::vector<Digest> leaves;
    leaves.reserve(readings.size());
    for (size_t i = 0; i < readings.size(); ++i)
        leaves.push_back(commitment_leaf(readings[i], derive_leaf_salt(salt_seed, i)));
    return leaves;
}

inline BatchCommitment commit_batch(const std::vector<SensorReading>& readings,
                                    const Bytes& salt_seed) {
    if (readings.empty()) throw Error(Errc::EmptyBatch, "commitment over zero readings");
    BatchCommitment c;
    c.root = merkle::root(commitment_leaves(readings, salt_seed));
    c.leaf_count = readings.size();
    c.salt_seed_commitment = crypto::hash(crypto::Domain::SeedCommitment, salt_seed);
    return c;
}

// ---- compliance claims ----

enum class PredicateKind { MaxBelow, AllSealIntact, CountAboveZero };

inline const char* predicate_kind_name(PredicateKind k) {
    switch (k) {
        case PredicateKind::MaxBelow: return "max_below";
        case PredicateKind::AllSealIntact: return "all_seal_intact";
        case PredicateKind::CountAboveZero: return "count_above_zero";
    }
    return "unknown";
}

struct ComplianceClaim {
    std::string shipment_id;
    uint64_t period_start_ms = 0;
    uint64_t period_end_ms = 0;
    PredicateKind predicate = PredicateKind::MaxBelow;
    SensorType sensor = SensorType::Radiation;
    double limit = 0.0;

    // true iff this single reading is consistent with the claim;
    // readings from other sensors are vacuously consistent
    bool holds_for(const SensorReading& r) const {
        switch (predicate) {
            case PredicateKind::AllSealIntact:
                return r.sensor != SensorType::TamperSeal || std::get<bool>(r.value);
            case PredicateKind::MaxBelow:
            case PredicateKind::CountAboveZero: {
                if (r.sensor != sensor) return true;
                auto v = r.numeric();
                return !v || *v <= limit;
            }
        }
        return true;
    }

    Bytes canonical_bytes() const {
        CanonicalWriter w;
        w.field("shipment_id", std::string_view(shipment_id));
        w.field_u64("period_start_ms", period_start_ms);
        w.field_u64("period_end_ms", period_end_ms);
        w.field("predicate", std::string_view(predicate_kind_name(predicate)));
        w.field("sensor", std::string_view(sensor_name(sensor)));
        w.field_f64("limit", limit);
        return w.finish();
    }
};

struct Opening {
    uint64_t index = 0;
    SensorReading reading;
    Bytes salt;
    merkle::Proof path;
};

struct ComplianceAttestation {
    ComplianceClaim claim;
    BatchCommitment commitment;
    std::string attestor_id;
    Signature signature;
    std::vector<Opening> audit_transcript;

    Bytes signing_bytes() const {
        CanonicalWriter w;
        w.field("claim", claim.canonical_bytes());
        w.field("root", commitment.root);
        w.field_u64("leaf_count", commitment.leaf_count);
        w.field("salt_seed_commitment", commitment.salt_seed_commitment);
        w.field("attestor_id", std::string_view(attestor_id));
        return w.finish();
    }
};

// Issues only for true claims; the violating index in ClaimFalse stays
// inside the attestor boundary.
inline ComplianceAttestation attest(const ComplianceClaim& claim,
                                    const std::vector<SensorReading>& readings,
                                    const Bytes& salt_seed, const BatchCommitment& commitment,
                                    const Identity& attestor, const crypto::SecretKey& attestor_sk) {
    if (!is_regulator(attestor.role) && attestor.role != Role::Auditor)
        throw Error(Errc::WrongRole, role_name(attestor.role));
    if (readings.empty()) throw Error(Errc::EmptyBatch, "attest over zero readings");
    const BatchCommitment recomputed = commit_batch(readings, salt_seed);
    if (recomputed.root != commitment.root || recomputed.leaf_count != commitment.leaf_count ||
        recomputed.salt_seed_commitment != commitment.salt_seed_commitment)
        throw Error(Errc::CommitmentMismatch, "commitment does not match readings");
    for (size_t i = 0; i < readings.size(); ++i)
        if (!claim.holds_for(readings[i]))
            throw Error(Errc::ClaimFalse, "violating index " + std::to_string(i));
    ComplianceAttestation att;
    att.claim = claim;
    att.commitment = commitment;
    att.attestor_id = attestor.identity_id;
    att.signature = make_signature(attestor.identity_id, attestor_sk, att.signing_bytes());
    return att;
}

struct AuditOutcome {
    bool passed = false;
    std::optional<uint64_t> failed_index;
    std::vector<Opening> transcript;
};

// Verifier-seeded challenge: k leaf indices drawn without replacement;
// the holder opens each with its salt and Merkle path. Any opening with
// a bad path or a predicate violation fails the audit.
inline AuditOutcome audit_challenge(const ComplianceAttestation& attestation,
                                    const std::vector<SensorReading>& holder_readings,
                                    const Bytes& holder_salt_seed, size_t k,
                                    uint64_t challenge_seed,
                                    const std::vector<Digest>* committed_leaves = nullptr) {
    const uint64_t n = attestation.commitment.leaf_count;
    if (k == 0 || k > n) throw Error(Errc::InvalidSpec, "k out of range");
    if (holder_readings.size() != n)
        throw Error(Errc::CommitmentMismatch, "holder batch size differs from commitment");
    Rng challenge(challenge_seed);
    const auto indices = challenge.sample_without_replacement(n, k);
    // a holder that kept the tree it committed opens paths against it, so
    // only challenged indices whose readings changed can fail; a holder
    // that rebuilt the tree from tampered data fails every opening
    const auto leaves = committed_leaves ? *committed_leaves
                                         : commitment_leaves(holder_readings, holder_salt_seed);

    AuditOutcome out;
    for (size_t idx : indices) {
        Opening open;
        open.index = idx;
        open.reading = holder_readings[idx];
        open.salt = derive_leaf_salt(holder_salt_seed, idx);
        open.path = merkle::prove(leaves, idx);
        // verifier side
        const Digest leaf = commitment_leaf(open.reading, open.salt);
        if (!merkle::verify(attestation.commitment.root, leaf, open.path) ||
            !attestation.claim.holds_for(open.reading)) {
            out.passed = false;
            out.failed_index = idx;
            out.transcript.push_back(std::move(open));
            return out;
        }
        out.transcript.push_back(std::move(open));
    }
    out.passed = true;
    return out;
}

// Re-checks a transcript against the commitment root; used by auditors
// who were not the original verifier.
inline bool verify_transcript(const ComplianceAttestation& attestation) {
    for (const auto& open : attestation.audit_transcript) {
        const Digest leaf = commitment_leaf(open.reading, open.salt);
        if (!merkle::verify(attestation.commitment.root, leaf, open.path)) return false;
        if (!attestation.claim.holds_for(open.reading)) return false;
    }
    return true;
}

inline bool verify_attestation_signature(const ComplianceAttestation& att,
                                         const crypto::PublicKey& attestor_pk) {
    return crypto::verify(attestor_pk, att.signing_bytes(), att.signature.bytes);
}

// ---- public aggregation ----

struct SupervisoryRecord {
    std::string record_id;
    std::string shipment_id;
    std::string kind;             // attestation | alert | handover | delivery | decision
    std::optional<Severity> severity;  // alerts only
    uint64_t sim_time_ms = 0;
    bool on_time = true;          // deliveries only

    Bytes canonical_bytes() const {
        CanonicalWriter w;
        w.field("record_id", std::string_view(record_id));
        w.field("shipment_id", std::string_view(shipment_id));
        w.field("kind", std::string_view(kind));
        w.field("severity", std::string_view(severity ? severity_name(*severity) : ""));
        w.field_u64("sim_time_ms", sim_time_ms);
        w.field_u64("on_time", on_time ? 1 : 0);
        return w.finish();
    }
};

inline Digest supervisory_link(const std::vector<SupervisoryRecord>& records) {
    std::vector<Bytes> canon;
    canon.reserve(records.size());
    for (const auto& r : records) canon.push_back(r.canonical_bytes());
    std::sort(canon.begin(), canon.end());
    Bytes joined;
    for (const auto& c : canon) {
        append_u32le(joined, static_cast<uint32_t>(c.size()));
        joined.insert(joined.end(), c.begin(), c.end());
    }
    return crypto::hash(crypto::Domain::RecordSetLink, joined);
}

// Anonymized by suppression: counts only, no identifiers, plus the
// digest link back to the supervisory record set.
struct PublicAggregate {
    uint64_t period_start_ms = 0;
    uint64_t period_end_ms = 0;
    uint64_t shipment_count = 0;
    std::map<std::string, uint64_t> alert_counts;  // severity name -> count
    double on_time_rate = 1.0;
    bool vacuous = false;  // no deliveries in period; rate reported as 1.0
    Digest supervisory_link_digest{};

    nlohmann::json to_json() const {
        return {{"period_start_ms", period_start_ms},
                {"period_end_ms", period_end_ms},
                {"shipment_count", shipment_count},
                {"alert_counts", alert_counts},
                {"on_time_rate", on_time_rate},
                {"vacuous", vacuous},
                {"supervisory_link", to_hex(supervisory_link_digest)}};
    }
};

inline PublicAggregate aggregate_public(uint64_t period_start_ms, uint64_t period_end_ms,
                                        const std::vector<SupervisoryRecord>& records,
                                        uint64_t now_ms) {
    if (period_end_ms > now_ms) throw Error(Errc::PeriodOpen, "period has not closed");
    PublicAggregate agg;
    agg.period_start_ms = period_start_ms;
    agg.period_end_ms = period_end_ms;
    std::set<std::string> shipments;
    uint64_t deliveries = 0, on_time = 0;
    std::vector<SupervisoryRecord> in_period;
    for (const auto& r : records) {
        if (r.sim_time_ms < period_start_ms || r.sim_time_ms >= period_end_ms) continue;
        in_period.push_back(r);
        shipments.insert(r.shipment_id);
        if (r.kind == "alert" && r.severity) ++agg.alert_counts[severity_name(*r.severity)];
        if (r.kind == "delivery") {
            ++deliveries;
            if (r.on_time) ++on_time;
        }
    }
    agg.shipment_count = shipments.size();
    if (deliveries == 0) {
        agg.on_time_rate = 1.0;
        agg.vacuous = true;
    } else {
        agg.on_time_rate = static_cast<double>(on_time) / static_cast<double>(deliveries);
    }
    agg.supervisory_link_digest = supervisory_link(in_period);
    return agg;
}

inline bool verify_public_trace(const PublicAggregate& aggregate,
                                const std::vector<SupervisoryRecord>& records) {
    PublicAggregate recount;
    try {
        recount = aggregate_public(aggregate.period_start_ms, aggregate.period_end_ms, records,
                                   aggregate.period_end_ms);
    } catch (const Error&) {
        return false;
    }
    return recount.supervisory_link_digest == aggregate.supervisory_link_digest &&
           recount.shipment_count == aggregate.shipment_count &&
           recount.alert_counts == aggregate.alert_counts &&
           recount.on_time_rate == aggregate.on_time_rate && recount.vacuous == aggregate.vacuous;
}

// ---- portable serialization (canonical JSON, hex digests) ----

inline nlohmann::json commitment_to_json(const BatchCommitment& c) {
    return {{"root", to_hex(c.root)},
            {"leaf_count", c.leaf_count},
            {"salt_seed_commitment", to_hex(c.salt_seed_commitment)}};
}

inline BatchCommitment commitment_from_json(const nlohmann::json& j) {
    BatchCommitment c;
    c.root = digest_from_hex(j.at("root").get<std::string>());
    c.leaf_count = j.at("leaf_count").get<uint64_t>();
    c.salt_seed_commitment = digest_from_hex(j.at("salt_seed_commitment").get<std::string>());
    return c;
}

inline nlohmann::json claim_to_json(const ComplianceClaim& c) {
    return {{"shipment_id", c.shipment_id},
            {"period_start_ms", c.period_start_ms},
            {"period_end_ms", c.period_end_ms},
            {"predicate", predicate_kind_name(c.predicate)},
            {"sensor", sensor_name(c.sensor)},
            {"limit", c.limit}};
}

inline ComplianceClaim claim_from_json(const nlohmann::json& j) {
    ComplianceClaim c;
    c.shipment_id = j.at("shipment_id").get<std::string>();
    c.period_start_ms = j.at("period_start_ms").get<uint64_t>();
    c.period_end_ms = j.at("period_end_ms").get<uint64_t>();
    const std::string p = j.at("predicate").get<std::string>();
    if (p == "max_below") c.predicate = PredicateKind::MaxBelow;
    else if (p == "all_seal_intact") c.predicate = PredicateKind::AllSealIntact;
    else if (p == "count_above_zero") c.predicate = PredicateKind::CountAboveZero;
    else throw Error(Errc::ParseError, "unknown predicate " + p);
    c.sensor = sensor_from_name(j.at("sensor").get<std::string>());
    c.limit = j.at("limit").get<double>();
    return c;
}

inline nlohmann::json opening_to_json(const Opening& o) {
    nlohmann::json siblings = nlohmann::json::array();
    for (const auto& s : o.path.siblings) siblings.push_back(to_hex(s));
    return {{"index", o.index},
            {"reading", reading_to_json(o.reading)},
            {"salt", to_hex(std::span<const uint8_t>(o.salt.data(), o.salt.size()))},
            {"path", {{"leaf_index", o.path.leaf_index},
                      {"leaf_count", o.path.leaf_count},
                      {"siblings", siblings}}}};
}

inline Opening opening_from_json(const nlohmann::json& j) {
    Opening o;
    o.index = j.at("index").get<uint64_t>();
    o.reading = reading_from_json(j.at("reading"));
    o.salt = from_hex(j.at("salt").get<std::string>());
    const auto& p = j.at("path");
    o.path.leaf_index = p.at("leaf_index").get<size_t>();
    o.path.leaf_count = p.at("leaf_count").get<size_t>();
    for (const auto& s : p.at("siblings")) o.path.siblings.push_back(digest_from_hex(s.get<std::string>()));
    return o;
}

inline nlohmann::json attestation_to_json(const ComplianceAttestation& a) {
    nlohmann::json transcript = nlohmann::json::array();
    for (const auto& o : a.audit_transcript) transcript.push_back(opening_to_json(o));
    return {{"claim", claim_to_json(a.claim)},
            {"commitment", commitment_to_json(a.commitment)},
            {"attestor_id", a.attestor_id},
            {"signature",
             {{"signer_id", a.signature.signer_id},
              {"bytes", to_hex(std::span<const uint8_t>(a.signature.bytes.data(), a.signature.bytes.size()))},
              {"over", to_hex(a.signature.over)}}},
            {"audit_transcript", transcript}};
}

inline ComplianceAttestation attestation_from_json(const nlohmann::json& j) {
    ComplianceAttestation a;
    a.claim = claim_from_json(j.at("claim"));
    a.commitment = commitment_from_json(j.at("commitment"));
    a.attestor_id = j.at("attestor_id").get<std::string>();
    const auto& sig = j.at("signature");
    a.signature.signer_id = sig.at("signer_id").get<std::string>();
    Bytes sb = from_hex(sig.at("bytes").get<std::string>());
    if (sb.size() != a.signature.bytes.size()) throw Error(Errc::ParseError, "bad signature size");
    std::copy(sb.begin(), sb.end(), a.signature.bytes.begin());
    a.signature.over = digest_from_hex(sig.at("over").get<std::string>());
    for (const auto& oj : j.at("audit_transcript")) a.audit_transcript.push_back(opening_from_json(oj));
    return a;
}

inline std::string aggregate_to_csv(const PublicAggregate& agg) {
    std::string out = "field,value\n";
    out += "period_start_ms," + std::to_string(agg.period_start_ms) + "\n";
    out += "period_end_ms," + std::to_string(agg.period_end_ms) + "\n";
    out += "shipment_count," + std::to_string(agg.shipment_count) + "\n";
    for (const auto& [sev, n] : agg.alert_counts)
        out += "alerts_" + sev + "," + std::to_string(n) + "\n";
    out += "on_time_rate," + std::to_string(agg.on_time_rate) + "\n";
    out += "vacuous," + std::string(agg.vacuous ? "true" : "false") + "\n";
    out += "supervisory_link," + to_hex(agg.supervisory_link_digest) + "\n";
    return out;
}

}  // namespace snft
