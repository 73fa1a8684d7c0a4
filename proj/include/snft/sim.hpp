#pragma once

// End-to-end orchestration: telemetry -> contract validation ->
// consensus ordering -> ledger commit -> attestation -> public
// aggregate. One deterministic pipeline per (config, seed), with all
// artifacts written under a chosen output directory.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "snft/attestation.hpp"
#include "snft/consensus.hpp"
#include "snft/identity.hpp"
#include "snft/layeraccess.hpp"
#include "snft/ledger.hpp"
#include "snft/lifecycle.hpp"
#include "snft/telemetry.hpp"

namespace snft {

struct ConsensusParams {
    int n = 3;
    uint64_t latency_min_ms = 5;
    uint64_t latency_max_ms = 30;
    double drop_rate = 0.0;
};

struct SimulationConfig {
    uint64_t seed = 42;
    ConsensusParams consensus;
    std::vector<RouteScenario> scenarios;
    std::vector<AlertRule> alert_rules = default_alert_rules();
    AccessPolicy policy = AccessPolicy::default_policy();
    uint64_t batch_window_ms = 300'000;     // sensor readings per operational tx
    uint64_t alert_window_ms = 60'000;      // edge aggregation window
    double radiation_limit = 3.0;           // compliance claim: max dose below this
    uint64_t public_release_delay_ms = 60'000;  // period close -> aggregate publication
    uint64_t public_release_sla_ms = 300'000;

    void validate() const {
        if (consensus.n < 3 || consensus.n % 2 == 0)
            throw Error(Errc::ConfigError,
                        "consensus.n must be odd and >= 3, got " + std::to_string(consensus.n));
        if (consensus.latency_min_ms > consensus.latency_max_ms)
            throw Error(Errc::ConfigError, "consensus latency bounds inverted");
        if (scenarios.empty()) throw Error(Errc::ConfigError, "no scenarios configured");
        if (batch_window_ms == 0 || alert_window_ms == 0)
            throw Error(Errc::ConfigError, "windows must be positive");
        if (!policy.total()) throw Error(Errc::ConfigError, "policy is not total over the grid");
        for (const auto& sc : scenarios)
            try {
                sc.validate();
            } catch (const Error& e) {
                throw Error(Errc::ConfigError,
                            "scenario " + sc.shipment_id + ": " + std::string(e.what()));
            }
    }
};

// Registry plus the signing keys the simulator drives. Key seeds live
// in the registry file; this is a simulator, not a key-management tool.
struct SimWorld {
    Registry registry;
    std::map<std::string, crypto::SecretKey> secret_keys;  // identity id -> sk
    std::map<std::string, crypto::PublicKey> node_keys;
    std::map<std::string, crypto::SecretKey> node_sks;

    std::string consignor_id, carrier_id, consignee_id, regulator_id, auditor_id;

    const crypto::SecretKey& sk(const std::string& id) const {
        auto it = secret_keys.find(id);
        if (it == secret_keys.end()) throw Error(Errc::UnknownIdentity, id);
        return it->second;
    }
};

inline SimWorld world_from_json(const nlohmann::json& j) {
    SimWorld w;
    for (const auto& oj : j.at("organizations"))
        w.registry.add_organization({oj.at("org_id").get<std::string>(),
                                     oj.at("name").get<std::string>(),
                                     role_from_name(oj.at("role").get<std::string>()),
                                     {}});
    for (const auto& ij : j.at("identities")) {
        const std::string id = ij.at("identity_id").get<std::string>();
        const Role role = role_from_name(ij.at("role").get<std::string>());
        const auto kp = crypto::keypair_from_seed(
            crypto::sha256(to_bytes(ij.at("key_seed").get<std::string>())));
        w.registry.register_identity(ij.at("org_id").get<std::string>(), role, kp.pk, id);
        w.secret_keys[id] = kp.sk;
        switch (role) {
            case Role::Consignor: w.consignor_id = id; break;
            case Role::Carrier: w.carrier_id = id; break;
            case Role::Consignee: w.consignee_id = id; break;
            case Role::RegulatorNational: w.regulator_id = id; break;
            case Role::Auditor: w.auditor_id = id; break;
            default: break;
        }
    }
    for (const auto& nj : j.at("nodes")) {
        const std::string nid = nj.at("node_id").get<std::string>();
        const auto kp = crypto::keypair_from_seed(
            crypto::sha256(to_bytes(nj.at("key_seed").get<std::string>())));
        w.node_keys[nid] = kp.pk;
        w.node_sks[nid] = kp.sk;
    }
    if (w.consignor_id.empty() || w.carrier_id.empty() || w.consignee_id.empty() ||
        w.regulator_id.empty())
        throw Error(Errc::ConfigError, "registry must name a consignor, carrier, consignee, and "
                                       "national regulator");
    if (w.node_keys.size() < 3) throw Error(Errc::ConfigError, "registry must list >= 3 nodes");
    return w;
}

inline nlohmann::json default_world_json(int nodes = 3) {
    nlohmann::json j;
    j["organizations"] = {
        {{"org_id", "consignor-org"}, {"name", "Consignor"}, {"role", "consignor"}},
        {{"org_id", "carrier-org"}, {"name", "Carrier"}, {"role", "carrier"}},
        {{"org_id", "consignee-org"}, {"name", "Consignee"}, {"role", "consignee"}},
        {{"org_id", "nra-org"}, {"name", "National Regulator"}, {"role", "regulator_national"}},
        {{"org_id", "audit-org"}, {"name", "Auditor"}, {"role", "auditor"}},
    };
    j["identities"] = {
        {{"identity_id", "consignor"}, {"org_id", "consignor-org"}, {"role", "consignor"},
         {"key_seed", "identity:consignor"}},
        {{"identity_id", "carrier"}, {"org_id", "carrier-org"}, {"role", "carrier"},
         {"key_seed", "identity:carrier"}},
        {{"identity_id", "consignee"}, {"org_id", "consignee-org"}, {"role", "consignee"},
         {"key_seed", "identity:consignee"}},
        {{"identity_id", "regulator"}, {"org_id", "nra-org"}, {"role", "regulator_national"},
         {"key_seed", "identity:regulator"}},
        {{"identity_id", "auditor"}, {"org_id", "audit-org"}, {"role", "auditor"},
         {"key_seed", "identity:auditor"}},
    };
    j["nodes"] = nlohmann::json::array();
    for (int i = 0; i < nodes; ++i)
        j["nodes"].push_back({{"node_id", "node-" + std::to_string(i)},
                              {"key_seed", "node:node-" + std::to_string(i)}});
    return j;
}

inline SimWorld default_world(int nodes = 3) { return world_from_json(default_world_json(nodes)); }

struct ShipmentOutcome {
    Shipment shipment;
    std::vector<Alert> alerts;
    bool incident_recorded = false;
    std::optional<ComplianceAttestation> attestation;
    uint64_t delivered_ms = 0;
    bool on_time = true;
};

struct SimulationResult {
    LedgerStore ledger;
    SideStoreSet side_stores;
    std::vector<SupervisoryRecord> supervisory_records;
    PublicAggregate aggregate;
    uint64_t aggregate_release_delay_ms = 0;
    std::map<std::string, ShipmentOutcome> outcomes;
    consensus::SimResult consensus;
    std::vector<std::string> outbox;  // webhook-stub sink: one JSON line per alert
    std::vector<Bytes> operational_probes;  // raw payloads that must never leak
};

namespace detail {

struct PendingTx {
    Transaction tx;
    uint64_t submit_ms = 0;
};

inline Transaction supervisory_tx(const SimWorld& w, const std::string& submitter, TxType type,
                                  const nlohmann::json& payload, uint64_t t_ms) {
    Transaction tx;
    tx.tx_type = type;
    tx.submitter = submitter;
    tx.sim_time_ms = t_ms;
    tx.layer = LayerTag::Supervisory;
    tx.body = to_bytes(payload.dump());
    tx.seal(w.sk(submitter));
    return tx;
}

inline void require_write(const SimulationConfig& cfg, const SimWorld& w, const std::string& id,
                          LayerTag layer, const std::string& shipment_id, bool in_incident) {
    const auto decision = check_access(cfg.policy, w.registry.get(id), layer, Action::Write,
                                       ShipmentContext{shipment_id, in_incident});
    if (!decision.allowed)
        throw Error(Errc::ConfigError, id + " may not write " + layer_name(layer) + ": " +
                                           deny_reason_name(*decision.reason));
}

}  // namespace detail

// Runs the whole pipeline. Deterministic for a fixed (config, world).
inline SimulationResult run_end_to_end(const SimulationConfig& cfg, SimWorld& world) {
    cfg.validate();
    SimulationResult res;
    Rng master(cfg.seed);
    Rng salt_rng = master.fork(1);
    std::vector<detail::PendingTx> pending;
    uint64_t period_end = 0;

    const std::string carrier_org = world.registry.get(world.carrier_id).org_id;
    const std::string regulator_org = world.registry.get(world.regulator_id).org_id;
    const std::string consignee_org = world.registry.get(world.consignee_id).org_id;
    const std::set<std::string> op_orgs = {carrier_org, regulator_org};

    size_t shipment_index = 0;
    for (const auto& sc : cfg.scenarios) {
        const std::string& sid = sc.shipment_id;
        for (const auto& id :
             {world.consignor_id, world.carrier_id, world.consignee_id, world.regulator_id})
            world.registry.assign_shipment(id, sid);

        ShipmentOutcome out;
        Shipment& shp = out.shipment;
        shp.shipment_id = sid;
        shp.consignor_id = world.consignor_id;
        shp.carrier_id = world.carrier_id;
        shp.consignee_id = world.consignee_id;
        shp.regulator_id = world.regulator_id;

        uint64_t t = 0;
        auto push = [&](Transaction tx) {
            const uint64_t at = tx.sim_time_ms;
            pending.push_back({std::move(tx), at});
        };
        auto record = [&](std::string kind, uint64_t at, std::optional<Severity> sev = std::nullopt,
                          bool on_time = true) {
            res.supervisory_records.push_back(
                {sid + "/" + kind + "/" + std::to_string(at), sid, std::move(kind), sev, at,
                 on_time});
        };

        // permit application; the detailed route stays off-ledger
        shp.state = validate_transition(shp, LifecycleEvent::RequestPermit, Role::Consignor);
        detail::require_write(cfg, world, world.consignor_id, LayerTag::Supervisory, sid, false);
        push(detail::supervisory_tx(world, world.consignor_id, TxType::PermitRequest,
                                    {{"shipment_id", sid}, {"action", "request_permit"}}, t));
        nlohmann::json route_json;
        route_json["shipment_id"] = sid;
        route_json["waypoints"] = nlohmann::json::array();
        for (const auto& wp : sc.waypoints)
            route_json["waypoints"].push_back(
                {{"lat", wp.lat}, {"lon", wp.lon}, {"arrival_ms", wp.arrival_ms}});
        const Bytes route_payload = to_bytes(route_json.dump());
        res.operational_probes.push_back(route_payload);
        Bytes route_salt(16);
        for (auto& b : route_salt) b = static_cast<uint8_t>(salt_rng.uniform_u64(256));
        detail::require_write(cfg, world, world.consignor_id, LayerTag::Operational, sid, false);
        const PrivateAnchor route_anchor = res.side_stores.put_private(
            route_payload, route_salt, op_orgs, "route/" + sid);
        {
            Transaction tx;
            tx.tx_type = TxType::PermitRequest;
            tx.submitter = world.consignor_id;
            tx.sim_time_ms = t;
            tx.layer = LayerTag::Operational;
            tx.body = route_anchor;
            tx.seal(world.sk(world.consignor_id));
            push(std::move(tx));
        }
        shp.route_anchor = route_anchor;

        t += 1'000;
        shp.state = validate_transition(shp, LifecycleEvent::ApprovePermit, Role::RegulatorNational);
        {
            Transaction tx = detail::supervisory_tx(
                world, world.regulator_id, TxType::PermitApproval,
                {{"shipment_id", sid}, {"action", "approve_permit"}}, t);
            shp.permit_tx = tx.tx_id;
            push(std::move(tx));
        }
        record("decision", t);

        t += 1'000;
        shp.state = validate_transition(shp, LifecycleEvent::StartTransport, Role::Carrier);
        push(detail::supervisory_tx(world, world.carrier_id, TxType::AdminPolicy,
                                    {{"shipment_id", sid}, {"action", "start_transport"}}, t));

        // telemetry, contract validation, operational batch anchoring
        const auto readings = generate_readings(sc, master.fork(10 + shipment_index).next_u64());
        BatchCursor cursor;
        const uint64_t route_end = sc.end_ms();
        for (uint64_t w0 = 0; w0 <= route_end; w0 += cfg.batch_window_ms) {
            std::vector<SensorReading> chunk;
            for (const auto& r : readings)
                if (r.sim_time_ms >= w0 && r.sim_time_ms < w0 + cfg.batch_window_ms)
                    chunk.push_back(r);
            if (chunk.empty()) continue;
            if (const auto rej = validate_sensor_batch(chunk, world.registry.get(world.carrier_id),
                                                       sid, cursor))
                throw Error(Errc::InvalidTx, std::string("generated batch rejected: ") +
                                                 batch_reject_name(*rej));
            const auto summaries = edge_aggregate(chunk, cfg.alert_window_ms, cfg.alert_rules);
            t = std::max(t + 1, std::min(w0 + cfg.batch_window_ms, route_end));
            detail::require_write(cfg, world, world.carrier_id, LayerTag::Operational, sid,
                                  shp.state == ShipmentState::Incident);
            Transaction tx = package_batch(chunk, summaries, world.registry.get(world.carrier_id),
                                           world.sk(world.carrier_id), sid, op_orgs,
                                           res.side_stores, salt_rng, t);
            if (const auto* e = res.side_stores.fetch(carrier_org, tx.anchor().anchor))
                res.operational_probes.push_back(e->payload);
            push(std::move(tx));

            // alerts fire off the summaries; critical ones open an incident
            for (const auto& alert : evaluate_alerts(summaries, cfg.alert_rules)) {
                out.alerts.push_back(alert);
                t += 1;
                push(detail::supervisory_tx(world, world.carrier_id, TxType::Alert,
                                            alert_to_json(alert), t));
                record("alert", alert.triggered_ms, alert.severity);
                res.outbox.push_back(alert_to_json(alert).dump());
                if (alert.severity == Severity::Critical &&
                    shp.state == ShipmentState::InTransit) {
                    shp.state =
                        validate_transition(shp, LifecycleEvent::CriticalAlert, Role::Carrier);
                    out.incident_recorded = true;
                    shp.open_alerts.insert(alert.alert_id);
                }
            }
            if (shp.state == ShipmentState::Incident) {
                t += 1;
                shp.state = validate_transition(shp, LifecycleEvent::ClearIncident,
                                                Role::RegulatorNational);
                shp.open_alerts.clear();
                push(detail::supervisory_tx(
                    world, world.regulator_id, TxType::AdminPolicy,
                    {{"shipment_id", sid}, {"action", "clear_incident"}}, t));
                record("decision", t);
            }
        }

        // dual-signed handover to the consignee
        t = std::max(t + 1, route_end + 1'000);
        shp.state = validate_transition(shp, LifecycleEvent::BeginHandover, Role::Carrier);
        HandoverRecord handover;
        handover.shipment_id = sid;
        handover.from_id = world.carrier_id;
        handover.to_id = world.consignee_id;
        {
            nlohmann::json details = {{"shipment_id", sid},
                                      {"lat", sc.waypoints.back().lat},
                                      {"lon", sc.waypoints.back().lon},
                                      {"handover_ms", t}};
            const Bytes payload = to_bytes(details.dump());
            res.operational_probes.push_back(payload);
            Bytes salt(16);
            for (auto& b : salt) b = static_cast<uint8_t>(salt_rng.uniform_u64(256));
            handover.details_anchor = res.side_stores.put_private(
                payload, salt, {carrier_org, consignee_org, regulator_org}, "handover/" + sid);
        }
        const Bytes handover_msg = handover.signing_bytes();
        record_handover(handover, world.carrier_id,
                        make_signature(world.carrier_id, world.sk(world.carrier_id), handover_msg),
                        world.registry, shp.state, t);
        t += 500;
        record_handover(handover, world.consignee_id,
                        make_signature(world.consignee_id, world.sk(world.consignee_id),
                                       handover_msg),
                        world.registry, shp.state, t);
        push(detail::supervisory_tx(world, world.consignee_id, TxType::Handover,
                                    handover_confirmation_payload(handover), t));
        record("handover", t);

        shp.state =
            validate_transition(shp, LifecycleEvent::CompleteHandoverDelivery, Role::Consignee);
        out.delivered_ms = t;
        out.on_time = t <= route_end + 60'000;
        push(detail::supervisory_tx(world, world.consignee_id, TxType::Delivery,
                                    {{"shipment_id", sid},
                                     {"delivered_ms", t},
                                     {"on_time", out.on_time}},
                                    t));
        record("delivery", t, std::nullopt, out.on_time);

        // compliance attestation over the dose record
        std::vector<SensorReading> dose;
        for (const auto& r : readings)
            if (r.sensor == SensorType::Radiation) dose.push_back(r);
        if (!dose.empty()) {
            Bytes salt_seed(32);
            for (auto& b : salt_seed) b = static_cast<uint8_t>(salt_rng.uniform_u64(256));
            const auto commitment = commit_batch(dose, salt_seed);
            ComplianceClaim claim;
            claim.shipment_id = sid;
            claim.period_start_ms = 0;
            claim.period_end_ms = route_end + 1;
            claim.predicate = PredicateKind::MaxBelow;
            claim.sensor = SensorType::Radiation;
            claim.limit = cfg.radiation_limit;
            t += 500;
            try {
                ComplianceAttestation att =
                    attest(claim, dose, salt_seed, commitment,
                           world.registry.get(world.regulator_id), world.sk(world.regulator_id));
                att.audit_transcript =
                    audit_challenge(att, dose, salt_seed,
                                    std::min<size_t>(10, dose.size()), master.fork(50).next_u64())
                        .transcript;
                out.attestation = att;
                // the on-ledger fact: claim, commitment, signature; the
                // transcript stays in the supervisory artifact store
                nlohmann::json att_payload = {{"claim", claim_to_json(att.claim)},
                                              {"commitment", commitment_to_json(att.commitment)},
                                              {"attestor_id", att.attestor_id}};
                push(detail::supervisory_tx(world, world.regulator_id, TxType::Attestation,
                                            att_payload, t));
                record("attestation", t);
            } catch (const Error& e) {
                if (e.code() != Errc::ClaimFalse) throw;
                push(detail::supervisory_tx(
                    world, world.regulator_id, TxType::AdminPolicy,
                    {{"shipment_id", sid}, {"action", "attestation_refused"}}, t));
                record("decision", t);
            }
        }

        t += 500;
        shp.state = validate_transition(shp, LifecycleEvent::Archive, Role::Consignor, true);
        push(detail::supervisory_tx(world, world.consignor_id, TxType::AdminPolicy,
                                    {{"shipment_id", sid}, {"action", "archive"}}, t));

        period_end = std::max(period_end, t + 1);
        res.outcomes[sid] = std::move(out);
        ++shipment_index;
    }

    // the public disclosure: anonymized counts plus the record-set link
    res.aggregate = aggregate_public(0, period_end, res.supervisory_records, period_end);
    res.aggregate_release_delay_ms = cfg.public_release_delay_ms;
    if (res.aggregate_release_delay_ms > cfg.public_release_sla_ms)
        throw Error(Errc::ConfigError, "public release delay exceeds the SLA");
    detail::require_write(cfg, world, world.regulator_id, LayerTag::Public, "", false);
    {
        Transaction tx;
        tx.tx_type = TxType::PublicAggregate;
        tx.submitter = world.regulator_id;
        tx.sim_time_ms = period_end + cfg.public_release_delay_ms;
        tx.layer = LayerTag::Public;
        tx.body = to_bytes(res.aggregate.to_json().dump());
        tx.seal(world.sk(world.regulator_id));
        const uint64_t at = tx.sim_time_ms;
        pending.push_back({std::move(tx), at});
    }

    // order everything through consensus, then commit blocks in the
    // committed sequence with quorum signatures
    consensus::SimParams params;
    params.cluster_size = cfg.consensus.n;
    params.network.latency_min_ms = cfg.consensus.latency_min_ms;
    params.network.latency_max_ms = cfg.consensus.latency_max_ms;
    params.network.drop_rate = cfg.consensus.drop_rate;
    params.stop_when_workload_committed = true;

    std::map<std::string, Transaction> by_batch;
    std::vector<consensus::WorkloadItem> workload;
    uint64_t last_submit = 0;
    for (size_t i = 0; i < pending.size(); ++i) {
        const std::string batch_id = "tx-" + std::to_string(i);
        workload.push_back({pending[i].tx.sim_time_ms, batch_id, {pending[i].tx.tx_id}});
        by_batch[batch_id] = std::move(pending[i].tx);
        last_submit = std::max(last_submit, workload.back().at_ms);
    }
    params.duration_ms = last_submit + 120'000;
    res.consensus = consensus::run_simulation(cfg.consensus.n, {}, workload,
                                              master.fork(99).next_u64(), params);
    if (res.consensus.committed_sequence.size() != workload.size())
        throw Error(Errc::InvalidTx, "consensus failed to commit the full workload");

    for (const auto& entry : res.consensus.committed_sequence) {
        Transaction tx = std::move(by_batch.at(entry.batch_id));
        const uint64_t commit_at = res.consensus.commit_ms.at(entry.batch_id);
        Block b = res.ledger.build_block({std::move(tx)}, "node-0", commit_at);
        const Digest h = b.header_hash();
        const Bytes msg(h.begin(), h.end());
        for (const auto& [nid, sk] : world.node_sks)
            b.commit_signatures.push_back({nid, crypto::sign(sk, msg)});
        res.ledger.append_block(std::move(b), world.registry,
                                world.node_keys.size() / 2 + 1, world.node_keys);
    }
    if (res.ledger.verify_chain().has_value())
        throw Error(Errc::InvalidTx, "freshly committed chain failed verification");
    return res;
}

// ---- layer-filtered queries under the policy engine ----

struct QueryResult {
    AccessDecision decision;
    nlohmann::json records = nlohmann::json::array();
};

// Applies check_access once per query context, then filters the ledger
// by layer. Operational payloads come from the side store and only for
// orgs named on the anchor; everyone else sees anchors.
inline QueryResult query_ledger(const Registry& registry, const AccessPolicy& policy,
                                const LedgerStore& ledger, const SideStoreSet& side_stores,
                                const std::string& identity_id, LayerTag layer,
                                const std::optional<ShipmentContext>& ctx = std::nullopt) {
    const Identity& ident = registry.get(identity_id);
    QueryResult out;
    out.decision = check_access(policy, ident, layer, Action::Read, ctx);
    if (!out.decision.allowed) return out;
    for (const auto& b : ledger.blocks()) {
        for (const auto& tx : b.txs) {
            if (tx.layer != layer) continue;
            nlohmann::json rec = {{"tx_id", to_hex(tx.tx_id)},
                                  {"height", b.height},
                                  {"type", tx_type_name(tx.tx_type)},
                                  {"submitter", tx.submitter},
                                  {"sim_time_ms", tx.sim_time_ms}};
            if (tx.has_anchor()) {
                rec["anchor"] = to_hex(tx.anchor().anchor);
                rec["collection_id"] = tx.anchor().collection_id;
                if (const auto* e = side_stores.fetch(ident.org_id, tx.anchor().anchor))
                    rec["payload"] = std::string(e->payload.begin(), e->payload.end());
            } else {
                rec["payload"] = std::string(tx.inline_payload().begin(),
                                             tx.inline_payload().end());
            }
            out.records.push_back(std::move(rec));
        }
    }
    return out;
}

// ---- artifact emission ----

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::IoFailure, "cannot write " + path.string());
    f << text;
}

inline void write_artifacts(const SimulationResult& res, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    save_ledger(res.ledger, (out_dir / "ledger.ndjson").string());
    write_text(out_dir / "consensus_trace.ndjson", res.consensus.trace_ndjson());

    nlohmann::json stores;
    for (const auto& [org, entries] : res.side_stores.stores()) {
        for (const auto& [anchor_hex, e] : entries) {
            stores[org][anchor_hex] = {
                {"payload", to_hex(std::span<const uint8_t>(e.payload.data(), e.payload.size()))},
                {"salt", to_hex(std::span<const uint8_t>(e.salt.data(), e.salt.size()))}};
        }
    }
    write_text(out_dir / "sidestores.json", stores.dump(2) + "\n");

    std::string outbox;
    for (const auto& line : res.outbox) outbox += line + "\n";
    write_text(out_dir / "outbox.ndjson", outbox);

    write_text(out_dir / "public_report.json", res.aggregate.to_json().dump(2) + "\n");
    write_text(out_dir / "public_report.csv", aggregate_to_csv(res.aggregate));

    nlohmann::json shipments;
    nlohmann::json attestations = nlohmann::json::array();
    for (const auto& [sid, out] : res.outcomes) {
        nlohmann::json alerts = nlohmann::json::array();
        for (const auto& a : out.alerts) alerts.push_back(alert_to_json(a));
        shipments[sid] = {{"state", shipment_state_name(out.shipment.state)},
                          {"incident_recorded", out.incident_recorded},
                          {"delivered_ms", out.delivered_ms},
                          {"on_time", out.on_time},
                          {"alerts", alerts}};
        if (out.attestation) attestations.push_back(attestation_to_json(*out.attestation));
    }
    write_text(out_dir / "shipments.json", shipments.dump(2) + "\n");
    write_text(out_dir / "attestations.json", attestations.dump(2) + "\n");

    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : res.supervisory_records)
        records.push_back({{"record_id", r.record_id},
                           {"shipment_id", r.shipment_id},
                           {"kind", r.kind},
                           {"severity", r.severity ? severity_name(*r.severity) : ""},
                           {"sim_time_ms", r.sim_time_ms},
                           {"on_time", r.on_time}});
    write_text(out_dir / "supervisory_records.json", records.dump(2) + "\n");
}

// Rebuilds a side-store set from a sidestores.json dump; anchors are
// recomputed from (payload, salt) so a corrupted dump fails loudly on
// the next reveal.
inline SideStoreSet side_stores_from_json(const nlohmann::json& j) {
    SideStoreSet s;
    for (const auto& [org, entries] : j.items())
        for (const auto& [anchor_hex, e] : entries.items()) {
            const PrivateAnchor a = s.put_private(from_hex(e.at("payload").get<std::string>()),
                                                  from_hex(e.at("salt").get<std::string>()), {org});
            if (to_hex(a.anchor) != anchor_hex)
                throw Error(Errc::ParseError, "side store entry does not match its anchor");
        }
    return s;
}

// ---- config file plumbing ----

inline nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw Error(Errc::ConfigError, "cannot open " + path.string());
    try {
        return nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, path.string() + ": " + e.what());
    }
}

// Config file: paths are resolved relative to the config's directory.
inline SimulationConfig config_from_json(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir) {
    SimulationConfig cfg;
    try {
        if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
        if (j.contains("consensus")) {
            const auto& c = j.at("consensus");
            if (c.contains("n")) cfg.consensus.n = c.at("n").get<int>();
            if (c.contains("latency_min_ms"))
                cfg.consensus.latency_min_ms = c.at("latency_min_ms").get<uint64_t>();
            if (c.contains("latency_max_ms"))
                cfg.consensus.latency_max_ms = c.at("latency_max_ms").get<uint64_t>();
            if (c.contains("drop_rate")) cfg.consensus.drop_rate = c.at("drop_rate").get<double>();
        }
        for (const auto& path : j.at("scenarios"))
            cfg.scenarios.push_back(
                scenario_from_json(load_json_file(base_dir / path.get<std::string>())));
        if (j.contains("alert_rules"))
            cfg.alert_rules = alert_rules_from_json(
                load_json_file(base_dir / j.at("alert_rules").get<std::string>()));
        if (j.contains("policy"))
            cfg.policy = AccessPolicy::from_json(
                load_json_file(base_dir / j.at("policy").get<std::string>()));
        if (j.contains("batch_window_ms"))
            cfg.batch_window_ms = j.at("batch_window_ms").get<uint64_t>();
        if (j.contains("alert_window_ms"))
            cfg.alert_window_ms = j.at("alert_window_ms").get<uint64_t>();
        if (j.contains("radiation_limit"))
            cfg.radiation_limit = j.at("radiation_limit").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ConfigError, std::string("config: ") + e.what());
    }
    return cfg;
}

}  // namespace snft
