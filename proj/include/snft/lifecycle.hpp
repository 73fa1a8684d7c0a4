#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "snft/error.hpp"
#include "snft/identity.hpp"
#include "snft/layeraccess.hpp"
#include "snft/telemetry.hpp"

namespace snft {

enum class ShipmentState {
    Drafted,
    PermitRequested,
    Approved,
    InTransit,
    Incident,
    HandoverPending,
    Delivered,
    Archived,
};

inline constexpr ShipmentState kAllShipmentStates[] = {
    ShipmentState::Drafted,   ShipmentState::PermitRequested, ShipmentState::Approved,
    ShipmentState::InTransit, ShipmentState::Incident,        ShipmentState::HandoverPending,
    ShipmentState::Delivered, ShipmentState::Archived,
};

inline const char* shipment_state_name(ShipmentState s) {
    switch (s) {
        case ShipmentState::Drafted: return "drafted";
        case ShipmentState::PermitRequested: return "permit_requested";
        case ShipmentState::Approved: return "approved";
        case ShipmentState::InTransit: return "in_transit";
        case ShipmentState::Incident: return "incident";
        case ShipmentState::HandoverPending: return "handover_pending";
        case ShipmentState::Delivered: return "delivered";
        case ShipmentState::Archived: return "archived";
    }
    return "unknown";
}

enum class LifecycleEvent {
    RequestPermit,
    ApprovePermit,
    StartTransport,
    CriticalAlert,
    ClearIncident,
    BeginHandover,
    CompleteHandoverNext,
    CompleteHandoverDelivery,
    Archive,
};

inline constexpr LifecycleEvent kAllLifecycleEvents[] = {
    LifecycleEvent::RequestPermit,      LifecycleEvent::ApprovePermit,
    LifecycleEvent::StartTransport,     LifecycleEvent::CriticalAlert,
    LifecycleEvent::ClearIncident,      LifecycleEvent::BeginHandover,
    LifecycleEvent::CompleteHandoverNext, LifecycleEvent::CompleteHandoverDelivery,
    LifecycleEvent::Archive,
};

inline const char* lifecycle_event_name(LifecycleEvent e) {
    switch (e) {
        case LifecycleEvent::RequestPermit: return "request_permit";
        case LifecycleEvent::ApprovePermit: return "approve_permit";
        case LifecycleEvent::StartTransport: return "start_transport";
        case LifecycleEvent::CriticalAlert: return "critical_alert";
        case LifecycleEvent::ClearIncident: return "clear_incident";
        case LifecycleEvent::BeginHandover: return "begin_handover";
        case LifecycleEvent::CompleteHandoverNext: return "complete_handover_next";
        case LifecycleEvent::CompleteHandoverDelivery: return "complete_handover_delivery";
        case LifecycleEvent::Archive: return "archive";
    }
    return "unknown";
}

struct Shipment {
    std::string shipment_id;
    ShipmentState state = ShipmentState::Drafted;
    std::string consignor_id;
    std::string carrier_id;
    std::string consignee_id;
    std::string regulator_id;
    std::optional<Digest> permit_tx;
    std::optional<PrivateAnchor> route_anchor;  // required before InTransit
    std::set<std::string> open_alerts;
};

struct TransitionEdge {
    ShipmentState from;
    LifecycleEvent event;
    Role actor;
    ShipmentState to;
};

// The declared edge list. Incident clearing and permit approval sit
// with the national regulator; archival is consignor-initiated with a
// regulator countersignature.
inline const std::vector<TransitionEdge>& transition_edges() {
    static const std::vector<TransitionEdge> edges = {
        {ShipmentState::Drafted, LifecycleEvent::RequestPermit, Role::Consignor,
         ShipmentState::PermitRequested},
        {ShipmentState::PermitRequested, LifecycleEvent::ApprovePermit, Role::RegulatorNational,
         ShipmentState::Approved},
        {ShipmentState::Approved, LifecycleEvent::StartTransport, Role::Carrier,
         ShipmentState::InTransit},
        {ShipmentState::InTransit, LifecycleEvent::CriticalAlert, Role::Carrier,
         ShipmentState::Incident},
        {ShipmentState::Incident, LifecycleEvent::ClearIncident, Role::RegulatorNational,
         ShipmentState::InTransit},
        {ShipmentState::InTransit, LifecycleEvent::BeginHandover, Role::Carrier,
         ShipmentState::HandoverPending},
        {ShipmentState::HandoverPending, LifecycleEvent::CompleteHandoverNext, Role::Carrier,
         ShipmentState::InTransit},
        {ShipmentState::HandoverPending, LifecycleEvent::CompleteHandoverDelivery, Role::Consignee,
         ShipmentState::Delivered},
        {ShipmentState::Delivered, LifecycleEvent::Archive, Role::Consignor,
         ShipmentState::Archived},
    };
    return edges;
}

// Pure transition check; preconditions on permit and route anchors are
// enforced for the edges that need them.
inline ShipmentState validate_transition(const Shipment& shipment, LifecycleEvent event,
                                         Role actor_role, bool regulator_countersigned = false) {
    const TransitionEdge* match = nullptr;
    bool state_event_known = false;
    for (const auto& e : transition_edges()) {
        if (e.from == shipment.state && e.event == event) {
            state_event_known = true;
            if (e.actor == actor_role) {
                match = &e;
                break;
            }
        }
    }
    if (!state_event_known)
        throw Error(Errc::IllegalTransition,
                    std::string(shipment_state_name(shipment.state)) + " + " +
                        lifecycle_event_name(event));
    if (!match) throw Error(Errc::WrongRole, lifecycle_event_name(event));
    if (event == LifecycleEvent::Archive && !regulator_countersigned)
        throw Error(Errc::WrongRole, "archive requires a regulator countersignature");
    if (event == LifecycleEvent::StartTransport) {
        if (!shipment.permit_tx) throw Error(Errc::IllegalTransition, "no approved permit on record");
        if (!shipment.route_anchor)
            throw Error(Errc::IllegalTransition, "route anchor required before transport");
    }
    return match->to;
}

inline nlohmann::json transition_edges_json() {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : transition_edges())
        j.push_back({{"from", shipment_state_name(e.from)},
                     {"event", lifecycle_event_name(e.event)},
                     {"actor", role_name(e.actor)},
                     {"to", shipment_state_name(e.to)}});
    return j;
}

// ---- alerts ----

struct Alert {
    std::string alert_id;
    std::string shipment_id;
    std::string rule_id;
    Severity severity = Severity::Warning;
    uint64_t triggered_ms = 0;       // first violating reading in the window
    uint64_t window_start_ms = 0;
};

// One alert per (rule, window): a rule re-violating inside the same
// aggregation window is deduplicated.
inline std::vector<Alert> evaluate_alerts(const std::vector<EdgeSummary>& summaries,
                                          const std::vector<AlertRule>& rules) {
    std::map<std::string, const AlertRule*> by_id;
    for (const auto& r : rules) by_id[r.rule_id] = &r;
    std::vector<Alert> alerts;
    for (const auto& s : summaries) {
        std::set<std::string> seen;
        for (const auto& flag : s.anomaly_flags) {
            if (!seen.insert(flag.rule_id).second) continue;
            auto it = by_id.find(flag.rule_id);
            if (it == by_id.end()) continue;
            Alert a;
            a.alert_id = s.shipment_id + "/" + flag.rule_id + "/" + std::to_string(s.window_start_ms);
            a.shipment_id = s.shipment_id;
            a.rule_id = flag.rule_id;
            a.severity = it->second->severity;
            a.triggered_ms = flag.sim_time_ms;
            a.window_start_ms = s.window_start_ms;
            alerts.push_back(std::move(a));
        }
    }
    return alerts;
}

inline nlohmann::json alert_to_json(const Alert& a) {
    return {{"alert_id", a.alert_id},       {"shipment_id", a.shipment_id},
            {"rule_id", a.rule_id},         {"severity", severity_name(a.severity)},
            {"triggered_ms", a.triggered_ms}, {"window_start_ms", a.window_start_ms}};
}

// ---- dual-signature handover ----

struct HandoverRecord {
    std::string shipment_id;
    std::string from_id;
    std::string to_id;
    PrivateAnchor details_anchor;  // location and time specifics stay off-ledger
    std::optional<Signature> confirm_from;
    std::optional<Signature> confirm_to;
    std::optional<uint64_t> completed_ms;

    Bytes signing_bytes() const {
        CanonicalWriter w;
        w.field("shipment_id", std::string_view(shipment_id));
        w.field("from_id", std::string_view(from_id));
        w.field("to_id", std::string_view(to_id));
        w.field("details_anchor", details_anchor.anchor);
        return w.finish();
    }

    bool complete() const { return confirm_from.has_value() && confirm_to.has_value(); }
};

// Stores one party's confirmation; verification happens against the
// registry. Completion is recorded when both signatures are present.
inline void record_handover(HandoverRecord& record, const std::string& signer_id,
                            const Signature& sig, const Registry& registry,
                            ShipmentState shipment_state, uint64_t now_ms) {
    if (shipment_state != ShipmentState::HandoverPending)
        throw Error(Errc::WrongState, shipment_state_name(shipment_state));
    if (signer_id != record.from_id && signer_id != record.to_id)
        throw Error(Errc::WrongParty, signer_id);
    registry.authenticate(sig, record.signing_bytes());
    if (sig.signer_id != signer_id) throw Error(Errc::WrongParty, "signature from another identity");
    auto& slot = (signer_id == record.from_id) ? record.confirm_from : record.confirm_to;
    if (slot.has_value()) throw Error(Errc::AlreadySigned, signer_id);
    slot = sig;
    if (record.complete()) record.completed_ms = now_ms;
}

// The supervisory confirmation: parties, time, and the details anchor
// only. Never the details themselves.
inline nlohmann::json handover_confirmation_payload(const HandoverRecord& record) {
    if (!record.complete() || !record.completed_ms)
        throw Error(Errc::WrongState, "handover not complete");
    return {{"shipment_id", record.shipment_id},
            {"from_id", record.from_id},
            {"to_id", record.to_id},
            {"completed_ms", *record.completed_ms},
            {"details_anchor", to_hex(record.details_anchor.anchor)}};
}

// ---- sensor batch validation ----

enum class BatchReject { NotAssigned, SeqGap, ImplausibleValue, TimeRegression };

inline const char* batch_reject_name(BatchReject r) {
    switch (r) {
        case BatchReject::NotAssigned: return "NotAssigned";
        case BatchReject::SeqGap: return "SeqGap";
        case BatchReject::ImplausibleValue: return "ImplausibleValue";
        case BatchReject::TimeRegression: return "TimeRegression";
    }
    return "unknown";
}

inline bool plausible(const SensorReading& r) {
    if (const auto* g = std::get_if<GpsFix>(&r.value))
        return std::abs(g->lat) <= 90.0 && std::abs(g->lon) <= 180.0;
    if (const auto* d = std::get_if<double>(&r.value)) {
        if (r.sensor == SensorType::Radiation || r.sensor == SensorType::Shock) return *d >= 0.0;
        if (r.sensor == SensorType::Temperature) return *d >= -100.0 && *d <= 1000.0;
    }
    return true;
}

// Tracks expected next seq and last timestamp per sensor across batches
// of one shipment.
struct BatchCursor {
    std::map<SensorType, uint64_t> next_seq;
    std::map<SensorType, uint64_t> last_time_ms;
};

inline std::optional<BatchReject> validate_sensor_batch(const std::vector<SensorReading>& readings,
                                                        const Identity& submitter,
                                                        const std::string& shipment_id,
                                                        BatchCursor& cursor) {
    if (!submitter.assigned_shipments.count(shipment_id)) return BatchReject::NotAssigned;
    BatchCursor scratch = cursor;
    for (const auto& r : readings) {
        uint64_t& expect = scratch.next_seq[r.sensor];
        if (r.seq != expect) return BatchReject::SeqGap;
        ++expect;
        if (!plausible(r)) return BatchReject::ImplausibleValue;
        auto it = scratch.last_time_ms.find(r.sensor);
        if (it != scratch.last_time_ms.end() && r.sim_time_ms < it->second)
            return BatchReject::TimeRegression;
        scratch.last_time_ms[r.sensor] = r.sim_time_ms;
    }
    cursor = std::move(scratch);  // only advance on accept
    return std::nullopt;
}

}  // namespace snft
