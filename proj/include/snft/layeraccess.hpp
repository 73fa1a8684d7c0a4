#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "snft/crypto.hpp"
#include "snft/error.hpp"
#include "snft/identity.hpp"

namespace snft {

enum class LayerTag { Operational, Supervisory, Public };

inline constexpr LayerTag kAllLayers[] = {LayerTag::Operational, LayerTag::Supervisory,
                                          LayerTag::Public};

inline const char* layer_name(LayerTag t) {
    switch (t) {
        case LayerTag::Operational: return "operational";
        case LayerTag::Supervisory: return "supervisory";
        case LayerTag::Public: return "public";
    }
    return "unknown";
}

inline LayerTag layer_from_name(std::string_view name) {
    for (LayerTag t : kAllLayers)
        if (name == layer_name(t)) return t;
    throw Error(Errc::ParseError, "unknown layer: " + std::string(name));
}

enum class Action { Read, Write };

inline const char* action_name(Action a) { return a == Action::Read ? "read" : "write"; }

enum class Rule { Allow, Deny, AllowIfAssigned };

enum class DenyReason { RoleForbidden, NotAssigned, WriteForbidden };

inline const char* deny_reason_name(DenyReason r) {
    switch (r) {
        case DenyReason::RoleForbidden: return "RoleForbidden";
        case DenyReason::NotAssigned: return "NotAssigned";
        case DenyReason::WriteForbidden: return "WriteForbidden";
    }
    return "unknown";
}

struct AccessDecision {
    bool allowed = false;
    std::optional<DenyReason> reason;

    static AccessDecision allow() { return {true, std::nullopt}; }
    static AccessDecision deny(DenyReason r) { return {false, r}; }
};

// Shipment context for need-to-know and incident-scoped access.
struct ShipmentContext {
    std::string shipment_id;
    bool in_incident = false;
};

// Role x layer x action matrix. Total over the whole grid; lookup of a
// missing cell is Deny, but the bundled default and any loaded policy
// are validated for totality.
class AccessPolicy {
public:
    void set(Role role, LayerTag layer, Action action, Rule rule) {
        rules_[key(role, layer, action)] = rule;
    }

    Rule rule(Role role, LayerTag layer, Action action) const {
        auto it = rules_.find(key(role, layer, action));
        return it == rules_.end() ? Rule::Deny : it->second;
    }

    bool total() const {
        for (Role r : kAllRoles)
            for (LayerTag l : kAllLayers)
                for (Action a : {Action::Read, Action::Write})
                    if (!rules_.count(key(r, l, a))) return false;
        return true;
    }

    // The Table-4 default matrix. Operational: need-to-know for parties
    // on the shipment, national regulator and auditor by assignment,
    // emergency responders only while the shipment is in Incident.
    // Supervisory: regulators and auditors read/write, operational
    // parties by assignment. Public: everyone reads, regulators write.
    static AccessPolicy default_policy() {
        AccessPolicy p;
        auto set_all = [&](Role r, Rule read_op, Rule write_op, Rule read_sup, Rule write_sup,
                           Rule write_pub) {
            p.set(r, LayerTag::Operational, Action::Read, read_op);
            p.set(r, LayerTag::Operational, Action::Write, write_op);
            p.set(r, LayerTag::Supervisory, Action::Read, read_sup);
            p.set(r, LayerTag::Supervisory, Action::Write, write_sup);
            p.set(r, LayerTag::Public, Action::Read, Rule::Allow);
            p.set(r, LayerTag::Public, Action::Write, write_pub);
        };
        using enum Rule;
        set_all(Role::Consignor, AllowIfAssigned, AllowIfAssigned, AllowIfAssigned, AllowIfAssigned, Deny);
        set_all(Role::Carrier, AllowIfAssigned, AllowIfAssigned, AllowIfAssigned, AllowIfAssigned, Deny);
        set_all(Role::Consignee, AllowIfAssigned, AllowIfAssigned, AllowIfAssigned, AllowIfAssigned, Deny);
        set_all(Role::RegulatorNational, AllowIfAssigned, Deny, Allow, Allow, Allow);
        set_all(Role::RegulatorRegional, Deny, Deny, Allow, Allow, Allow);
        set_all(Role::RegulatorInternational, Deny, Deny, Allow, Allow, Allow);
        set_all(Role::EmergencyResponder, AllowIfAssigned, Deny, AllowIfAssigned, Deny, Deny);
        set_all(Role::Auditor, AllowIfAssigned, Deny, Allow, Allow, Deny);
        set_all(Role::PublicObserver, Deny, Deny, Deny, Deny, Deny);
        return p;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        for (Role r : kAllRoles)
            for (LayerTag l : kAllLayers)
                for (Action a : {Action::Read, Action::Write}) {
                    const char* v = nullptr;
                    switch (rule(r, l, a)) {
                        case Rule::Allow: v = "allow"; break;
                        case Rule::Deny: v = "deny"; break;
                        case Rule::AllowIfAssigned: v = "allow_if_assigned"; break;
                    }
                    j[key(r, l, a)] = v;
                }
        return j;
    }

    static AccessPolicy from_json(const nlohmann::json& j) {
        AccessPolicy p;
        for (Role r : kAllRoles)
            for (LayerTag l : kAllLayers)
                for (Action a : {Action::Read, Action::Write}) {
                    const std::string k = key(r, l, a);
                    if (!j.contains(k)) throw Error(Errc::ParseError, "policy missing cell " + k);
                    const std::string v = j.at(k).get<std::string>();
                    if (v == "allow") p.set(r, l, a, Rule::Allow);
                    else if (v == "deny") p.set(r, l, a, Rule::Deny);
                    else if (v == "allow_if_assigned") p.set(r, l, a, Rule::AllowIfAssigned);
                    else throw Error(Errc::ParseError, "policy cell " + k + " has bad value " + v);
                }
        return p;
    }

private:
    static std::string key(Role r, LayerTag l, Action a) {
        return std::string(role_name(r)) + "." + layer_name(l) + "." + action_name(a);
    }
    std::map<std::string, Rule> rules_;
};

inline AccessDecision check_access(const AccessPolicy& policy, const Identity& identity,
                                   LayerTag layer, Action action,
                                   const std::optional<ShipmentContext>& shipment = std::nullopt) {
    switch (policy.rule(identity.role, layer, action)) {
        case Rule::Allow:
            return AccessDecision::allow();
        case Rule::Deny:
            return AccessDecision::deny(action == Action::Write && layer == LayerTag::Public
                                            ? DenyReason::WriteForbidden
                                            : DenyReason::RoleForbidden);
        case Rule::AllowIfAssigned: {
            if (!shipment.has_value()) return AccessDecision::deny(DenyReason::NotAssigned);
            if (!identity.assigned_shipments.count(shipment->shipment_id))
                return AccessDecision::deny(DenyReason::NotAssigned);
            if (identity.role == Role::EmergencyResponder && !shipment->in_incident)
                return AccessDecision::deny(DenyReason::NotAssigned);
            return AccessDecision::allow();
        }
    }
    return AccessDecision::deny(DenyReason::RoleForbidden);
}

// ---- private-data anchoring ----

struct PrivateAnchor {
    Digest anchor{};
    std::set<std::string> authorized_orgs;
    std::string collection_id;
};

inline Digest compute_anchor(const Bytes& payload, const Bytes& salt) {
    Bytes joined = payload;
    joined.insert(joined.end(), salt.begin(), salt.end());
    return crypto::hash(crypto::Domain::PrivateAnchor, joined);
}

inline bool reveal_and_verify(const Digest& anchor, const Bytes& payload, const Bytes& salt) {
    return compute_anchor(payload, salt) == anchor;
}

// Per-organization off-ledger store. Payloads reach only the orgs named
// in authorized_orgs; only the anchor is ever placed on the ledger.
class SideStoreSet {
public:
    struct Entry {
        Bytes payload;
        Bytes salt;
    };

    PrivateAnchor put_private(const Bytes& payload, const Bytes& salt,
                              const std::set<std::string>& authorized_orgs,
                              std::string collection_id = {}) {
        if (authorized_orgs.empty()) throw Error(Errc::EmptyAuthSet, "no authorized orgs");
        if (salt.size() < 16) throw Error(Errc::InvalidTx, "salt below 128 bits");
        PrivateAnchor pa;
        pa.anchor = compute_anchor(payload, salt);
        pa.authorized_orgs = authorized_orgs;
        pa.collection_id = std::move(collection_id);
        for (const auto& org : authorized_orgs)
            stores_[org][to_hex(pa.anchor)] = Entry{payload, salt};
        return pa;
    }

    const Entry* fetch(const std::string& org_id, const Digest& anchor) const {
        auto org_it = stores_.find(org_id);
        if (org_it == stores_.end()) return nullptr;
        auto it = org_it->second.find(to_hex(anchor));
        return it == org_it->second.end() ? nullptr : &it->second;
    }

    const std::map<std::string, std::map<std::string, Entry>>& stores() const { return stores_; }

private:
    std::map<std::string, std::map<std::string, Entry>> stores_;
};

// ---- confidentiality classification ----

enum class PayloadKind {
    LocationPath,
    RadiationDose,
    SecurityProgram,
    PersonnelIdentity,
    InteractionRecords,
    ComplianceAudit,
    RegulatoryDecision,
    AggregatedStats,
    EnvStatement,
};

inline constexpr PayloadKind kAllPayloadKinds[] = {
    PayloadKind::LocationPath,     PayloadKind::RadiationDose,   PayloadKind::SecurityProgram,
    PayloadKind::PersonnelIdentity, PayloadKind::InteractionRecords, PayloadKind::ComplianceAudit,
    PayloadKind::RegulatoryDecision, PayloadKind::AggregatedStats, PayloadKind::EnvStatement,
};

// High confidentiality -> Operational, medium -> Supervisory,
// transparency-high -> Public.
inline LayerTag classify(PayloadKind kind) {
    switch (kind) {
        case PayloadKind::LocationPath:
        case PayloadKind::RadiationDose:
        case PayloadKind::SecurityProgram:
        case PayloadKind::PersonnelIdentity:
            return LayerTag::Operational;
        case PayloadKind::InteractionRecords:
        case PayloadKind::ComplianceAudit:
            return LayerTag::Supervisory;
        case PayloadKind::RegulatoryDecision:
        case PayloadKind::AggregatedStats:
        case PayloadKind::EnvStatement:
            return LayerTag::Public;
    }
    throw Error(Errc::UnknownKind, "unrecognized payload kind");
}

}  // namespace snft
