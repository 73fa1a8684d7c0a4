#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "snft/bytes.hpp"
#include "snft/crypto.hpp"
#include "snft/error.hpp"

namespace snft {

enum class Role {
    Consignor,
    Carrier,
    Consignee,
    RegulatorNational,
    RegulatorRegional,
    RegulatorInternational,
    EmergencyResponder,
    Auditor,
    PublicObserver,
};

inline constexpr Role kAllRoles[] = {
    Role::Consignor,          Role::Carrier,
    Role::Consignee,          Role::RegulatorNational,
    Role::RegulatorRegional,  Role::RegulatorInternational,
    Role::EmergencyResponder, Role::Auditor,
    Role::PublicObserver,
};

inline const char* role_name(Role r) {
    switch (r) {
        case Role::Consignor: return "consignor";
        case Role::Carrier: return "carrier";
        case Role::Consignee: return "consignee";
        case Role::RegulatorNational: return "regulator_national";
        case Role::RegulatorRegional: return "regulator_regional";
        case Role::RegulatorInternational: return "regulator_international";
        case Role::EmergencyResponder: return "emergency_responder";
        case Role::Auditor: return "auditor";
        case Role::PublicObserver: return "public_observer";
    }
    return "unknown";
}

inline Role role_from_name(std::string_view name) {
    for (Role r : kAllRoles)
        if (name == role_name(r)) return r;
    throw Error(Errc::ParseError, "unknown role: " + std::string(name));
}

inline bool is_regulator(Role r) {
    return r == Role::RegulatorNational || r == Role::RegulatorRegional ||
           r == Role::RegulatorInternational;
}

struct Organization {
    std::string org_id;
    std::string name;
    Role org_type;
    std::set<std::string> member_ids;
};

struct Identity {
    std::string identity_id;
    std::string org_id;
    Role role;
    crypto::PublicKey public_key{};
    std::set<std::string> assigned_shipments;
    std::string clearance;  // free-form, stored but not interpreted
    bool revoked = false;
};

struct Signature {
    std::string signer_id;
    crypto::SignatureBytes bytes{};
    Digest over{};  // sha256 of the canonical message bytes
};

inline Signature make_signature(const std::string& signer_id, const crypto::SecretKey& sk,
                                const Bytes& message) {
    Signature sig;
    sig.signer_id = signer_id;
    sig.bytes = crypto::sign(sk, message);
    sig.over = crypto::sha256(std::span<const uint8_t>(message.data(), message.size()));
    return sig;
}

// Permissioned membership registry. Single-writer: all mutation goes
// through one serialized command stream; reads may be shared.
class Registry {
public:
    const Organization& add_organization(Organization org) {
        auto [it, inserted] = orgs_.emplace(org.org_id, std::move(org));
        if (!inserted) throw Error(Errc::DuplicateKey, "org_id already registered: " + it->first);
        return it->second;
    }

    const Identity& register_identity(const std::string& org_id, Role role,
                                      const crypto::PublicKey& public_key,
                                      std::string identity_id = {}) {
        auto org_it = orgs_.find(org_id);
        if (org_it == orgs_.end()) throw Error(Errc::UnknownOrganization, org_id);
        const std::string key_hex = to_hex(std::span<const uint8_t>(public_key.data(), public_key.size()));
        if (keys_in_use_.count(key_hex))
            throw Error(Errc::DuplicateKey, "public key already registered");
        if (identity_id.empty()) identity_id = org_id + "/id-" + std::to_string(next_serial_);
        if (identities_.count(identity_id))
            throw Error(Errc::DuplicateKey, "identity_id already registered: " + identity_id);
        ++next_serial_;
        Identity ident;
        ident.identity_id = identity_id;
        ident.org_id = org_id;
        ident.role = role;
        ident.public_key = public_key;
        auto [it, _] = identities_.emplace(identity_id, std::move(ident));
        keys_in_use_.insert(key_hex);
        org_it->second.member_ids.insert(identity_id);
        return it->second;
    }

    void revoke(const std::string& identity_id) {
        auto it = identities_.find(identity_id);
        if (it == identities_.end()) throw Error(Errc::UnknownIdentity, identity_id);
        it->second.revoked = true;  // idempotent
    }

    void assign_shipment(const std::string& identity_id, const std::string& shipment_id) {
        find_mut(identity_id).assigned_shipments.insert(shipment_id);
    }

    const Identity& get(const std::string& identity_id) const {
        auto it = identities_.find(identity_id);
        if (it == identities_.end()) throw Error(Errc::UnknownIdentity, identity_id);
        return it->second;
    }

    const Identity* find(const std::string& identity_id) const {
        auto it = identities_.find(identity_id);
        return it == identities_.end() ? nullptr : &it->second;
    }

    const Organization& get_org(const std::string& org_id) const {
        auto it = orgs_.find(org_id);
        if (it == orgs_.end()) throw Error(Errc::UnknownOrganization, org_id);
        return it->second;
    }

    bool has_org(const std::string& org_id) const { return orgs_.count(org_id) > 0; }

    // Returns the signer's Identity iff the signature verifies over the
    // message and the identity is registered and not revoked.
    const Identity& authenticate(const Signature& sig, const Bytes& message) const {
        auto it = identities_.find(sig.signer_id);
        if (it == identities_.end()) throw Error(Errc::UnknownIdentity, sig.signer_id);
        const Identity& ident = it->second;
        if (!crypto::verify(ident.public_key, message, sig.bytes))
            throw Error(Errc::BadSignature, "signature does not verify for " + sig.signer_id);
        if (ident.revoked) throw Error(Errc::RevokedIdentity, sig.signer_id);
        return ident;
    }

    const std::map<std::string, Identity>& identities() const { return identities_; }
    const std::map<std::string, Organization>& organizations() const { return orgs_; }

private:
    Identity& find_mut(const std::string& identity_id) {
        auto it = identities_.find(identity_id);
        if (it == identities_.end()) throw Error(Errc::UnknownIdentity, identity_id);
        return it->second;
    }

    std::map<std::string, Organization> orgs_;
    std::map<std::string, Identity> identities_;
    std::set<std::string> keys_in_use_;
    uint64_t next_serial_ = 0;
};

}  // namespace snft
