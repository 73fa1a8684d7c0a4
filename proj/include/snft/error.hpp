#pragma once

#include <stdexcept>
#include <string>

namespace snft {

enum class Errc {
    UnknownOrganization,
    DuplicateKey,
    BadSignature,
    RevokedIdentity,
    UnknownIdentity,
    EmptyList,
    InvalidTx,
    QuorumNotMet,
    NotFound,
    InvalidClusterSize,
    NotLeader,
    UnknownNode,
    EmptyAuthSet,
    UnknownKind,
    InvalidScenario,
    NotAssigned,
    EmptyBatch,
    IllegalTransition,
    WrongRole,
    WrongParty,
    AlreadySigned,
    WrongState,
    ClaimFalse,
    CommitmentMismatch,
    AuditFailure,
    PeriodOpen,
    InvalidSpec,
    IoFailure,
    ParseError,
    ConfigError,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::UnknownOrganization: return "UnknownOrganization";
        case Errc::DuplicateKey: return "DuplicateKey";
        case Errc::BadSignature: return "BadSignature";
        case Errc::RevokedIdentity: return "RevokedIdentity";
        case Errc::UnknownIdentity: return "UnknownIdentity";
        case Errc::EmptyList: return "EmptyList";
        case Errc::InvalidTx: return "InvalidTx";
        case Errc::QuorumNotMet: return "QuorumNotMet";
        case Errc::NotFound: return "NotFound";
        case Errc::InvalidClusterSize: return "InvalidClusterSize";
        case Errc::NotLeader: return "NotLeader";
        case Errc::UnknownNode: return "UnknownNode";
        case Errc::EmptyAuthSet: return "EmptyAuthSet";
        case Errc::UnknownKind: return "UnknownKind";
        case Errc::InvalidScenario: return "InvalidScenario";
        case Errc::NotAssigned: return "NotAssigned";
        case Errc::EmptyBatch: return "EmptyBatch";
        case Errc::IllegalTransition: return "IllegalTransition";
        case Errc::WrongRole: return "WrongRole";
        case Errc::WrongParty: return "WrongParty";
        case Errc::AlreadySigned: return "AlreadySigned";
        case Errc::WrongState: return "WrongState";
        case Errc::ClaimFalse: return "ClaimFalse";
        case Errc::CommitmentMismatch: return "CommitmentMismatch";
        case Errc::AuditFailure: return "AuditFailure";
        case Errc::PeriodOpen: return "PeriodOpen";
        case Errc::InvalidSpec: return "InvalidSpec";
        case Errc::IoFailure: return "IoFailure";
        case Errc::ParseError: return "ParseError";
        case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}
    explicit Error(Errc code) : std::runtime_error(errc_name(code)), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace snft
