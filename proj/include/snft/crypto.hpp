#pragma once

#include <sodium.h>

#include <array>
#include <span>
#include <stdexcept>
#include <string_view>

#include "snft/bytes.hpp"

namespace snft::crypto {

// Domain-separation prefixes for every SHA-256 use in the system.
// Distinct contexts can never produce colliding digests by construction.
enum class Domain : uint8_t {
    MerkleLeaf = 0x00,
    MerkleNode = 0x01,
    BlockHeader = 0x02,
    TxId = 0x03,
    PrivateAnchor = 0x04,
    CommitmentLeaf = 0x05,
    LeafSalt = 0x06,
    RecordSetLink = 0x07,
    SeedCommitment = 0x08,
};

inline void init() {
    static const int rc = sodium_init();
    if (rc < 0) throw std::runtime_error("libsodium initialization failed");
}

inline Digest sha256(std::span<const uint8_t> data) {
    init();
    Digest out;
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

inline Digest hash(Domain domain, std::span<const uint8_t> data) {
    init();
    crypto_hash_sha256_state st;
    crypto_hash_sha256_init(&st);
    const uint8_t prefix = static_cast<uint8_t>(domain);
    crypto_hash_sha256_update(&st, &prefix, 1);
    crypto_hash_sha256_update(&st, data.data(), data.size());
    Digest out;
    crypto_hash_sha256_final(&st, out.data());
    return out;
}

inline Digest hash(Domain domain, const Bytes& data) {
    return hash(domain, std::span<const uint8_t>(data.data(), data.size()));
}

inline Digest hash2(Domain domain, const Digest& left, const Digest& right) {
    Bytes joined;
    joined.reserve(64);
    joined.insert(joined.end(), left.begin(), left.end());
    joined.insert(joined.end(), right.begin(), right.end());
    return hash(domain, joined);
}

using PublicKey = std::array<uint8_t, crypto_sign_PUBLICKEYBYTES>;
using SecretKey = std::array<uint8_t, crypto_sign_SECRETKEYBYTES>;
using SignatureBytes = std::array<uint8_t, crypto_sign_BYTES>;

struct KeyPair {
    PublicKey pk;
    SecretKey sk;
};

// Ed25519 keypair from a 32-byte seed; deterministic so the whole
// simulation reproduces from one master seed.
inline KeyPair keypair_from_seed(const Digest& seed) {
    init();
    KeyPair kp;
    crypto_sign_seed_keypair(kp.pk.data(), kp.sk.data(), seed.data());
    return kp;
}

inline SignatureBytes sign(const SecretKey& sk, std::span<const uint8_t> message) {
    init();
    SignatureBytes sig;
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), sk.data());
    return sig;
}

inline SignatureBytes sign(const SecretKey& sk, const Bytes& message) {
    return sign(sk, std::span<const uint8_t>(message.data(), message.size()));
}

inline bool verify(const PublicKey& pk, std::span<const uint8_t> message, const SignatureBytes& sig) {
    init();
    return crypto_sign_verify_detached(sig.data(), message.data(), message.size(), pk.data()) == 0;
}

inline bool verify(const PublicKey& pk, const Bytes& message, const SignatureBytes& sig) {
    return verify(pk, std::span<const uint8_t>(message.data(), message.size()), sig);
}

}  // namespace snft::crypto
