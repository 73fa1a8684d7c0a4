#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace snft {

using Bytes = std::vector<uint8_t>;
using Digest = std::array<uint8_t, 32>;

inline constexpr Digest kZeroDigest{};

inline std::string to_hex(std::span<const uint8_t> data) {
    static constexpr char lut[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(lut[b >> 4]);
        out.push_back(lut[b & 0x0f]);
    }
    return out;
}

inline std::string to_hex(const Digest& d) { return to_hex(std::span<const uint8_t>(d.data(), d.size())); }

inline Bytes from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
    Bytes out(hex.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("non-hex character");
        out[i] = static_cast<uint8_t>(hi << 4 | lo);
    }
    return out;
}

inline Digest digest_from_hex(std::string_view hex) {
    Bytes b = from_hex(hex);
    if (b.size() != 32) throw std::invalid_argument("digest must be 32 bytes");
    Digest d;
    std::copy(b.begin(), b.end(), d.begin());
    return d;
}

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

inline void append_u32le(Bytes& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 24));
}

inline void append_u64le(Bytes& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

// Canonical message encoding: named fields emitted in lexicographic
// field-name order, each as len32(name) name len32(value) value.
// Signatures and content ids are computed over these bytes, so the
// encoding must stay stable.
class CanonicalWriter {
public:
    void field(std::string name, Bytes value) {
        fields_.emplace_back(std::move(name), std::move(value));
    }
    void field(std::string name, std::string_view value) {
        fields_.emplace_back(std::move(name), to_bytes(value));
    }
    void field(std::string name, std::span<const uint8_t> value) {
        fields_.emplace_back(std::move(name), Bytes(value.begin(), value.end()));
    }
    void field(std::string name, const Digest& d) {
        fields_.emplace_back(std::move(name), Bytes(d.begin(), d.end()));
    }
    void field_u64(std::string name, uint64_t v) {
        Bytes b;
        append_u64le(b, v);
        fields_.emplace_back(std::move(name), std::move(b));
    }
    void field_i64(std::string name, int64_t v) { field_u64(std::move(name), static_cast<uint64_t>(v)); }
    void field_f64(std::string name, double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        field_u64(std::move(name), bits);
    }

    Bytes finish() const {
        auto sorted = fields_;
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        Bytes out;
        for (const auto& [name, value] : sorted) {
            append_u32le(out, static_cast<uint32_t>(name.size()));
            out.insert(out.end(), name.begin(), name.end());
            append_u32le(out, static_cast<uint32_t>(value.size()));
            out.insert(out.end(), value.begin(), value.end());
        }
        return out;
    }

private:
    std::vector<std::pair<std::string, Bytes>> fields_;
};

}  // namespace snft
