#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctkit {

using Bytes = std::vector<std::uint8_t>;
using BytesView = std::span<const std::uint8_t>;
using Hash = std::array<std::uint8_t, 32>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(BytesView b) {
    return std::string(b.begin(), b.end());
}

inline BytesView view(const Bytes& b) {
    return BytesView(b.data(), b.size());
}

inline BytesView view(const Hash& h) {
    return BytesView(h.data(), h.size());
}

inline BytesView view(std::string_view s) {
    return BytesView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

inline void append(Bytes& out, BytesView more) {
    out.insert(out.end(), more.begin(), more.end());
}

std::string to_hex(BytesView data);
std::optional<Bytes> from_hex(std::string_view hex);

std::string base64_encode(BytesView data);
std::optional<Bytes> base64_decode(std::string_view text);

} // namespace ctkit
