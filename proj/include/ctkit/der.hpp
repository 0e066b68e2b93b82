#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ctkit/bytes.hpp"

namespace ctkit::der {

// Minimal DER (definite-length) reader and writer. The reader keeps absolute
// offsets into the original buffer so callers can splice structures without
// re-encoding untouched bytes.

constexpr std::uint8_t kBoolean = 0x01;
constexpr std::uint8_t kInteger = 0x02;
constexpr std::uint8_t kBitString = 0x03;
constexpr std::uint8_t kOctetString = 0x04;
constexpr std::uint8_t kNull = 0x05;
constexpr std::uint8_t kOid = 0x06;
constexpr std::uint8_t kUtf8String = 0x0c;
constexpr std::uint8_t kPrintableString = 0x13;
constexpr std::uint8_t kTeletexString = 0x14;
constexpr std::uint8_t kIa5String = 0x16;
constexpr std::uint8_t kUtcTime = 0x17;
constexpr std::uint8_t kGeneralizedTime = 0x18;
constexpr std::uint8_t kSequence = 0x30;
constexpr std::uint8_t kSet = 0x31;

constexpr std::uint8_t context(std::uint8_t n, bool constructed) {
    return static_cast<std::uint8_t>(0x80 | (constructed ? 0x20 : 0x00) | n);
}

struct Tlv {
    std::uint8_t tag = 0;
    std::size_t start = 0; // absolute offset of the header
    std::size_t header_len = 0;
    std::size_t content_len = 0;

    std::size_t content_start() const { return start + header_len; }
    std::size_t end() const { return start + header_len + content_len; }
};

class Parser {
public:
    explicit Parser(BytesView whole) : whole_(whole), pos_(0), end_(whole.size()) {}
    Parser(BytesView whole, std::size_t begin, std::size_t end)
        : whole_(whole), pos_(begin), end_(end) {}

    bool empty() const { return pos_ >= end_; }
    std::size_t position() const { return pos_; }

    /// Peek at the next tag byte without consuming.
    std::optional<std::uint8_t> peek_tag() const;

    /// Read one TLV and advance past it; nullopt on malformed or truncated input.
    std::optional<Tlv> next();

    BytesView content(const Tlv& t) const { return whole_.subspan(t.content_start(), t.content_len); }
    BytesView full(const Tlv& t) const { return whole_.subspan(t.start, t.header_len + t.content_len); }

    /// Parser over the content of a constructed TLV; offsets stay absolute.
    Parser inner(const Tlv& t) const { return Parser(whole_, t.content_start(), t.end()); }

private:
    BytesView whole_;
    std::size_t pos_;
    std::size_t end_;
};

std::optional<std::string> decode_oid(BytesView content);

// Writers return complete TLVs.
Bytes header(std::uint8_t tag, std::size_t content_len);
Bytes tlv(std::uint8_t tag, BytesView content);
Bytes oid(std::string_view dotted);
Bytes boolean(bool v);
Bytes null();
Bytes integer(std::uint64_t v);
Bytes integer_bytes(BytesView big_endian);
Bytes octet_string(BytesView content);
Bytes bit_string(BytesView content);
Bytes utf8_string(std::string_view s);
Bytes printable_string(std::string_view s);
Bytes ia5_string(std::string_view s);
/// UTCTime (YYMMDDHHMMSSZ) for years in [1950, 2050), else GeneralizedTime.
Bytes time(std::uint64_t epoch_ms);

} // namespace ctkit::der
