#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctkit/bytes.hpp"

namespace ctkit::dns {

// Minimal DNS message codec: enough to issue A queries against a recursive
// resolver and to build authoritative answers in test fixtures. Parsing
// follows compression pointers (backwards only); encoding never compresses.

constexpr std::uint16_t kTypeA = 1;
constexpr std::uint16_t kTypeNs = 2;
constexpr std::uint16_t kTypeCname = 5;
constexpr std::uint16_t kTypeSoa = 6;
constexpr std::uint16_t kTypeMx = 15;
constexpr std::uint16_t kTypeTxt = 16;
constexpr std::uint16_t kTypeAaaa = 28;
constexpr std::uint16_t kClassIn = 1;

constexpr std::uint8_t kRcodeOk = 0;
constexpr std::uint8_t kRcodeNxdomain = 3;
constexpr std::uint8_t kRcodeServfail = 2;

struct Question {
    std::string name;
    std::uint16_t qtype = kTypeA;
    std::uint16_t qclass = kClassIn;
};

struct ResourceRecord {
    std::string name;
    std::uint16_t type = 0;
    std::uint16_t rclass = kClassIn;
    std::uint32_t ttl = 0;
    Bytes rdata;            // raw bytes as they appear on the wire
    std::string rdata_name; // decompressed target for CNAME/NS/PTR records
};

struct Message {
    std::uint16_t id = 0;
    bool qr = false; // response flag
    std::uint8_t opcode = 0;
    bool aa = false;
    bool tc = false;
    bool rd = true;
    bool ra = false;
    std::uint8_t rcode = kRcodeOk;
    std::vector<Question> questions;
    std::vector<ResourceRecord> answers;
    std::vector<ResourceRecord> authority;
    std::vector<ResourceRecord> additional;
};

/// A-class query with RD set.
Bytes encode_query(std::uint16_t id, std::string_view name, std::uint16_t qtype = kTypeA);

/// Full message encoding (uncompressed names). For records whose rdata_name
/// is set and whose type names a domain (CNAME/NS/PTR), the rdata is encoded
/// from rdata_name; otherwise rdata bytes are copied verbatim.
Bytes encode_message(const Message& m);

/// Throws std::runtime_error on malformed input, including compression
/// pointers that do not point strictly backwards.
Message parse_message(BytesView wire);

std::string ipv4_to_string(std::uint32_t ip); // host byte order
std::optional<std::uint32_t> parse_ipv4(std::string_view text);

/// Convenience: dotted-quad string for a 4-byte A rdata; nullopt otherwise.
std::optional<std::string> a_record_address(const ResourceRecord& rr);

/// An A record for fixture responses.
ResourceRecord make_a(std::string name, std::uint32_t ip, std::uint32_t ttl = 60);

/// A CNAME record for fixture responses.
ResourceRecord make_cname(std::string name, std::string target, std::uint32_t ttl = 60);

} // namespace ctkit::dns
