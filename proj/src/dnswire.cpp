#include "ctkit/dnswire.hpp"

#include <cctype>
#include <cstdio>
#include <charconv>
#include <stdexcept>

namespace ctkit::dns {

namespace {

[[noreturn]] void fail(const char* what) {
    throw std::runtime_error(std::string("dns: ") + what);
}

void put_u16(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(Bytes& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_name(Bytes& out, std::string_view name) {
    std::size_t pos = 0;
    while (pos < name.size()) {
        std::size_t dot = name.find('.', pos);
        std::size_t len = (dot == std::string_view::npos ? name.size() : dot) - pos;
        if (len == 0 || len > 63) fail("bad label length in name");
        out.push_back(static_cast<std::uint8_t>(len));
        out.insert(out.end(), name.begin() + static_cast<std::ptrdiff_t>(pos),
                   name.begin() + static_cast<std::ptrdiff_t>(pos + len));
        if (dot == std::string_view::npos) break;
        pos = dot + 1;
    }
    out.push_back(0);
}

class Reader {
public:
    explicit Reader(BytesView wire) : wire_(wire) {}

    std::uint8_t u8() {
        if (pos_ >= wire_.size()) fail("truncated");
        return wire_[pos_++];
    }
    std::uint16_t u16() {
        std::uint16_t hi = u8();
        return static_cast<std::uint16_t>(hi << 8 | u8());
    }
    std::uint32_t u32() {
        std::uint32_t hi = u16();
        return hi << 16 | u16();
    }
    Bytes raw(std::size_t n) {
        if (wire_.size() - pos_ < n) fail("truncated");
        Bytes out(wire_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  wire_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return out;
    }

    /// Decompress a name starting at the cursor; pointers must aim strictly
    /// before their own position, which bounds the walk.
    std::string name() {
        std::string out = name_at(pos_, pos_);
        return out;
    }

    /// Decompress a name at an arbitrary offset without moving the cursor.
    std::string name_at(std::size_t offset) {
        std::size_t scratch = offset;
        return name_at(offset, scratch);
    }

    std::size_t position() const { return pos_; }
    std::size_t size() const { return wire_.size(); }

private:
    std::string name_at(std::size_t offset, std::size_t& cursor) {
        std::string out;
        std::size_t at = offset;
        bool jumped = false;
        std::size_t after_first_pointer = 0;
        for (;;) {
            if (at >= wire_.size()) fail("name runs off the message");
            std::uint8_t len = wire_[at];
            if ((len & 0xC0) == 0xC0) {
                if (at + 1 >= wire_.size()) fail("truncated pointer");
                std::size_t target =
                    (static_cast<std::size_t>(len & 0x3F) << 8) | wire_[at + 1];
                if (target >= at) fail("compression pointer does not point backwards");
                if (!jumped) {
                    after_first_pointer = at + 2;
                    jumped = true;
                }
                at = target;
                continue;
            }
            if ((len & 0xC0) != 0) fail("reserved label type");
            if (len == 0) {
                cursor = jumped ? after_first_pointer : at + 1;
                return out;
            }
            if (at + 1 + len > wire_.size()) fail("label runs off the message");
            if (!out.empty()) out.push_back('.');
            out.append(reinterpret_cast<const char*>(wire_.data() + at + 1), len);
            at += 1 + len;
        }
    }

    BytesView wire_;
    std::size_t pos_ = 0;
};

bool names_rdata(std::uint16_t type) {
    return type == kTypeCname || type == kTypeNs || type == 12 /* PTR */;
}

ResourceRecord read_record(Reader& r) {
    ResourceRecord rr;
    rr.name = r.name();
    rr.type = r.u16();
    rr.rclass = r.u16();
    rr.ttl = r.u32();
    std::uint16_t rdlen = r.u16();
    std::size_t rdata_at = r.position();
    rr.rdata = r.raw(rdlen);
    if (names_rdata(rr.type) && rdlen > 0) {
        rr.rdata_name = r.name_at(rdata_at);
    }
    return rr;
}

} // namespace

Bytes encode_query(std::uint16_t id, std::string_view name, std::uint16_t qtype) {
    Message m;
    m.id = id;
    m.rd = true;
    m.questions.push_back({std::string(name), qtype, kClassIn});
    return encode_message(m);
}

Bytes encode_message(const Message& m) {
    Bytes out;
    put_u16(out, m.id);
    std::uint16_t flags = 0;
    if (m.qr) flags |= 0x8000;
    flags |= static_cast<std::uint16_t>((m.opcode & 0x0F) << 11);
    if (m.aa) flags |= 0x0400;
    if (m.tc) flags |= 0x0200;
    if (m.rd) flags |= 0x0100;
    if (m.ra) flags |= 0x0080;
    flags |= m.rcode & 0x0F;
    put_u16(out, flags);
    put_u16(out, static_cast<std::uint16_t>(m.questions.size()));
    put_u16(out, static_cast<std::uint16_t>(m.answers.size()));
    put_u16(out, static_cast<std::uint16_t>(m.authority.size()));
    put_u16(out, static_cast<std::uint16_t>(m.additional.size()));
    for (const auto& q : m.questions) {
        put_name(out, q.name);
        put_u16(out, q.qtype);
        put_u16(out, q.qclass);
    }
    auto put_rr = [&out](const ResourceRecord& rr) {
        put_name(out, rr.name);
        put_u16(out, rr.type);
        put_u16(out, rr.rclass);
        put_u32(out, rr.ttl);
        if (!rr.rdata_name.empty() && names_rdata(rr.type)) {
            Bytes target;
            put_name(target, rr.rdata_name);
            put_u16(out, static_cast<std::uint16_t>(target.size()));
            out.insert(out.end(), target.begin(), target.end());
        } else {
            put_u16(out, static_cast<std::uint16_t>(rr.rdata.size()));
            out.insert(out.end(), rr.rdata.begin(), rr.rdata.end());
        }
    };
    for (const auto& rr : m.answers) put_rr(rr);
    for (const auto& rr : m.authority) put_rr(rr);
    for (const auto& rr : m.additional) put_rr(rr);
    return out;
}

Message parse_message(BytesView wire) {
    Reader r(wire);
    Message m;
    m.id = r.u16();
    std::uint16_t flags = r.u16();
    m.qr = (flags & 0x8000) != 0;
    m.opcode = static_cast<std::uint8_t>((flags >> 11) & 0x0F);
    m.aa = (flags & 0x0400) != 0;
    m.tc = (flags & 0x0200) != 0;
    m.rd = (flags & 0x0100) != 0;
    m.ra = (flags & 0x0080) != 0;
    m.rcode = static_cast<std::uint8_t>(flags & 0x0F);
    std::uint16_t qd = r.u16();
    std::uint16_t an = r.u16();
    std::uint16_t ns = r.u16();
    std::uint16_t ar = r.u16();
    for (std::uint16_t i = 0; i < qd; ++i) {
        Question q;
        q.name = r.name();
        q.qtype = r.u16();
        q.qclass = r.u16();
        m.questions.push_back(std::move(q));
    }
    for (std::uint16_t i = 0; i < an; ++i) m.answers.push_back(read_record(r));
    for (std::uint16_t i = 0; i < ns; ++i) m.authority.push_back(read_record(r));
    for (std::uint16_t i = 0; i < ar; ++i) m.additional.push_back(read_record(r));
    return m;
}

std::string ipv4_to_string(std::uint32_t ip) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", ip >> 24 & 0xFF, ip >> 16 & 0xFF, ip >> 8 & 0xFF,
                  ip & 0xFF);
    return buf;
}

std::optional<std::uint32_t> parse_ipv4(std::string_view text) {
    std::uint32_t ip = 0;
    std::size_t pos = 0;
    for (int octet = 0; octet < 4; ++octet) {
        if (octet > 0) {
            if (pos >= text.size() || text[pos] != '.') return std::nullopt;
            ++pos;
        }
        std::size_t end = pos;
        while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
        if (end == pos || end - pos > 3) return std::nullopt;
        unsigned value = 0;
        std::from_chars(text.data() + pos, text.data() + end, value);
        if (value > 255) return std::nullopt;
        ip = ip << 8 | value;
        pos = end;
    }
    if (pos != text.size()) return std::nullopt;
    return ip;
}

std::optional<std::string> a_record_address(const ResourceRecord& rr) {
    if (rr.type != kTypeA || rr.rdata.size() != 4) return std::nullopt;
    std::uint32_t ip = static_cast<std::uint32_t>(rr.rdata[0]) << 24 |
                       static_cast<std::uint32_t>(rr.rdata[1]) << 16 |
                       static_cast<std::uint32_t>(rr.rdata[2]) << 8 | rr.rdata[3];
    return ipv4_to_string(ip);
}

ResourceRecord make_a(std::string name, std::uint32_t ip, std::uint32_t ttl) {
    ResourceRecord rr;
    rr.name = std::move(name);
    rr.type = kTypeA;
    rr.ttl = ttl;
    rr.rdata = {static_cast<std::uint8_t>(ip >> 24), static_cast<std::uint8_t>(ip >> 16),
                static_cast<std::uint8_t>(ip >> 8), static_cast<std::uint8_t>(ip)};
    return rr;
}

ResourceRecord make_cname(std::string name, std::string target, std::uint32_t ttl) {
    ResourceRecord rr;
    rr.name = std::move(name);
    rr.type = kTypeCname;
    rr.ttl = ttl;
    rr.rdata_name = std::move(target);
    return rr;
}

} // namespace ctkit::dns
