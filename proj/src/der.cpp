#include "ctkit/der.hpp"

#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace ctkit::der {

std::optional<std::uint8_t> Parser::peek_tag() const {
    if (pos_ >= end_) return std::nullopt;
    return whole_[pos_];
}

std::optional<Tlv> Parser::next() {
    if (pos_ + 2 > end_) return std::nullopt;
    Tlv t;
    t.start = pos_;
    t.tag = whole_[pos_];
    std::uint8_t first = whole_[pos_ + 1];
    std::size_t header = 2;
    std::size_t len = 0;
    if (first < 0x80) {
        len = first;
    } else if (first == 0x80) {
        return std::nullopt; // indefinite length is not DER
    } else {
        std::size_t nbytes = first & 0x7f;
        if (nbytes > 4 || pos_ + 2 + nbytes > end_) return std::nullopt;
        for (std::size_t i = 0; i < nbytes; ++i) {
            len = (len << 8) | whole_[pos_ + 2 + i];
        }
        header += nbytes;
    }
    t.header_len = header;
    t.content_len = len;
    if (t.end() > end_) return std::nullopt;
    pos_ = t.end();
    return t;
}

std::optional<std::string> decode_oid(BytesView content) {
    if (content.empty()) return std::nullopt;
    std::string out;
    std::uint64_t arc = 0;
    bool first = true;
    for (std::size_t i = 0; i < content.size(); ++i) {
        arc = (arc << 7) | (content[i] & 0x7f);
        if (content[i] & 0x80) {
            if (arc > (std::uint64_t{1} << 56)) return std::nullopt;
            continue;
        }
        if (first) {
            std::uint64_t a = arc < 80 ? arc / 40 : 2;
            std::uint64_t b = arc - a * 40;
            out = std::to_string(a) + "." + std::to_string(b);
            first = false;
        } else {
            out += "." + std::to_string(arc);
        }
        arc = 0;
    }
    if (arc != 0 || first) return std::nullopt; // trailing continuation byte
    return out;
}

Bytes header(std::uint8_t tag, std::size_t content_len) {
    Bytes out;
    out.push_back(tag);
    if (content_len < 0x80) {
        out.push_back(static_cast<std::uint8_t>(content_len));
        return out;
    }
    Bytes len;
    std::size_t v = content_len;
    while (v != 0) {
        len.insert(len.begin(), static_cast<std::uint8_t>(v & 0xff));
        v >>= 8;
    }
    out.push_back(static_cast<std::uint8_t>(0x80 | len.size()));
    append(out, view(len));
    return out;
}

Bytes tlv(std::uint8_t tag, BytesView content) {
    Bytes out = header(tag, content.size());
    append(out, content);
    return out;
}

Bytes oid(std::string_view dotted) {
    std::vector<std::uint64_t> arcs;
    std::uint64_t cur = 0;
    bool have = false;
    for (char c : dotted) {
        if (c == '.') {
            if (!have) throw std::invalid_argument("bad OID: " + std::string(dotted));
            arcs.push_back(cur);
            cur = 0;
            have = false;
        } else if (c >= '0' && c <= '9') {
            cur = cur * 10 + static_cast<std::uint64_t>(c - '0');
            have = true;
        } else {
            throw std::invalid_argument("bad OID: " + std::string(dotted));
        }
    }
    if (!have) throw std::invalid_argument("bad OID: " + std::string(dotted));
    arcs.push_back(cur);
    if (arcs.size() < 2) throw std::invalid_argument("bad OID: " + std::string(dotted));

    Bytes content;
    auto put_arc = [&content](std::uint64_t arc) {
        std::uint8_t tmp[10];
        int n = 0;
        do {
            tmp[n++] = static_cast<std::uint8_t>(arc & 0x7f);
            arc >>= 7;
        } while (arc != 0);
        for (int i = n - 1; i >= 0; --i) {
            content.push_back(static_cast<std::uint8_t>(tmp[i] | (i == 0 ? 0x00 : 0x80)));
        }
    };
    put_arc(arcs[0] * 40 + arcs[1]);
    for (std::size_t i = 2; i < arcs.size(); ++i) put_arc(arcs[i]);
    return tlv(kOid, view(content));
}

Bytes boolean(bool v) {
    Bytes content{static_cast<std::uint8_t>(v ? 0xff : 0x00)};
    return tlv(kBoolean, view(content));
}

Bytes null() { return Bytes{kNull, 0x00}; }

Bytes integer(std::uint64_t v) {
    Bytes mag;
    do {
        mag.insert(mag.begin(), static_cast<std::uint8_t>(v & 0xff));
        v >>= 8;
    } while (v != 0);
    return integer_bytes(view(mag));
}

Bytes integer_bytes(BytesView big_endian) {
    // Strip surplus leading zeros, then pad one back if the value would read
    // as negative.
    std::size_t i = 0;
    while (i + 1 < big_endian.size() && big_endian[i] == 0x00 && !(big_endian[i + 1] & 0x80)) ++i;
    Bytes content;
    if (big_endian.empty()) {
        content.push_back(0x00);
    } else {
        if (big_endian[i] & 0x80) content.push_back(0x00);
        content.insert(content.end(), big_endian.begin() + static_cast<std::ptrdiff_t>(i),
                       big_endian.end());
    }
    return tlv(kInteger, view(content));
}

Bytes octet_string(BytesView content) { return tlv(kOctetString, content); }

Bytes bit_string(BytesView content) {
    Bytes inner;
    inner.push_back(0x00); // no unused bits
    append(inner, content);
    return tlv(kBitString, view(inner));
}

Bytes utf8_string(std::string_view s) { return tlv(kUtf8String, view(s)); }
Bytes printable_string(std::string_view s) { return tlv(kPrintableString, view(s)); }
Bytes ia5_string(std::string_view s) { return tlv(kIa5String, view(s)); }

Bytes time(std::uint64_t epoch_ms) {
    std::time_t secs = static_cast<std::time_t>(epoch_ms / 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    int year = tm.tm_year + 1900;
    char buf[32];
    if (year >= 1950 && year < 2050) {
        std::snprintf(buf, sizeof(buf), "%02d%02d%02d%02d%02d%02dZ", year % 100, tm.tm_mon + 1,
                      tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
        return tlv(kUtcTime, view(std::string_view(buf)));
    }
    std::snprintf(buf, sizeof(buf), "%04d%02d%02d%02d%02d%02dZ", year, tm.tm_mon + 1, tm.tm_mday,
                  tm.tm_hour, tm.tm_min, tm.tm_sec);
    return tlv(kGeneralizedTime, view(std::string_view(buf)));
}

} // namespace ctkit::der
