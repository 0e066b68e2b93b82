#include "ctkit/x509.hpp"

#include <cstdio>
#include <ctime>
#include <stdexcept>
#include <unordered_set>

#include "ctkit/sha256.hpp"

namespace ctkit::x509 {

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error("x509: " + what);
}

der::Tlv expect(std::optional<der::Tlv> t, std::uint8_t tag, const char* what) {
    if (!t) fail(std::string(what) + ": truncated");
    if (t->tag != tag) fail(std::string(what) + ": unexpected tag");
    return *t;
}

int digits2(std::string_view s, std::size_t at) {
    char a = s[at], b = s[at + 1];
    if (a < '0' || a > '9' || b < '0' || b > '9') fail("time: non-digit");
    return (a - '0') * 10 + (b - '0');
}

std::uint64_t parse_time(std::uint8_t tag, BytesView content) {
    std::string s = to_string(content);
    int year = 0;
    std::size_t off = 0;
    if (tag == der::kUtcTime) {
        if (s.size() < 13) fail("time: short UTCTime");
        int yy = digits2(s, 0);
        year = yy < 50 ? 2000 + yy : 1900 + yy;
        off = 2;
    } else if (tag == der::kGeneralizedTime) {
        if (s.size() < 15) fail("time: short GeneralizedTime");
        year = digits2(s, 0) * 100 + digits2(s, 2);
        off = 4;
    } else {
        fail("time: unexpected tag");
    }
    std::tm tm{};
    tm.tm_year = year - 1900;
    tm.tm_mon = digits2(s, off) - 1;
    tm.tm_mday = digits2(s, off + 2);
    tm.tm_hour = digits2(s, off + 4);
    tm.tm_min = digits2(s, off + 6);
    tm.tm_sec = digits2(s, off + 8);
    std::time_t t = timegm(&tm);
    if (t < 0) fail("time: before epoch");
    return static_cast<std::uint64_t>(t) * 1000;
}

bool printable_value_tag(std::uint8_t tag) {
    return tag == der::kUtf8String || tag == der::kPrintableString || tag == der::kIa5String ||
           tag == der::kTeletexString;
}

void parse_name(BytesView whole, const der::Tlv& name, std::string* cn, std::string* org) {
    der::Parser rdns(whole, name.content_start(), name.end());
    while (auto set = rdns.next()) {
        if (set->tag != der::kSet) fail("name: RDN is not a SET");
        der::Parser atavs = rdns.inner(*set);
        while (auto atav = atavs.next()) {
            der::Parser fields = atavs.inner(*atav);
            auto type = fields.next();
            auto value = fields.next();
            if (!type || !value || type->tag != der::kOid) continue;
            auto oid = der::decode_oid(fields.content(*type));
            if (!oid || !printable_value_tag(value->tag)) continue;
            std::string text = to_string(fields.content(*value));
            if (cn && cn->empty() && *oid == kOidCommonName) *cn = text;
            if (org && org->empty() && *oid == kOidOrganization) *org = text;
        }
    }
}

std::string format_ip(BytesView b) {
    char buf[64];
    if (b.size() == 4) {
        std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", b[0], b[1], b[2], b[3]);
        return buf;
    }
    if (b.size() == 16) {
        std::string out;
        for (std::size_t i = 0; i < 16; i += 2) {
            std::snprintf(buf, sizeof(buf), "%x", (b[i] << 8) | b[i + 1]);
            if (i) out += ':';
            out += buf;
        }
        return out;
    }
    return to_hex(b);
}

void parse_san(BytesView whole, std::size_t start, std::size_t len, std::vector<SanEntry>& out) {
    der::Parser p(whole, start, start + len);
    auto seq = expect(p.next(), der::kSequence, "subjectAltName");
    der::Parser names = p.inner(seq);
    while (auto gn = names.next()) {
        SanEntry e;
        if (gn->tag == der::context(2, false)) { // dNSName
            e.type = SanType::dns;
            e.value = to_string(names.content(*gn));
        } else if (gn->tag == der::context(7, false)) { // iPAddress
            e.type = SanType::ip;
            e.value = format_ip(names.content(*gn));
        } else {
            e.type = SanType::other;
            e.value = to_hex(names.content(*gn));
        }
        out.push_back(std::move(e));
    }
}

std::string algorithm_oid(BytesView whole, const der::Tlv& alg) {
    der::Parser p(whole, alg.content_start(), alg.end());
    auto oid_tlv = expect(p.next(), der::kOid, "algorithm");
    auto oid = der::decode_oid(p.content(oid_tlv));
    if (!oid) fail("algorithm: bad OID");
    return *oid;
}

} // namespace

const Extension* ParsedCert::find_extension(std::string_view oid) const {
    for (const auto& e : extensions) {
        if (e.oid == oid) return &e;
    }
    return nullptr;
}

std::vector<std::string> ParsedCert::san_dns() const {
    std::vector<std::string> out;
    for (const auto& e : san) {
        if (e.type == SanType::dns) out.push_back(e.value);
    }
    return out;
}

std::vector<std::string> ParsedCert::san_ip() const {
    std::vector<std::string> out;
    for (const auto& e : san) {
        if (e.type == SanType::ip) out.push_back(e.value);
    }
    return out;
}

ParsedCert parse_certificate(BytesView input) {
    ParsedCert cert;
    cert.der.assign(input.begin(), input.end());
    cert.fingerprint = sha256(view(cert.der));
    BytesView whole = view(cert.der);

    der::Parser top(whole);
    auto outer = expect(top.next(), der::kSequence, "certificate");
    if (!top.empty()) fail("certificate: trailing data");

    der::Parser fields = top.inner(outer);
    cert.tbs = expect(fields.next(), der::kSequence, "tbsCertificate");
    auto sig_alg = expect(fields.next(), der::kSequence, "signatureAlgorithm");
    cert.sig_alg_oid = algorithm_oid(whole, sig_alg);
    expect(fields.next(), der::kBitString, "signatureValue");

    der::Parser t(whole, cert.tbs.content_start(), cert.tbs.end());
    auto first = t.next();
    if (!first) fail("tbs: empty");
    der::Tlv serial_tlv;
    if (first->tag == der::context(0, true)) { // explicit version
        auto next = t.next();
        if (!next) fail("tbs: missing serial");
        serial_tlv = *next;
    } else {
        serial_tlv = *first;
    }
    if (serial_tlv.tag != der::kInteger) fail("tbs: serial is not an INTEGER");
    BytesView serial = t.content(serial_tlv);
    cert.serial.assign(serial.begin(), serial.end());

    expect(t.next(), der::kSequence, "tbs signature algorithm");

    auto issuer = expect(t.next(), der::kSequence, "issuer");
    BytesView issuer_full = t.full(issuer);
    cert.issuer_dn.assign(issuer_full.begin(), issuer_full.end());
    parse_name(whole, issuer, &cert.issuer_cn, &cert.issuer_org);

    auto validity = expect(t.next(), der::kSequence, "validity");
    der::Parser times(whole, validity.content_start(), validity.end());
    auto nb = times.next();
    auto na = times.next();
    if (!nb || !na) fail("validity: truncated");
    cert.not_before_ms = parse_time(nb->tag, times.content(*nb));
    cert.not_after_ms = parse_time(na->tag, times.content(*na));

    auto subject = expect(t.next(), der::kSequence, "subject");
    BytesView subject_full = t.full(subject);
    cert.subject_dn.assign(subject_full.begin(), subject_full.end());
    parse_name(whole, subject, &cert.subject_cn, nullptr);

    cert.spki = expect(t.next(), der::kSequence, "subjectPublicKeyInfo");

    while (auto opt = t.next()) {
        if (opt->tag != der::context(3, true)) continue; // unique IDs: skip
        cert.has_extensions = true;
        cert.exts_wrapper = *opt;
        der::Parser w = t.inner(*opt);
        cert.exts_seq = expect(w.next(), der::kSequence, "extensions");
        der::Parser exts(whole, cert.exts_seq.content_start(), cert.exts_seq.end());
        while (auto e = exts.next()) {
            if (e->tag != der::kSequence) fail("extension: not a SEQUENCE");
            Extension out;
            out.whole = *e;
            der::Parser f = exts.inner(*e);
            auto oid_tlv = expect(f.next(), der::kOid, "extension id");
            auto oid = der::decode_oid(f.content(oid_tlv));
            if (!oid) fail("extension: bad OID");
            out.oid = *oid;
            auto next = f.next();
            if (!next) fail("extension: missing value");
            if (next->tag == der::kBoolean) {
                out.critical = !f.content(*next).empty() && f.content(*next)[0] != 0;
                next = f.next();
                if (!next) fail("extension: missing value");
            }
            if (next->tag != der::kOctetString) fail("extension: value is not an OCTET STRING");
            out.value_start = next->content_start();
            out.value_len = next->content_len;
            if (out.oid == kOidPoison) cert.is_precert = true;
            if (out.oid == kOidEmbeddedScts) cert.has_embedded_scts = true;
            if (out.oid == kOidSubjectAltName) {
                parse_san(whole, out.value_start, out.value_len, cert.san);
            }
            cert.extensions.push_back(out);
        }
    }
    return cert;
}

Hash issuer_key_hash(const ParsedCert& issuer) {
    return sha256(issuer.spki_bytes());
}

Bytes tbs_without_extension(const ParsedCert& cert, std::string_view oid) {
    const Extension* target = cert.find_extension(oid);
    if (!target || !cert.has_extensions) fail("splice: extension not present");
    BytesView whole = view(cert.der);

    Bytes seq_content;
    std::size_t seq_begin = cert.exts_seq.content_start();
    std::size_t seq_end = cert.exts_seq.end();
    append(seq_content, whole.subspan(seq_begin, target->whole.start - seq_begin));
    append(seq_content, whole.subspan(target->whole.end(), seq_end - target->whole.end()));

    Bytes tbs_content;
    std::size_t tbs_begin = cert.tbs.content_start();
    append(tbs_content, whole.subspan(tbs_begin, cert.exts_wrapper.start - tbs_begin));
    if (!seq_content.empty()) {
        Bytes new_seq = der::tlv(der::kSequence, view(seq_content));
        append(tbs_content, view(der::tlv(der::context(3, true), view(new_seq))));
    }
    std::size_t wrapper_end = cert.exts_wrapper.end();
    append(tbs_content, whole.subspan(wrapper_end, cert.tbs.end() - wrapper_end));
    return der::tlv(der::kSequence, view(tbs_content));
}

Bytes tbs_for_sct(const ParsedCert& cert) {
    if (cert.is_precert) return tbs_without_extension(cert, kOidPoison);
    if (cert.has_embedded_scts) return tbs_without_extension(cert, kOidEmbeddedScts);
    BytesView tbs = cert.tbs_bytes();
    return Bytes(tbs.begin(), tbs.end());
}

TbsForSct tbs_for_entry(const ParsedCert& cert, const ParsedCert& issuer) {
    TbsForSct out;
    out.issuer_key_hash = issuer_key_hash(issuer);
    out.tbs = tbs_for_sct(cert);
    return out;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

bool valid_fqdn(std::string_view name) {
    if (!name.empty() && name.back() == '.') name.remove_suffix(1);
    if (name.size() < 3 || name.size() > 253) return false;

    std::size_t label_count = 0;
    std::size_t begin = 0;
    bool last_all_digits = false;
    for (std::size_t i = 0; i <= name.size(); ++i) {
        if (i != name.size() && name[i] != '.') continue;
        std::string_view label = name.substr(begin, i - begin);
        begin = i + 1;
        if (label.empty() || label.size() > 63) return false;
        if (label == "*") {
            if (label_count != 0) return false; // wildcard only as the first label
            ++label_count;
            last_all_digits = false;
            continue;
        }
        if (label.front() == '-' || label.back() == '-') return false;
        bool all_digits = true;
        for (char c : label) {
            bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
            if (!ok) return false;
            if (c < '0' || c > '9') all_digits = false;
        }
        last_all_digits = all_digits;
        ++label_count;
    }
    // A host needs a dot, and an all-numeric rightmost label means an IP
    // literal (1.2.3.4) or a nonsense zone -- both out of scope for DNS work.
    return label_count >= 2 && !last_all_digits;
}

std::vector<std::string> extract_names(const ParsedCert& cert) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    auto add = [&out, &seen](std::string_view raw) {
        std::string name = ascii_lower(raw);
        if (!name.empty() && name.back() == '.') name.pop_back();
        if (!valid_fqdn(name)) return;
        if (seen.insert(name).second) out.push_back(std::move(name));
    };
    if (!cert.subject_cn.empty()) add(cert.subject_cn);
    for (const auto& e : cert.san) {
        if (e.type == SanType::dns) add(e.value);
    }
    return out;
}

} // namespace ctkit::x509
