#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ctkit/bytes.hpp"
#include "ctkit/der.hpp"

namespace ctkit::x509 {

// X.509 certificate reader tailored to transparency work: it keeps the raw
// DER plus byte ranges for every part we later hash, compare, or splice, so
// nothing is ever re-encoded behind the signer's back.

constexpr char kOidCommonName[] = "2.5.4.3";
constexpr char kOidOrganization[] = "2.5.4.10";
constexpr char kOidSubjectAltName[] = "2.5.29.17";
constexpr char kOidBasicConstraints[] = "2.5.29.19";
constexpr char kOidKeyUsage[] = "2.5.29.15";
constexpr char kOidPoison[] = "1.3.6.1.4.1.11129.2.4.3";
constexpr char kOidEmbeddedScts[] = "1.3.6.1.4.1.11129.2.4.2";

struct Extension {
    std::string oid;
    bool critical = false;
    der::Tlv whole;          // the Extension SEQUENCE inside the certificate DER
    std::size_t value_start = 0; // content of extnValue OCTET STRING
    std::size_t value_len = 0;
};

enum class SanType { dns, ip, other };

struct SanEntry {
    SanType type = SanType::other;
    std::string value; // dNSName text, or formatted IP address
};

struct ParsedCert {
    Bytes der;          // complete certificate, owned
    Hash fingerprint{}; // digest of `der`; the dedup key across entries

    der::Tlv tbs;
    der::Tlv spki;
    bool has_extensions = false;
    der::Tlv exts_wrapper; // the [3] EXPLICIT tag
    der::Tlv exts_seq;     // the Extensions SEQUENCE inside it

    Bytes serial; // INTEGER content, minimal big-endian
    Bytes issuer_dn;
    Bytes subject_dn;
    std::string issuer_cn;
    std::string issuer_org;
    std::string subject_cn;
    std::uint64_t not_before_ms = 0;
    std::uint64_t not_after_ms = 0;
    std::string sig_alg_oid;

    std::vector<Extension> extensions;
    std::vector<SanEntry> san; // GeneralNames in certificate order

    bool is_precert = false;        // poison extension present
    bool has_embedded_scts = false; // SCT list extension present

    BytesView tbs_bytes() const { return BytesView(der).subspan(tbs.start, tbs.header_len + tbs.content_len); }
    BytesView spki_bytes() const { return BytesView(der).subspan(spki.start, spki.header_len + spki.content_len); }
    BytesView ext_value(const Extension& e) const { return BytesView(der).subspan(e.value_start, e.value_len); }
    const Extension* find_extension(std::string_view oid) const;
    std::vector<std::string> san_dns() const;
    std::vector<std::string> san_ip() const;
};

/// Parse one DER certificate. Throws std::runtime_error on malformed input.
ParsedCert parse_certificate(BytesView der);

/// SHA-256 over the issuer's SubjectPublicKeyInfo, as logs bind precerts.
Hash issuer_key_hash(const ParsedCert& issuer);

/// TBS with one extension spliced out: only the three enclosing length
/// headers are rewritten, every other byte is copied verbatim. Removing the
/// sole extension drops the [3] wrapper entirely. Throws if absent.
Bytes tbs_without_extension(const ParsedCert& cert, std::string_view oid);

/// The TBSCertificate a log's signature covers: poison removed for precerts,
/// embedded SCT list removed for finals that carry one, otherwise as-is.
Bytes tbs_for_sct(const ParsedCert& cert);

/// The full precert-entry identity: reconstructed TBS plus the hash binding
/// it to its issuer.
struct TbsForSct {
    Hash issuer_key_hash{};
    Bytes tbs;
};

TbsForSct tbs_for_entry(const ParsedCert& cert, const ParsedCert& issuer);

std::string ascii_lower(std::string_view s);

/// Accepts lowercased host names: 2..253 chars, >= 2 dot-separated labels of
/// 1..63 letters/digits/hyphens (no edge hyphens), optional leading "*."
/// wildcard. An all-numeric rightmost label -- dotted-quad IPv4 literals
/// included -- is rejected.
bool valid_fqdn(std::string_view name);

/// DNS names the certificate speaks for: subject CN first (when it parses as
/// a host name) then dNSName SAN entries; lowercased, filtered through
/// valid_fqdn, deduplicated with order preserved.
std::vector<std::string> extract_names(const ParsedCert& cert);

} // namespace ctkit::x509
