#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ctkit/bytes.hpp"
#include "ctkit/crypto.hpp"
#include "ctkit/x509.hpp"

namespace ctkit::sct {

// Signed certificate timestamps: wire codecs, signature checks against log
// keys, and the precert/final comparison that surfaces CA re-encoding bugs.

enum class EntryType : std::uint16_t { x509 = 0, precert = 1 };

/// How the SCT reached us; embedded SCTs verify over the precert entry, the
/// other channels may cover either entry type.
enum class Channel { embedded, tls_extension, ocsp_stapled };

enum class Status { unverified, valid, invalid_signature, unknown_log };

const char* to_string(Channel c);
const char* to_string(Status s);

struct Sct {
    std::uint8_t version = 0; // v1
    Hash log_id{};            // SHA-256 over the log's SPKI
    std::uint64_t timestamp_ms = 0;
    Bytes extensions;
    std::uint8_t hash_alg = crypto::kHashSha256;
    std::uint8_t sig_alg = crypto::kSigEcdsa;
    Bytes signature;

    Channel channel = Channel::embedded;
    Status status = Status::unverified;
    std::string note; // why verification could not conclude (odd version, no issuer, ...)
};

Bytes encode_sct(const Sct& s);
Sct parse_sct(BytesView wire); // throws std::runtime_error on malformed bytes

/// SignedCertificateTimestampList: u16 total length, then u16-prefixed SCTs.
/// An unsupported version is kept unverified with a note, not rejected;
/// trailing garbage throws.
Bytes encode_sct_list(const std::vector<Sct>& list);
std::vector<Sct> parse_sct_list(BytesView wire, Channel channel = Channel::embedded);

/// SCTs embedded in a final certificate: the extension value is a DER OCTET
/// STRING wrapping the TLS list. Empty when the extension is absent.
std::vector<Sct> scts_from_cert(const x509::ParsedCert& cert);

/// The DigitallySigned input for an SCT: version, signature_type=0,
/// timestamp, entry type, the entry itself, extensions. For precert entries
/// `signed_entry` is the reconstructed TBS and `issuer_key_hash` must hold
/// 32 bytes; for x509 entries it is the whole certificate and the hash is
/// ignored.
Bytes signed_data(const Sct& s, EntryType type, BytesView signed_entry, BytesView issuer_key_hash);

/// The DigitallySigned input for a signed tree head.
Bytes tree_head_signed_data(std::uint64_t timestamp_ms, std::uint64_t tree_size, const Hash& root);

struct LogKey {
    std::string name;
    Bytes spki_der;
    Hash id{}; // SHA-256 over spki_der
};

LogKey make_log_key(BytesView spki_der, std::string name = {});

enum class VerifyStatus {
    valid,
    log_id_mismatch,
    bad_version,
    bad_algorithm,
    invalid_signature,
    needs_issuer, // precert entry, but no issuer certificate at hand
};

const char* to_string(VerifyStatus s);

/// Check one SCT against a single log key for a known entry encoding.
VerifyStatus verify(const Sct& s, const LogKey& key, EntryType type, BytesView signed_entry,
                    BytesView issuer_key_hash);

/// Check an SCT embedded in a final certificate: the log signed the precert
/// TBS, so the SCT-list extension is spliced out and the entry rebuilt with
/// the issuer's key hash.
VerifyStatus verify_embedded(const Sct& s, const LogKey& key, const x509::ParsedCert& final_cert,
                             const x509::ParsedCert& issuer);

/// Check an SCT delivered next to a certificate (TLS extension or stapled
/// response). For a precert the entry is its TBS reconstruction; for a final
/// certificate the whole-certificate entry is tried first and, when the
/// certificate carries embedded SCTs and an issuer is at hand, the precert
/// reconstruction second.
VerifyStatus verify_delivered(const Sct& s, const LogKey& key, const x509::ParsedCert& cert,
                              const x509::ParsedCert* issuer);

/// Resolve the signing log by id among `known_logs` and verify per channel,
/// updating s.status in place (unverified -> valid / invalid_signature /
/// unknown_log; inconclusive checks leave unverified with a note).
Status verify_sct(Sct& s, const x509::ParsedCert& cert, const x509::ParsedCert* issuer,
                  std::span<const LogKey> known_logs);

// Precert/final comparison ------------------------------------------------

enum class Classification {
    ok,
    tbs_mismatch_san_order, // same SAN entries, different order
    tbs_mismatch_ext_order, // same extensions, different order
    content_mismatch,       // names or issuer differ between the two
    tbs_mismatch_other,     // anything else in the signed bytes
    unknown_log,            // could not verify: the signing log is not configured
};

const char* to_string(Classification c);

struct PairReport {
    Classification cls = Classification::ok;
    std::string detail;
};

struct SctFinding {
    Hash cert_fingerprint{};
    Sct sct;
    Classification classification = Classification::ok;
    std::string diff_summary;
};

/// True when precert and final plausibly describe one issuance: they share
/// the serial, or the issuer, or at least one SAN entry. Callers should not
/// compare pairs that fail this.
bool plausible_pair(const x509::ParsedCert& precert, const x509::ParsedCert& final_cert);

/// Byte-compare the TBS the log signed for the precert against the final
/// certificate's reconstruction, and classify any disagreement.
PairReport compare_pair(const x509::ParsedCert& precert, const x509::ParsedCert& final_cert);

/// Attribute an SCT that failed verification to a root cause by diffing the
/// pair it spans. Throws std::invalid_argument when the two certificates do
/// not plausibly belong to the same issuance.
SctFinding classify_invalid(const x509::ParsedCert& precert, const x509::ParsedCert& final_cert,
                            const Sct& sct);

} // namespace ctkit::sct
