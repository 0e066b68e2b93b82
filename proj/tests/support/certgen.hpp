#pragma once

#include <memory>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "ctkit/bytes.hpp"
#include "ctkit/sct.hpp"
#include "ctkit/x509.hpp"

// Standalone certificate factory for fixtures: a small DER writer, EVP key
// handling, and precert/final pair issuance with minted SCTs. Kept separate
// from the library so tests do not validate the parser with its own output
// alone -- the writer builds DER bottom-up with no shared code.

namespace testutil::certgen {

using ctkit::Bytes;
using ctkit::BytesView;

// ---- DER construction -------------------------------------------------------

Bytes der_tlv(std::uint8_t tag, BytesView content);
Bytes der_seq(const std::vector<Bytes>& parts);
Bytes der_set(const std::vector<Bytes>& parts);
Bytes der_oid(std::string_view dotted);
Bytes der_int(std::uint64_t value);
Bytes der_int_bytes(BytesView content);
Bytes der_octet(BytesView content);
Bytes der_bitstring(BytesView content);
Bytes der_bool(bool value);
Bytes der_utf8(std::string_view s);
Bytes der_utctime(std::string_view s); // "YYMMDDHHMMSSZ"
Bytes der_null();
Bytes der_explicit(std::uint8_t number, BytesView content);

// ---- keys ------------------------------------------------------------------

struct Key {
    struct Free {
        void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
    };
    std::unique_ptr<EVP_PKEY, Free> pkey;
    Bytes spki; // DER SubjectPublicKeyInfo
};

Key gen_ec_key();
Key gen_rsa_key(int bits = 2048);

/// SHA-256 signature with the key's native scheme: DER Ecdsa-Sig-Value for
/// EC keys, PKCS#1 v1.5 for RSA keys.
Bytes sign_sha256(const Key& key, BytesView data);

// ---- identities ------------------------------------------------------------

struct Authority {
    Key key;
    Bytes name_der; // the DN used as issuer in everything it signs
    Bytes cert_der; // self-signed CA certificate
    ctkit::x509::ParsedCert cert;
};

Authority make_authority(const std::string& org, const std::string& cn);

struct LogIdentity {
    Key key;
    ctkit::sct::LogKey log_key;
};

LogIdentity make_log(const std::string& name);

// ---- end-entity issuance ---------------------------------------------------

enum class ExtOrder { ku_first, san_first };

struct CertSpec {
    Bytes serial;
    std::string subject_cn;
    std::vector<std::string> sans; // dNSName values, order preserved
    ExtOrder ext_order = ExtOrder::ku_first;
    std::string not_before = "240101000000Z";
    std::string not_after = "250101000000Z";
};

/// One leaf certificate signed by `ca`. `tail_extension` is appended after
/// the core extensions when nonempty (poison or embedded-SCT, already DER).
Bytes make_certificate(const Authority& ca, const Key& subject, const CertSpec& spec,
                       const Bytes& tail_extension);

Bytes poison_extension();
Bytes sct_list_extension(BytesView sct_list_tls);

struct IssuedPair {
    Bytes precert_der;
    Bytes final_der;
    ctkit::sct::Sct sct; // as minted, before any verification
};

/// Precertificate built from `pre_spec`, an SCT minted by `log` over its
/// reconstructed signing input, and a final certificate built from
/// `final_spec` embedding that SCT. Pass the same spec twice for a
/// consistent pair; diverge them to plant a mismatch.
IssuedPair issue_pair(const Authority& ca, const LogIdentity& log, const Key& subject,
                      const CertSpec& pre_spec, const CertSpec& final_spec,
                      std::uint64_t sct_timestamp_ms);

} // namespace testutil::certgen
