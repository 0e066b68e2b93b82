#pragma once

#include <cstdint>

#include "ctkit/bytes.hpp"

namespace ctkit::crypto {

// Signature algorithm identifiers from the TLS SignatureAndHashAlgorithm
// registry, as used inside DigitallySigned blobs.
constexpr std::uint8_t kHashSha256 = 4;
constexpr std::uint8_t kSigRsa = 1;
constexpr std::uint8_t kSigEcdsa = 3;

/// Verify a SHA-256 signature -- ECDSA (DER Ecdsa-Sig-Value) or RSA PKCS#1
/// v1.5 -- against a DER SubjectPublicKeyInfo. Any parse failure or key/alg
/// mismatch verifies false; never throws.
bool verify_sha256(BytesView spki_der, std::uint8_t sig_alg, BytesView data, BytesView signature);

/// The TLS signature algorithm a SPKI's key implies: kSigEcdsa, kSigRsa, or
/// 0 when the key type is unsupported.
std::uint8_t spki_sig_alg(BytesView spki_der);

} // namespace ctkit::crypto
