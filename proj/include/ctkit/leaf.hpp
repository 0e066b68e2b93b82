#pragma once

#include <cstdint>
#include <vector>

#include "ctkit/bytes.hpp"
#include "ctkit/sct.hpp"

namespace ctkit::ctlog {

// Codecs for what logs actually serve: the MerkleTreeLeaf in leaf_input and
// the chain material in extra_data.

struct Leaf {
    std::uint8_t version = 0;   // v1
    std::uint8_t leaf_type = 0; // timestamped_entry
    std::uint64_t timestamp_ms = 0;
    sct::EntryType entry_type = sct::EntryType::x509;
    Bytes cert;              // x509 entry: certificate DER; precert entry: reconstructed TBS
    Hash issuer_key_hash{};  // precert entries only
    Bytes extensions;
};

Bytes encode_leaf(const Leaf& leaf);
Leaf parse_leaf(BytesView wire); // throws std::runtime_error

/// extra_data for precert entries: the logged precertificate plus its chain.
struct PrecertChain {
    Bytes pre_certificate;
    std::vector<Bytes> chain;
};

Bytes encode_precert_extra(const PrecertChain& pc);
PrecertChain parse_precert_extra(BytesView wire);

/// extra_data for x509 entries: the chain above the end-entity certificate.
Bytes encode_x509_extra(const std::vector<Bytes>& chain);
std::vector<Bytes> parse_x509_extra(BytesView wire);

struct Entry {
    std::uint64_t index = 0;
    Bytes leaf_input;
    Bytes extra_data;
};

/// The certificate of record for an entry: the end-entity DER from the leaf
/// for x509 entries, the precertificate from extra_data for precert entries.
/// On any decode failure `der` falls back to the raw leaf_input and parse_ok
/// goes false; fingerprints stay well-defined either way.
struct ExtractedCert {
    Bytes der;
    bool parse_ok = false;
    sct::EntryType entry_type = sct::EntryType::x509;
    std::uint64_t timestamp_ms = 0;
};

ExtractedCert extract_certificate(const Entry& e); // never throws

} // namespace ctkit::ctlog
