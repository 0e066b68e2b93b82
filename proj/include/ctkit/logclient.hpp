#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctkit/bytes.hpp"
#include "ctkit/leaf.hpp"
#include "ctkit/merkle.hpp"
#include "ctkit/sct.hpp"
#include "ctkit/store.hpp"

namespace httplib {
class Client;
}

namespace ctkit::ctlog {

// HTTP client for the v1 log API plus the audit loop that keeps a local
// archive consistent with what the log signs.

struct LogDescriptor {
    std::string name; // short handle, also the archive key
    std::string url;  // scheme://host[:port][/prefix]
    Bytes spki_der;   // log public key (DER SubjectPublicKeyInfo)
    std::string inclusion_date; // optional metadata: when browsers began requiring it
};

/// Load descriptors from a JSON config: a top-level "logs" array of objects
/// with "name", "url", and base64 "public_key". Throws on malformed input.
std::vector<LogDescriptor> load_log_config(const std::string& path);

struct ClientOptions {
    std::size_t batch_size = 256;  // entries per get-entries request
    int max_retries = 5;           // after the initial attempt
    int backoff_initial_ms = 100;  // doubled per retry
    int timeout_s = 10;
    bool verify_tls = true;
};

class LogClient {
public:
    using Options = ClientOptions;

    explicit LogClient(LogDescriptor log, Options opt = {});
    ~LogClient();

    const LogDescriptor& log() const { return log_; }
    const Hash& log_id() const; // digest of the configured public key

    /// Fetch and verify the current signed tree head. Throws on transport
    /// failure, a bad signature, or a tree size below one this client
    /// already verified (append-only violation).
    merkle::TreeHead get_tree_head();

    /// Fetch [first, last] inclusive, batching internally. The log may serve
    /// short ranges; requests continue until the span is complete. Throws
    /// std::invalid_argument when first > last.
    std::vector<Entry> get_entries(std::uint64_t first, std::uint64_t last);

    std::vector<Hash> get_consistency(std::uint64_t old_size, std::uint64_t new_size);

    struct InclusionProof {
        std::uint64_t leaf_index = 0;
        std::vector<Hash> audit_path;
    };
    InclusionProof get_proof_by_hash(const Hash& leaf_hash, std::uint64_t tree_size);

private:
    std::string request(const std::string& path);

    LogDescriptor log_;
    Options opt_;
    std::string prefix_; // path prefix from the URL
    std::unique_ptr<httplib::Client> http_;
    sct::LogKey key_;
    std::optional<std::uint64_t> verified_size_; // largest tree size this client verified
};

struct AuditReport {
    std::uint64_t log_size = 0;      // tree size the log signed
    std::uint64_t stored_before = 0; // entries on disk at the start
    std::uint64_t stored_after = 0;
    bool signature_valid = false; // tree head signature
    bool monotonic = true;        // tree never shrank vs the archived head
    bool consistent = true;       // consistency proof from the archived head
    bool root_matches = false;    // recomputed root equals the signed root
    std::vector<std::string> problems;

    bool ok() const { return signature_valid && monotonic && consistent && root_matches; }
};

struct AuditOptions {
    // Audit only the first `upto` entries; default is the whole signed tree.
    // A prefix shorter than the tree is checked via a consistency proof.
    std::optional<std::uint64_t> upto;
};

/// Fetch the head, extend the archive from the high-water mark, recompute
/// the root over the stored prefix, and check consistency with the archived
/// head. Saves the new head only when every check passes.
AuditReport audit_fetch(LogClient& client, store::EntryStore& archive,
                        const AuditOptions& opt = {});

} // namespace ctkit::ctlog
