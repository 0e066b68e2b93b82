#pragma once

#include <cstdint>
#include <vector>

#include "ctkit/bytes.hpp"

namespace ctkit::merkle {

// RFC 6962 hash tree over an ordered leaf sequence. Leaf and interior hashes
// are domain-separated by a prefix byte (0x00 leaf, 0x01 node); trees split
// at the largest power of two strictly below the leaf count.

struct TreeHead {
    std::uint64_t tree_size = 0;
    Hash root_hash{};
    std::uint64_t timestamp_ms = 0;
    Bytes signature; // empty for locally computed heads
};

struct AuditProof {
    std::uint64_t leaf_index = 0;
    std::uint64_t tree_size = 0;
    std::vector<Hash> path;
};

struct ConsistencyProof {
    std::uint64_t old_size = 0;
    std::uint64_t new_size = 0;
    std::vector<Hash> path;
};

Hash leaf_hash(BytesView leaf);
Hash node_hash(const Hash& left, const Hash& right);

/// Root of the empty tree: the digest of the empty string.
Hash empty_root();

Hash root(std::span<const Bytes> leaves);
Hash root_of_hashes(std::span<const Hash> leaf_hashes);

/// Path of sibling digests from leaf_index to the root. Throws
/// std::out_of_range when leaf_index >= leaves.size().
AuditProof prove_inclusion(std::span<const Bytes> leaves, std::uint64_t leaf_index);
AuditProof prove_inclusion_hashes(std::span<const Hash> leaf_hashes, std::uint64_t leaf_index);

/// Proof that the first old_size leaves are a prefix of the full list.
/// Throws std::out_of_range when old_size > leaves.size() or old_size == 0.
ConsistencyProof prove_consistency(std::span<const Bytes> leaves, std::uint64_t old_size);
ConsistencyProof prove_consistency_hashes(std::span<const Hash> leaf_hashes, std::uint64_t old_size);

// Verifiers return false on any malformed input; they never throw.
bool verify_inclusion(const AuditProof& proof, const Hash& leaf, const Hash& root);
bool verify_consistency(const ConsistencyProof& proof, const Hash& old_root, const Hash& new_root);

} // namespace ctkit::merkle
