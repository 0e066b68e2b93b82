#include "ctkit/merkle.hpp"

#include <stdexcept>

#include "ctkit/sha256.hpp"

namespace ctkit::merkle {

namespace {

const std::uint8_t kLeafPrefix = 0x00;
const std::uint8_t kNodePrefix = 0x01;

// Largest power of two strictly less than n; requires n >= 2.
std::uint64_t split_point(std::uint64_t n) {
    std::uint64_t k = 1;
    while ((k << 1) < n) k <<= 1;
    return k;
}

Hash subtree_root(std::span<const Hash> hashes) {
    if (hashes.empty()) return empty_root();
    // Bottom-up level merge; an odd trailing node is promoted unchanged,
    // which reproduces the split-at-largest-power-of-two recursion.
    std::vector<Hash> level(hashes.begin(), hashes.end());
    while (level.size() > 1) {
        std::vector<Hash> next;
        next.reserve((level.size() + 1) / 2);
        std::size_t i = 0;
        for (; i + 1 < level.size(); i += 2) {
            next.push_back(node_hash(level[i], level[i + 1]));
        }
        if (i < level.size()) next.push_back(level[i]);
        level = std::move(next);
    }
    return level[0];
}

// PATH(m, D[n]) per RFC 6962 section 2.1.1.
void audit_path(std::span<const Hash> hashes, std::uint64_t index, std::vector<Hash>& out) {
    std::uint64_t n = hashes.size();
    if (n <= 1) return;
    std::uint64_t k = split_point(n);
    if (index < k) {
        audit_path(hashes.first(k), index, out);
        out.push_back(subtree_root(hashes.subspan(k)));
    } else {
        audit_path(hashes.subspan(k), index - k, out);
        out.push_back(subtree_root(hashes.first(k)));
    }
}

// SUBPROOF(m, D[n], b) per RFC 6962 section 2.1.2.
void subproof(std::uint64_t m, std::span<const Hash> hashes, bool complete, std::vector<Hash>& out) {
    std::uint64_t n = hashes.size();
    if (m == n) {
        if (!complete) out.push_back(subtree_root(hashes));
        return;
    }
    std::uint64_t k = split_point(n);
    if (m <= k) {
        subproof(m, hashes.first(k), complete, out);
        out.push_back(subtree_root(hashes.subspan(k)));
    } else {
        subproof(m - k, hashes.subspan(k), false, out);
        out.push_back(subtree_root(hashes.first(k)));
    }
}

std::vector<Hash> hash_leaves(std::span<const Bytes> leaves) {
    std::vector<Hash> hashes;
    hashes.reserve(leaves.size());
    for (const Bytes& leaf : leaves) hashes.push_back(leaf_hash(leaf));
    return hashes;
}

} // namespace

Hash leaf_hash(BytesView leaf) {
    return sha256_parts({BytesView(&kLeafPrefix, 1), leaf});
}

Hash node_hash(const Hash& left, const Hash& right) {
    return sha256_parts({BytesView(&kNodePrefix, 1), view(left), view(right)});
}

Hash empty_root() {
    return sha256(BytesView{});
}

Hash root(std::span<const Bytes> leaves) {
    auto hashes = hash_leaves(leaves);
    return root_of_hashes(hashes);
}

Hash root_of_hashes(std::span<const Hash> leaf_hashes) {
    return subtree_root(leaf_hashes);
}

AuditProof prove_inclusion(std::span<const Bytes> leaves, std::uint64_t leaf_index) {
    auto hashes = hash_leaves(leaves);
    return prove_inclusion_hashes(hashes, leaf_index);
}

AuditProof prove_inclusion_hashes(std::span<const Hash> leaf_hashes, std::uint64_t leaf_index) {
    if (leaf_index >= leaf_hashes.size()) {
        throw std::out_of_range("merkle: leaf index beyond tree size");
    }
    AuditProof proof;
    proof.leaf_index = leaf_index;
    proof.tree_size = leaf_hashes.size();
    audit_path(leaf_hashes, leaf_index, proof.path);
    return proof;
}

ConsistencyProof prove_consistency(std::span<const Bytes> leaves, std::uint64_t old_size) {
    auto hashes = hash_leaves(leaves);
    return prove_consistency_hashes(hashes, old_size);
}

ConsistencyProof prove_consistency_hashes(std::span<const Hash> leaf_hashes, std::uint64_t old_size) {
    if (old_size == 0 || old_size > leaf_hashes.size()) {
        throw std::out_of_range("merkle: consistency sizes out of range");
    }
    ConsistencyProof proof;
    proof.old_size = old_size;
    proof.new_size = leaf_hashes.size();
    subproof(old_size, leaf_hashes, true, proof.path);
    return proof;
}

bool verify_inclusion(const AuditProof& proof, const Hash& leaf, const Hash& root) {
    if (proof.tree_size == 0 || proof.leaf_index >= proof.tree_size) return false;
    std::uint64_t fn = proof.leaf_index;
    std::uint64_t sn = proof.tree_size - 1;
    Hash r = leaf;
    for (const Hash& c : proof.path) {
        if (sn == 0) return false;
        if ((fn & 1) == 1 || fn == sn) {
            r = node_hash(c, r);
            if ((fn & 1) == 0) {
                while (fn != 0 && (fn & 1) == 0) {
                    fn >>= 1;
                    sn >>= 1;
                }
            }
        } else {
            r = node_hash(r, c);
        }
        fn >>= 1;
        sn >>= 1;
    }
    return sn == 0 && r == root;
}

bool verify_consistency(const ConsistencyProof& proof, const Hash& old_root, const Hash& new_root) {
    const std::uint64_t first = proof.old_size;
    const std::uint64_t second = proof.new_size;
    if (first == 0 || first > second) return false;
    if (first == second) return proof.path.empty() && old_root == new_root;
    if (proof.path.empty()) return false;

    // When the old tree is a complete subtree its root is an implicit first
    // element of the path.
    std::size_t pos = 0;
    Hash fr;
    Hash sr;
    const bool old_is_complete = (first & (first - 1)) == 0;
    if (old_is_complete) {
        fr = old_root;
        sr = old_root;
    } else {
        fr = proof.path[0];
        sr = proof.path[0];
        pos = 1;
    }

    std::uint64_t fn = first - 1;
    std::uint64_t sn = second - 1;
    while ((fn & 1) == 1) {
        fn >>= 1;
        sn >>= 1;
    }
    for (; pos < proof.path.size(); ++pos) {
        const Hash& c = proof.path[pos];
        if (sn == 0) return false;
        if ((fn & 1) == 1 || fn == sn) {
            fr = node_hash(c, fr);
            sr = node_hash(c, sr);
            while (fn != 0 && (fn & 1) == 0) {
                fn >>= 1;
                sn >>= 1;
            }
        } else {
            sr = node_hash(sr, c);
        }
        fn >>= 1;
        sn >>= 1;
    }
    return sn == 0 && fr == old_root && sr == new_root;
}

} // namespace ctkit::merkle
