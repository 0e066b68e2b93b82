#pragma once

#include <span>

#include "ctkit/bytes.hpp"
#include "ctkit/sha256.hpp"

namespace testutil {

// Textbook recursive hash-tree root, kept deliberately independent of the
// production implementation: direct recursion, explicit prefix bytes.

inline ctkit::Hash naive_leaf(ctkit::BytesView leaf) {
    ctkit::Bytes buf;
    buf.push_back(0x00);
    ctkit::append(buf, leaf);
    return ctkit::sha256(ctkit::view(buf));
}

inline ctkit::Hash naive_root(std::span<const ctkit::Bytes> leaves) {
    using namespace ctkit;
    if (leaves.empty()) return sha256(BytesView{});
    if (leaves.size() == 1) return naive_leaf(view(leaves[0]));
    std::size_t split = 1;
    while (split * 2 < leaves.size()) split *= 2;
    Hash left = naive_root(leaves.first(split));
    Hash right = naive_root(leaves.subspan(split));
    Bytes buf;
    buf.push_back(0x01);
    append(buf, view(left));
    append(buf, view(right));
    return sha256(view(buf));
}

} // namespace testutil
