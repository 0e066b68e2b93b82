#include "ctkit/leaf.hpp"

#include <algorithm>
#include <stdexcept>

#include "ctkit/tlswire.hpp"

namespace ctkit::ctlog {

namespace {

[[noreturn]] void fail(const char* what) {
    throw std::runtime_error(std::string("leaf: ") + what);
}

} // namespace

Bytes encode_leaf(const Leaf& leaf) {
    wire::Builder b;
    b.put_u8(leaf.version);
    b.put_u8(leaf.leaf_type);
    b.put_u64(leaf.timestamp_ms);
    b.put_u16(static_cast<std::uint16_t>(leaf.entry_type));
    if (leaf.entry_type == sct::EntryType::precert) {
        b.put_raw(view(leaf.issuer_key_hash));
    }
    b.put_vec24(view(leaf.cert));
    b.put_vec16(view(leaf.extensions));
    return b.take();
}

Leaf parse_leaf(BytesView data) {
    wire::Cursor c(data);
    Leaf leaf;
    std::uint16_t entry_type = 0;
    if (!c.read_u8(leaf.version) || !c.read_u8(leaf.leaf_type) ||
        !c.read_u64(leaf.timestamp_ms) || !c.read_u16(entry_type)) {
        fail("truncated header");
    }
    if (leaf.version != 0) fail("unsupported version");
    if (leaf.leaf_type != 0) fail("unsupported leaf type");
    if (entry_type != 0 && entry_type != 1) fail("unsupported entry type");
    leaf.entry_type = static_cast<sct::EntryType>(entry_type);
    if (leaf.entry_type == sct::EntryType::precert) {
        Bytes ikh;
        if (!c.read_fixed(32, ikh)) fail("truncated issuer key hash");
        std::copy(ikh.begin(), ikh.end(), leaf.issuer_key_hash.begin());
    }
    if (!c.read_vec24(leaf.cert)) fail("truncated certificate");
    if (!c.read_vec16(leaf.extensions)) fail("truncated extensions");
    if (!c.done()) fail("trailing bytes");
    return leaf;
}

Bytes encode_precert_extra(const PrecertChain& pc) {
    wire::Builder b;
    b.put_vec24(view(pc.pre_certificate));
    wire::Builder chain;
    for (const auto& c : pc.chain) {
        chain.put_vec24(view(c));
    }
    b.put_vec24(view(chain.bytes()));
    return b.take();
}

PrecertChain parse_precert_extra(BytesView data) {
    wire::Cursor c(data);
    PrecertChain pc;
    Bytes chain;
    if (!c.read_vec24(pc.pre_certificate) || !c.read_vec24(chain)) fail("truncated precert chain");
    if (!c.done()) fail("trailing bytes in precert chain");
    wire::Cursor items(view(chain));
    while (!items.done()) {
        Bytes one;
        if (!items.read_vec24(one)) fail("truncated chain certificate");
        pc.chain.push_back(std::move(one));
    }
    return pc;
}

Bytes encode_x509_extra(const std::vector<Bytes>& chain) {
    wire::Builder items;
    for (const auto& c : chain) {
        items.put_vec24(view(c));
    }
    wire::Builder b;
    b.put_vec24(view(items.bytes()));
    return b.take();
}

std::vector<Bytes> parse_x509_extra(BytesView data) {
    wire::Cursor c(data);
    Bytes chain;
    if (!c.read_vec24(chain)) fail("truncated chain");
    if (!c.done()) fail("trailing bytes in chain");
    std::vector<Bytes> out;
    wire::Cursor items(view(chain));
    while (!items.done()) {
        Bytes one;
        if (!items.read_vec24(one)) fail("truncated chain certificate");
        out.push_back(std::move(one));
    }
    return out;
}

ExtractedCert extract_certificate(const Entry& e) {
    ExtractedCert out;
    try {
        Leaf leaf = parse_leaf(view(e.leaf_input));
        out.entry_type = leaf.entry_type;
        out.timestamp_ms = leaf.timestamp_ms;
        if (leaf.entry_type == sct::EntryType::x509) {
            out.der = leaf.cert;
            out.parse_ok = true;
        } else {
            PrecertChain pc = parse_precert_extra(view(e.extra_data));
            out.der = std::move(pc.pre_certificate);
            out.parse_ok = true;
        }
    } catch (const std::exception&) {
        out.der = e.leaf_input;
        out.parse_ok = false;
    }
    return out;
}

} // namespace ctkit::ctlog
