#include "ctkit/tlswire.hpp"

namespace ctkit::wire {

bool Cursor::take(std::size_t n, BytesView& out) {
    if (remaining() < n) return false;
    out = data_.subspan(pos_, n);
    pos_ += n;
    return true;
}

bool Cursor::read_u8(std::uint8_t& out) {
    BytesView v;
    if (!take(1, v)) return false;
    out = v[0];
    return true;
}

bool Cursor::read_u16(std::uint16_t& out) {
    BytesView v;
    if (!take(2, v)) return false;
    out = static_cast<std::uint16_t>((v[0] << 8) | v[1]);
    return true;
}

bool Cursor::read_u24(std::uint32_t& out) {
    BytesView v;
    if (!take(3, v)) return false;
    out = (static_cast<std::uint32_t>(v[0]) << 16) | (static_cast<std::uint32_t>(v[1]) << 8) | v[2];
    return true;
}

bool Cursor::read_u64(std::uint64_t& out) {
    BytesView v;
    if (!take(8, v)) return false;
    out = 0;
    for (int i = 0; i < 8; ++i) out = (out << 8) | v[i];
    return true;
}

bool Cursor::read_fixed(std::size_t n, Bytes& out) {
    BytesView v;
    if (!take(n, v)) return false;
    out.assign(v.begin(), v.end());
    return true;
}

bool Cursor::read_vec8(Bytes& out) {
    std::uint8_t len = 0;
    return read_u8(len) && read_fixed(len, out);
}

bool Cursor::read_vec16(Bytes& out) {
    std::uint16_t len = 0;
    return read_u16(len) && read_fixed(len, out);
}

bool Cursor::read_vec24(Bytes& out) {
    std::uint32_t len = 0;
    return read_u24(len) && read_fixed(len, out);
}

void Builder::put_u8(std::uint8_t v) {
    out_.push_back(v);
}

void Builder::put_u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void Builder::put_u24(std::uint32_t v) {
    out_.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out_.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out_.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void Builder::put_u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out_.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
    }
}

void Builder::put_raw(BytesView data) {
    append(out_, data);
}

void Builder::put_vec16(BytesView content) {
    put_u16(static_cast<std::uint16_t>(content.size()));
    put_raw(content);
}

void Builder::put_vec24(BytesView content) {
    put_u24(static_cast<std::uint32_t>(content.size()));
    put_raw(content);
}

} // namespace ctkit::wire
