#pragma once

#include <cstdint>

#include "ctkit/bytes.hpp"

namespace ctkit::wire {

// Big-endian readers/writers for the RFC 6962 TLS presentation-language
// structures (leaves, SCTs, digitally-signed blobs).

class Cursor {
public:
    explicit Cursor(BytesView data) : data_(data) {}

    bool read_u8(std::uint8_t& out);
    bool read_u16(std::uint16_t& out);
    bool read_u24(std::uint32_t& out);
    bool read_u64(std::uint64_t& out);
    bool read_fixed(std::size_t n, Bytes& out);
    bool read_vec8(Bytes& out);  // 1-byte length prefix
    bool read_vec16(Bytes& out); // 2-byte length prefix
    bool read_vec24(Bytes& out); // 3-byte length prefix

    bool done() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    bool take(std::size_t n, BytesView& out);

    BytesView data_;
    std::size_t pos_ = 0;
};

class Builder {
public:
    void put_u8(std::uint8_t v);
    void put_u16(std::uint16_t v);
    void put_u24(std::uint32_t v);
    void put_u64(std::uint64_t v);
    void put_raw(BytesView data);
    void put_vec16(BytesView content);
    void put_vec24(BytesView content);

    const Bytes& bytes() const { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

} // namespace ctkit::wire
