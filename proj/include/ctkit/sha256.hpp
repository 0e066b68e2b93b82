#pragma once

#include <initializer_list>

#include "ctkit/bytes.hpp"

namespace ctkit {

Hash sha256(BytesView data);

/// Hash the concatenation of several buffers without copying.
Hash sha256_parts(std::initializer_list<BytesView> parts);

} // namespace ctkit
