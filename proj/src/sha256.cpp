#include "ctkit/sha256.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace ctkit {

Hash sha256(BytesView data) {
    return sha256_parts({data});
}

Hash sha256_parts(std::initializer_list<BytesView> parts) {
    Hash out{};
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr) throw std::runtime_error("EVP_MD_CTX_new failed");
    unsigned int len = 0;
    bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1;
    for (BytesView p : parts) {
        if (!ok) break;
        ok = EVP_DigestUpdate(ctx, p.data(), p.size()) == 1;
    }
    ok = ok && EVP_DigestFinal_ex(ctx, out.data(), &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok || len != out.size()) throw std::runtime_error("sha256 failed");
    return out;
}

} // namespace ctkit
