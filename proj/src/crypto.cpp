#include "ctkit/crypto.hpp"

#include <memory>

#include <openssl/evp.h>
#include <openssl/x509.h>

namespace ctkit::crypto {

namespace {

struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct CtxDeleter {
    void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};

std::unique_ptr<EVP_PKEY, PkeyDeleter> load_spki(BytesView spki_der) {
    const unsigned char* p = spki_der.data();
    EVP_PKEY* key = d2i_PUBKEY(nullptr, &p, static_cast<long>(spki_der.size()));
    return std::unique_ptr<EVP_PKEY, PkeyDeleter>(key);
}

} // namespace

bool verify_sha256(BytesView spki_der, std::uint8_t sig_alg, BytesView data, BytesView signature) {
    auto key = load_spki(spki_der);
    if (!key) return false;
    int base = EVP_PKEY_base_id(key.get());
    if (sig_alg == kSigEcdsa && base != EVP_PKEY_EC) return false;
    if (sig_alg == kSigRsa && base != EVP_PKEY_RSA) return false;
    if (sig_alg != kSigEcdsa && sig_alg != kSigRsa) return false;

    std::unique_ptr<EVP_MD_CTX, CtxDeleter> ctx(EVP_MD_CTX_new());
    if (!ctx) return false;
    if (EVP_DigestVerifyInit(ctx.get(), nullptr, EVP_sha256(), nullptr, key.get()) != 1) {
        return false;
    }
    return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), data.data(),
                            data.size()) == 1;
}

std::uint8_t spki_sig_alg(BytesView spki_der) {
    auto key = load_spki(spki_der);
    if (!key) return 0;
    switch (EVP_PKEY_base_id(key.get())) {
    case EVP_PKEY_EC:
        return kSigEcdsa;
    case EVP_PKEY_RSA:
        return kSigRsa;
    default:
        return 0;
    }
}

} // namespace ctkit::crypto
