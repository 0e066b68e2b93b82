#include "ctkit/sct.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "ctkit/sha256.hpp"
#include "ctkit/tlswire.hpp"

namespace ctkit::sct {

namespace {

[[noreturn]] void fail(const char* what) {
    throw std::runtime_error(std::string("sct: ") + what);
}

constexpr std::uint8_t kSigTypeCertificateTimestamp = 0;
constexpr std::uint8_t kSigTypeTreeHash = 1;

} // namespace

Bytes encode_sct(const Sct& s) {
    wire::Builder b;
    b.put_u8(s.version);
    b.put_raw(view(s.log_id));
    b.put_u64(s.timestamp_ms);
    b.put_vec16(view(s.extensions));
    b.put_u8(s.hash_alg);
    b.put_u8(s.sig_alg);
    b.put_vec16(view(s.signature));
    return b.take();
}

Sct parse_sct(BytesView data) {
    wire::Cursor c(data);
    Sct s;
    Bytes id;
    if (!c.read_u8(s.version) || !c.read_fixed(32, id) || !c.read_u64(s.timestamp_ms) ||
        !c.read_vec16(s.extensions) || !c.read_u8(s.hash_alg) || !c.read_u8(s.sig_alg) ||
        !c.read_vec16(s.signature)) {
        fail("truncated");
    }
    if (!c.done()) fail("trailing bytes");
    std::copy(id.begin(), id.end(), s.log_id.begin());
    if (s.version != 0) s.note = "unsupported version " + std::to_string(s.version);
    return s;
}

Bytes encode_sct_list(const std::vector<Sct>& list) {
    wire::Builder inner;
    for (const auto& s : list) {
        inner.put_vec16(view(encode_sct(s)));
    }
    wire::Builder outer;
    outer.put_vec16(view(inner.bytes()));
    return outer.take();
}

std::vector<Sct> parse_sct_list(BytesView data, Channel channel) {
    wire::Cursor c(data);
    Bytes inner;
    if (!c.read_vec16(inner)) fail("list truncated");
    if (!c.done()) fail("list trailing bytes");
    std::vector<Sct> out;
    wire::Cursor items(view(inner));
    while (!items.done()) {
        Bytes one;
        if (!items.read_vec16(one)) fail("list item truncated");
        Sct s = parse_sct(view(one));
        s.channel = channel;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Sct> scts_from_cert(const x509::ParsedCert& cert) {
    const x509::Extension* ext = cert.find_extension(x509::kOidEmbeddedScts);
    if (!ext) return {};
    der::Parser p(view(cert.der), ext->value_start, ext->value_start + ext->value_len);
    auto wrapped = p.next();
    if (!wrapped || wrapped->tag != der::kOctetString) fail("embedded list: not an OCTET STRING");
    return parse_sct_list(p.content(*wrapped), Channel::embedded);
}

Bytes signed_data(const Sct& s, EntryType type, BytesView signed_entry, BytesView issuer_key_hash) {
    wire::Builder b;
    b.put_u8(s.version);
    b.put_u8(kSigTypeCertificateTimestamp);
    b.put_u64(s.timestamp_ms);
    b.put_u16(static_cast<std::uint16_t>(type));
    if (type == EntryType::precert) {
        if (issuer_key_hash.size() != 32) fail("precert entry needs a 32-byte issuer key hash");
        b.put_raw(issuer_key_hash);
    }
    b.put_vec24(signed_entry);
    b.put_vec16(view(s.extensions));
    return b.take();
}

Bytes tree_head_signed_data(std::uint64_t timestamp_ms, std::uint64_t tree_size, const Hash& root) {
    wire::Builder b;
    b.put_u8(0); // v1
    b.put_u8(kSigTypeTreeHash);
    b.put_u64(timestamp_ms);
    b.put_u64(tree_size);
    b.put_raw(view(root));
    return b.take();
}

LogKey make_log_key(BytesView spki_der, std::string name) {
    LogKey key;
    key.name = std::move(name);
    key.spki_der.assign(spki_der.begin(), spki_der.end());
    key.id = sha256(spki_der);
    return key;
}

const char* to_string(Channel c) {
    switch (c) {
    case Channel::embedded: return "embedded";
    case Channel::tls_extension: return "tls_extension";
    case Channel::ocsp_stapled: return "ocsp_stapled";
    }
    return "unknown";
}

const char* to_string(Status s) {
    switch (s) {
    case Status::unverified: return "unverified";
    case Status::valid: return "valid";
    case Status::invalid_signature: return "invalid_signature";
    case Status::unknown_log: return "unknown_log";
    }
    return "unknown";
}

const char* to_string(VerifyStatus s) {
    switch (s) {
    case VerifyStatus::valid: return "valid";
    case VerifyStatus::log_id_mismatch: return "log_id_mismatch";
    case VerifyStatus::bad_version: return "bad_version";
    case VerifyStatus::bad_algorithm: return "bad_algorithm";
    case VerifyStatus::invalid_signature: return "invalid_signature";
    case VerifyStatus::needs_issuer: return "needs_issuer";
    }
    return "unknown";
}

VerifyStatus verify(const Sct& s, const LogKey& key, EntryType type, BytesView signed_entry,
                    BytesView issuer_key_hash) {
    if (s.version != 0) return VerifyStatus::bad_version;
    if (s.hash_alg != crypto::kHashSha256) return VerifyStatus::bad_algorithm;
    if (s.sig_alg != crypto::kSigRsa && s.sig_alg != crypto::kSigEcdsa) {
        return VerifyStatus::bad_algorithm;
    }
    if (s.log_id != key.id) return VerifyStatus::log_id_mismatch;
    Bytes data = signed_data(s, type, signed_entry, issuer_key_hash);
    bool ok = crypto::verify_sha256(view(key.spki_der), s.sig_alg, view(data), view(s.signature));
    return ok ? VerifyStatus::valid : VerifyStatus::invalid_signature;
}

VerifyStatus verify_embedded(const Sct& s, const LogKey& key, const x509::ParsedCert& final_cert,
                             const x509::ParsedCert& issuer) {
    Bytes tbs = x509::tbs_for_sct(final_cert);
    Hash ikh = x509::issuer_key_hash(issuer);
    return verify(s, key, EntryType::precert, view(tbs), view(ikh));
}

VerifyStatus verify_delivered(const Sct& s, const LogKey& key, const x509::ParsedCert& cert,
                              const x509::ParsedCert* issuer) {
    if (cert.is_precert) {
        if (!issuer) return VerifyStatus::needs_issuer;
        Bytes tbs = x509::tbs_for_sct(cert);
        Hash ikh = x509::issuer_key_hash(*issuer);
        return verify(s, key, EntryType::precert, view(tbs), view(ikh));
    }
    VerifyStatus st = verify(s, key, EntryType::x509, view(cert.der), {});
    if (st != VerifyStatus::invalid_signature) return st;
    if (cert.has_embedded_scts && issuer) {
        VerifyStatus retry = verify_embedded(s, key, cert, *issuer);
        if (retry == VerifyStatus::valid) return retry;
    }
    return st;
}

Status verify_sct(Sct& s, const x509::ParsedCert& cert, const x509::ParsedCert* issuer,
                  std::span<const LogKey> known_logs) {
    const LogKey* key = nullptr;
    for (const auto& k : known_logs) {
        if (k.id == s.log_id) {
            key = &k;
            break;
        }
    }
    if (!key) {
        s.status = Status::unknown_log;
        return s.status;
    }
    VerifyStatus low;
    if (s.channel == Channel::embedded) {
        if (!issuer) {
            s.status = Status::unverified;
            s.note = "issuer unavailable for precert entry reconstruction";
            return s.status;
        }
        low = verify_embedded(s, *key, cert, *issuer);
    } else {
        low = verify_delivered(s, *key, cert, issuer);
    }
    switch (low) {
    case VerifyStatus::valid:
        s.status = Status::valid;
        break;
    case VerifyStatus::invalid_signature:
        s.status = Status::invalid_signature;
        break;
    case VerifyStatus::needs_issuer:
        s.status = Status::unverified;
        s.note = "issuer unavailable for precert entry reconstruction";
        break;
    case VerifyStatus::bad_version:
    case VerifyStatus::bad_algorithm:
    case VerifyStatus::log_id_mismatch:
        s.status = Status::unverified;
        if (s.note.empty()) s.note = to_string(low);
        break;
    }
    return s.status;
}

namespace {

using SanKey = std::pair<int, std::string>;

std::vector<SanKey> san_keys(const x509::ParsedCert& c) {
    std::vector<SanKey> out;
    out.reserve(c.san.size());
    for (const auto& e : c.san) {
        out.emplace_back(static_cast<int>(e.type), e.value);
    }
    return out;
}

/// Extension TLVs that both variants are expected to carry: the precert's
/// poison and the final's SCT list are artifacts of logging, not content.
std::vector<std::string> core_extensions(const x509::ParsedCert& c) {
    std::vector<std::string> out;
    for (const auto& e : c.extensions) {
        if (e.oid == x509::kOidPoison || e.oid == x509::kOidEmbeddedScts) continue;
        BytesView whole = BytesView(c.der).subspan(e.whole.start, e.whole.header_len + e.whole.content_len);
        out.push_back(ctkit::to_string(whole));
    }
    return out;
}

} // namespace

const char* to_string(Classification c) {
    switch (c) {
    case Classification::ok: return "ok";
    case Classification::tbs_mismatch_san_order: return "tbs_mismatch_san_order";
    case Classification::tbs_mismatch_ext_order: return "tbs_mismatch_ext_order";
    case Classification::content_mismatch: return "content_mismatch";
    case Classification::tbs_mismatch_other: return "tbs_mismatch_other";
    case Classification::unknown_log: return "unknown_log";
    }
    return "unknown";
}

bool plausible_pair(const x509::ParsedCert& precert, const x509::ParsedCert& final_cert) {
    if (precert.serial == final_cert.serial) return true;
    if (precert.issuer_dn == final_cert.issuer_dn) return true;
    auto a = san_keys(precert);
    auto b = san_keys(final_cert);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<SanKey> shared;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
    return !shared.empty();
}

PairReport compare_pair(const x509::ParsedCert& precert, const x509::ParsedCert& final_cert) {
    Bytes tbs_pre = x509::tbs_for_sct(precert);
    Bytes tbs_fin = x509::tbs_for_sct(final_cert);
    if (tbs_pre == tbs_fin) return {Classification::ok, ""};

    auto san_pre = san_keys(precert);
    auto san_fin = san_keys(final_cert);
    auto san_pre_sorted = san_pre;
    auto san_fin_sorted = san_fin;
    std::sort(san_pre_sorted.begin(), san_pre_sorted.end());
    std::sort(san_fin_sorted.begin(), san_fin_sorted.end());
    bool san_same_set = san_pre_sorted == san_fin_sorted;
    if (san_same_set && san_pre != san_fin) {
        return {Classification::tbs_mismatch_san_order,
                "subject alternative names reordered in the final certificate"};
    }

    auto ext_pre = core_extensions(precert);
    auto ext_fin = core_extensions(final_cert);
    auto ext_pre_sorted = ext_pre;
    auto ext_fin_sorted = ext_fin;
    std::sort(ext_pre_sorted.begin(), ext_pre_sorted.end());
    std::sort(ext_fin_sorted.begin(), ext_fin_sorted.end());
    if (ext_pre_sorted == ext_fin_sorted && ext_pre != ext_fin) {
        return {Classification::tbs_mismatch_ext_order,
                "extensions reordered in the final certificate"};
    }

    if (!san_same_set || precert.issuer_dn != final_cert.issuer_dn) {
        return {Classification::content_mismatch,
                "names or issuer differ between precertificate and final certificate"};
    }
    return {Classification::tbs_mismatch_other,
            "signed portions differ outside names and extension order"};
}

SctFinding classify_invalid(const x509::ParsedCert& precert, const x509::ParsedCert& final_cert,
                            const Sct& sct) {
    if (!plausible_pair(precert, final_cert)) {
        throw std::invalid_argument(
            "sct: certificates do not describe the same issuance (no shared serial, issuer, or name)");
    }
    SctFinding f;
    f.cert_fingerprint = final_cert.fingerprint;
    f.sct = sct;
    if (sct.status == Status::unknown_log) {
        f.classification = Classification::unknown_log;
        f.diff_summary = "signing log is not in the configured set";
        return f;
    }
    if (sct.status == Status::valid) {
        f.classification = Classification::ok;
        return f;
    }
    PairReport report = compare_pair(precert, final_cert);
    if (report.cls == Classification::ok) {
        // The two TBS encodings agree, so the mismatch lives outside them
        // (timestamp, extensions, or the signature itself).
        f.classification = Classification::tbs_mismatch_other;
        f.diff_summary = "signed encodings agree; signature fails for another reason";
    } else {
        f.classification = report.cls;
        f.diff_summary = report.detail;
    }
    return f;
}

} // namespace ctkit::sct
