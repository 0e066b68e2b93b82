#include <doctest.h>

#include "ctkit/sha256.hpp"
#include "ctkit/x509.hpp"
#include "support/certgen.hpp"

using namespace ctkit;
using namespace testutil;

namespace {

struct Fixture {
    certgen::Authority ca = certgen::make_authority("Example Trust", "Example Issuing CA");
    certgen::LogIdentity log = certgen::make_log("fixture log");
    certgen::Key subject = certgen::gen_ec_key();
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

certgen::CertSpec leaf_spec() {
    certgen::CertSpec spec;
    spec.serial = Bytes{0x01, 0x02, 0x03};
    spec.subject_cn = "www.example.org";
    spec.sans = {"www.example.org", "example.org"};
    return spec;
}

} // namespace

TEST_CASE("parses generated certificates: names, serial, validity, sans") {
    auto& f = fixture();
    auto pair = certgen::issue_pair(f.ca, f.log, f.subject, leaf_spec(), leaf_spec(), 15000);

    auto pre = x509::parse_certificate(view(pair.precert_der));
    CHECK(pre.serial == Bytes{0x01, 0x02, 0x03});
    CHECK(pre.issuer_org == "Example Trust");
    CHECK(pre.issuer_cn == "Example Issuing CA");
    CHECK(pre.subject_cn == "www.example.org");
    CHECK(pre.san_dns() == std::vector<std::string>{"www.example.org", "example.org"});
    CHECK(pre.is_precert);
    CHECK(!pre.has_embedded_scts);
    CHECK(pre.not_before_ms < pre.not_after_ms);

    auto fin = x509::parse_certificate(view(pair.final_der));
    CHECK(!fin.is_precert);
    CHECK(fin.has_embedded_scts);
    CHECK(fin.fingerprint == sha256(view(pair.final_der)));
    CHECK(fin.serial == pre.serial);
}

TEST_CASE("issuer key hash is the digest of the issuer SPKI") {
    auto& f = fixture();
    CHECK(x509::issuer_key_hash(f.ca.cert) == sha256(view(f.ca.key.spki)));
}

TEST_CASE("poison and SCT removal reconstruct the same signed bytes") {
    auto& f = fixture();
    auto pair = certgen::issue_pair(f.ca, f.log, f.subject, leaf_spec(), leaf_spec(), 15000);
    auto pre = x509::parse_certificate(view(pair.precert_der));
    auto fin = x509::parse_certificate(view(pair.final_der));
    CHECK(x509::tbs_for_sct(pre) == x509::tbs_for_sct(fin));
    // and removal only rewrote headers: the result still parses as a TBS of
    // the unextended certificate body
    CHECK(x509::tbs_for_sct(pre) != Bytes(pre.tbs_bytes().begin(), pre.tbs_bytes().end()));
}

TEST_CASE("removing the sole extension drops the wrapper") {
    auto& f = fixture();
    // certificate whose only extension is the poison mark
    certgen::CertSpec spec = leaf_spec();
    Bytes ku_free = certgen::der_seq({
        certgen::der_explicit(0, view(certgen::der_int(2))),
        certgen::der_int_bytes(view(spec.serial)),
        certgen::der_seq({certgen::der_oid("1.2.840.10045.4.3.2")}),
        f.ca.name_der,
        certgen::der_seq(
            {certgen::der_utctime("240101000000Z"), certgen::der_utctime("250101000000Z")}),
        certgen::der_seq({certgen::der_set(
            {certgen::der_seq({certgen::der_oid("2.5.4.3"), certgen::der_utf8("solo")})})}),
        f.subject.spki,
        certgen::der_explicit(3, view(certgen::der_seq({certgen::poison_extension()}))),
    });
    Bytes sig = certgen::sign_sha256(f.ca.key, view(ku_free));
    Bytes cert = certgen::der_seq(
        {ku_free, certgen::der_seq({certgen::der_oid("1.2.840.10045.4.3.2")}),
         certgen::der_bitstring(view(sig))});
    auto parsed = x509::parse_certificate(view(cert));
    REQUIRE(parsed.is_precert);
    Bytes stripped = x509::tbs_without_extension(parsed, x509::kOidPoison);
    auto reparsed = x509::parse_certificate(
        view(certgen::der_seq({stripped, certgen::der_seq({certgen::der_oid("1.2.840.10045.4.3.2")}),
                               certgen::der_bitstring(view(sig))})));
    CHECK(!reparsed.has_extensions);
}

TEST_CASE("tbs_without_extension throws when the extension is absent") {
    auto& f = fixture();
    auto pair = certgen::issue_pair(f.ca, f.log, f.subject, leaf_spec(), leaf_spec(), 15000);
    auto fin = x509::parse_certificate(view(pair.final_der));
    CHECK_THROWS((void)x509::tbs_without_extension(fin, x509::kOidPoison));
}

TEST_CASE("malformed certificates are rejected") {
    CHECK_THROWS((void)x509::parse_certificate(view(to_bytes("not der"))));
    Bytes truncated{0x30, 0x82, 0xff, 0xff, 0x01};
    CHECK_THROWS((void)x509::parse_certificate(view(truncated)));
    CHECK_THROWS((void)x509::parse_certificate(BytesView{}));
}

TEST_CASE("fqdn validation") {
    CHECK(x509::valid_fqdn("example.com"));
    CHECK(x509::valid_fqdn("a.b.c.example.co.uk"));
    CHECK(x509::valid_fqdn("xn--bcher-kva.example"));
    CHECK(x509::valid_fqdn("*.example.com"));
    CHECK(x509::valid_fqdn("0-0.example.com"));

    CHECK(!x509::valid_fqdn(""));
    CHECK(!x509::valid_fqdn("example"));          // single label
    CHECK(!x509::valid_fqdn("ex_ample.com"));     // underscore
    CHECK(!x509::valid_fqdn("-bad.example.com")); // edge hyphen
    CHECK(!x509::valid_fqdn("bad-.example.com"));
    CHECK(!x509::valid_fqdn("a..b"));
    CHECK(!x509::valid_fqdn("example.com."));     // trailing dot
    CHECK(!x509::valid_fqdn("a.*.example.com"));  // wildcard not leftmost
    CHECK(!x509::valid_fqdn("**.example.com"));
    CHECK(!x509::valid_fqdn("1.2.3.4"));          // all-numeric rightmost label
    CHECK(!x509::valid_fqdn("host.example.123"));
    CHECK(!x509::valid_fqdn(std::string(64, 'a') + ".com")); // label too long
    std::string long_name;
    while (long_name.size() <= 253) long_name += "abcdefgh.";
    long_name += "com";
    CHECK(!x509::valid_fqdn(long_name));
    CHECK(!x509::valid_fqdn("UPPER.example.com")); // normalization is the caller's job
}

TEST_CASE("extract_names lowercases, dedups, and validates") {
    auto& f = fixture();
    certgen::CertSpec spec = leaf_spec();
    spec.subject_cn = "WWW.Example.ORG";
    spec.sans = {"WWW.Example.ORG", "www.example.org", "bad_label.example.org", "*.example.org"};
    Bytes der = certgen::make_certificate(f.ca, f.subject, spec, Bytes{});
    auto cert = x509::parse_certificate(view(der));
    auto names = x509::extract_names(cert);
    std::vector<std::string> expected{"*.example.org", "www.example.org"};
    std::sort(names.begin(), names.end());
    CHECK(names == expected);
}
