// End-to-end acceptance gate: eight checks with pinned expectations, printed
// as one PASS/FAIL line each, exiting nonzero when anything fails. Every
// check runs against in-process fixtures; no traffic leaves loopback.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ctkit/growth.hpp"
#include "ctkit/honeypot.hpp"
#include "ctkit/leaf.hpp"
#include "ctkit/logclient.hpp"
#include "ctkit/merkle.hpp"
#include "ctkit/names.hpp"
#include "ctkit/phishing.hpp"
#include "ctkit/psl.hpp"
#include "ctkit/resolver.hpp"
#include "ctkit/sct.hpp"
#include "ctkit/store.hpp"
#include "ctkit/x509.hpp"
#include "support/certgen.hpp"
#include "support/fixture_dns.hpp"
#include "support/fixture_log.hpp"
#include "support/naive_merkle.hpp"
#include "support/testutil.hpp"

namespace {

using namespace ctkit;
using namespace testutil;

class Checker {
public:
    bool require(bool condition, std::string what) {
        if (!condition) failures_.push_back(std::move(what));
        return condition;
    }
    bool ok() const { return failures_.empty(); }
    const std::vector<std::string>& failures() const { return failures_; }

private:
    std::vector<std::string> failures_;
};

// ---- [1] hash tree vs an independent recursive oracle -----------------------

void check_merkle(Checker& c) {
    std::mt19937_64 rng(0x74726565);
    std::vector<Bytes> leaves;
    std::vector<Hash> hashes;
    leaves.reserve(257);
    hashes.reserve(257);

    if (!c.require(merkle::root(leaves) == naive_root(leaves),
                   "empty tree root differs from the oracle"))
        return;
    c.require(merkle::empty_root() == naive_root(leaves), "empty_root() differs from the oracle");

    for (std::size_t n = 1; n <= 256; ++n) {
        Bytes leaf(1 + rng() % 64);
        for (auto& b : leaf) b = static_cast<std::uint8_t>(rng());
        leaves.push_back(std::move(leaf));
        hashes.push_back(merkle::leaf_hash(view(leaves.back())));

        const Hash expect = naive_root(leaves);
        if (!c.require(merkle::root(leaves) == expect,
                       "root differs from the oracle at size " + std::to_string(n)))
            return;
        if (!c.require(merkle::root_of_hashes(hashes) == expect,
                       "hash-level root differs from the oracle at size " + std::to_string(n)))
            return;
        for (std::uint64_t i = 0; i < n; ++i) {
            auto proof = merkle::prove_inclusion_hashes(hashes, i);
            if (!c.require(merkle::verify_inclusion(proof, hashes[i], expect),
                           "inclusion proof fails at size " + std::to_string(n) + ", index " +
                               std::to_string(i)))
                return;
        }
        auto bytes_proof = merkle::prove_inclusion(leaves, n / 2);
        if (!c.require(merkle::verify_inclusion(bytes_proof, hashes[n / 2], expect),
                       "byte-level inclusion proof fails at size " + std::to_string(n)))
            return;
    }

    // Consistency proofs for every prefix pair up to 64 leaves, plus the
    // guarantee that changing any committed leaf makes the proof worthless:
    // a forged old root must never connect to the honest new root.
    std::span<const Bytes> all(leaves);
    std::vector<Hash> prefix_root(65);
    for (std::size_t k = 1; k <= 64; ++k) prefix_root[k] = merkle::root(all.first(k));

    for (std::uint64_t n = 1; n <= 64; ++n) {
        for (std::uint64_t m = 1; m <= n; ++m) {
            auto proof = merkle::prove_consistency(all.first(n), m);
            if (!c.require(merkle::verify_consistency(proof, prefix_root[m], prefix_root[n]),
                           "consistency proof fails for " + std::to_string(m) + " -> " +
                               std::to_string(n)))
                return;
            for (std::uint64_t k = 0; k < m; ++k) {
                leaves[k][0] ^= 0x01;
                const Hash forged_old = merkle::root(all.first(m));
                const bool rejected =
                    !merkle::verify_consistency(proof, forged_old, prefix_root[n]);
                leaves[k][0] ^= 0x01;
                if (!c.require(rejected, "mutated leaf " + std::to_string(k) +
                                             " still passes the " + std::to_string(m) + " -> " +
                                             std::to_string(n) + " consistency proof"))
                    return;
            }
        }
    }
}

// ---- [2] log audit over a loopback fixture log ------------------------------

std::vector<ctlog::Entry> synthetic_entries(std::uint64_t count) {
    std::vector<ctlog::Entry> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        ctlog::Leaf leaf;
        leaf.timestamp_ms = 1520000000000 + i * 1000;
        leaf.cert = to_bytes("leaf body #" + std::to_string(i));
        out.push_back({i, ctlog::encode_leaf(leaf), ctlog::encode_x509_extra({})});
    }
    return out;
}

ctlog::LogDescriptor descriptor_for(const FixtureLog& log, const std::string& name) {
    ctlog::LogDescriptor d;
    d.name = name;
    d.url = log.url();
    d.spki_der = log.spki();
    return d;
}

void check_audit(Checker& c) {
    const auto entries = synthetic_entries(10000);

    {
        // The signed head commits to the honest tree while two entries are
        // served with each other's bytes: the audit must fail, and fail the
        // same way every time.
        FixtureLogOptions opt;
        opt.swap_leaves = std::pair<std::uint64_t, std::uint64_t>{137, 4242};
        FixtureLog log(entries, opt);
        const auto desc = descriptor_for(log, "swapped");

        auto run_once = [&]() {
            TempDir dir;
            store::EntryStore archive(dir.path());
            ctlog::LogClient client(desc);
            return ctlog::audit_fetch(client, archive);
        };
        const auto first = run_once();
        const auto second = run_once();
        c.require(!first.ok(), "audit accepted a log serving swapped leaves");
        c.require(!second.ok(), "audit accepted the swapped log on a repeat run");
        c.require(!first.root_matches, "the swap went undetected by the root recomputation");
        const bool same = first.signature_valid == second.signature_valid &&
                          first.monotonic == second.monotonic &&
                          first.consistent == second.consistent &&
                          first.root_matches == second.root_matches &&
                          first.stored_after == second.stored_after &&
                          first.problems == second.problems;
        c.require(same, "tamper detection is not deterministic across fresh runs");
    }

    {
        FixtureLog log(entries);
        const auto desc = descriptor_for(log, "clean");
        TempDir dir;
        store::EntryStore archive(dir.path());
        ctlog::LogClient client(desc);

        const auto report = ctlog::audit_fetch(client, archive);
        c.require(report.ok(), "clean fetch did not audit cleanly");
        c.require(report.stored_after == entries.size(),
                  "clean fetch stored " + std::to_string(report.stored_after) +
                      " of 10000 entries");

        auto scan_matches = [&]() {
            std::uint64_t i = 0;
            bool equal = true;
            archive.for_each("clean", [&](const store::StoredEntry& e) {
                if (i >= entries.size() || e.entry.index != i ||
                    e.entry.leaf_input != entries[i].leaf_input ||
                    e.entry.extra_data != entries[i].extra_data)
                    equal = false;
                ++i;
            });
            return equal && i == entries.size();
        };
        c.require(scan_matches(), "stored entries are not byte-identical to what the log served");

        const auto idle = ctlog::audit_fetch(client, archive);
        c.require(idle.ok() && idle.stored_before == entries.size() &&
                      idle.stored_after == entries.size(),
                  "idle re-audit touched the archive");
        c.require(scan_matches(), "archive bytes changed between scans");
    }
}

// ---- [3] embedded SCT verification and mismatch classification --------------

void check_sct(Checker& c) {
    const auto ca = certgen::make_authority("Acceptance Root Org", "Acceptance Root CA");
    const auto log = certgen::make_log("acceptance log");
    const auto subject = certgen::gen_ec_key();
    const std::vector<sct::LogKey> keys{log.log_key};

    auto spec_for = [](std::size_t i) {
        certgen::CertSpec s;
        s.serial = Bytes{0x40, static_cast<std::uint8_t>(i / 200),
                         static_cast<std::uint8_t>(i % 200 + 1)};
        s.subject_cn = "site" + std::to_string(i) + ".example";
        s.sans = {s.subject_cn, "alt" + std::to_string(i) + ".example"};
        return s;
    };

    int clean_valid = 0;
    int clean_ok_pairs = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        const auto spec = spec_for(i);
        const auto pair = certgen::issue_pair(ca, log, subject, spec, spec, 1522000000000 + i);
        const auto pre = x509::parse_certificate(view(pair.precert_der));
        const auto fin = x509::parse_certificate(view(pair.final_der));
        auto scts = sct::scts_from_cert(fin);
        if (!c.require(scts.size() == 1,
                       "pair " + std::to_string(i) + ": expected one embedded SCT"))
            return;
        if (sct::verify_sct(scts[0], fin, &ca.cert, keys) == sct::Status::valid) ++clean_valid;
        if (sct::compare_pair(pre, fin).cls == sct::Classification::ok) ++clean_ok_pairs;
    }
    c.require(clean_valid == 100, "only " + std::to_string(clean_valid) +
                                      " of 100 consistent pairs verified valid");
    c.require(clean_ok_pairs == 100, "consistent pairs were flagged by the byte comparison");

    // Four planted mismatch shapes, eight pairs each. Every one must fail
    // signature verification and land in exactly its own bucket: any
    // off-diagonal cell breaks both precision and recall.
    const sct::Classification classes[4] = {
        sct::Classification::tbs_mismatch_san_order,
        sct::Classification::tbs_mismatch_ext_order,
        sct::Classification::content_mismatch,
        sct::Classification::tbs_mismatch_other,
    };
    const char* class_label[4] = {"san order", "extension order", "content", "other tbs edit"};
    int confusion[4][5] = {};
    int still_valid = 0;

    for (int j = 0; j < 8; ++j) {
        for (int k = 0; k < 4; ++k) {
            const std::size_t idx =
                static_cast<std::size_t>(j) * 4 + static_cast<std::size_t>(k);
            const auto base = spec_for(100 + idx);
            auto mutated = base;
            switch (k) {
            case 0: std::swap(mutated.sans[0], mutated.sans[1]); break;
            case 1: mutated.ext_order = certgen::ExtOrder::san_first; break;
            case 2: mutated.sans[1] = "reissued" + std::to_string(j) + ".example"; break;
            default: mutated.not_after = "250601000000Z"; break;
            }
            const auto pair =
                certgen::issue_pair(ca, log, subject, base, mutated, 1523000000000 + idx);
            const auto pre = x509::parse_certificate(view(pair.precert_der));
            const auto fin = x509::parse_certificate(view(pair.final_der));
            auto scts = sct::scts_from_cert(fin);
            if (!c.require(scts.size() == 1,
                           "mutant " + std::to_string(idx) + ": expected one embedded SCT"))
                return;
            if (sct::verify_sct(scts[0], fin, &ca.cert, keys) != sct::Status::invalid_signature) {
                ++still_valid;
                continue;
            }
            const auto finding = sct::classify_invalid(pre, fin, scts[0]);
            int predicted = 4;
            for (int p = 0; p < 4; ++p)
                if (classes[p] == finding.classification) predicted = p;
            ++confusion[k][predicted];
        }
    }
    c.require(still_valid == 0,
              std::to_string(still_valid) + " planted mismatches still verified as valid");
    for (int k = 0; k < 4; ++k) {
        c.require(confusion[k][k] == 8, std::string(class_label[k]) + ": recall " +
                                            std::to_string(confusion[k][k]) + "/8");
        for (int p = 0; p < 5; ++p) {
            if (p == k || confusion[k][p] == 0) continue;
            c.require(false, std::string(class_label[k]) + " misclassified " +
                                 std::to_string(confusion[k][p]) + " times as " +
                                 (p < 4 ? class_label[p] : "no known class"));
        }
    }
}

// ---- [4] growth tallies against a brute-force recount -----------------------

std::string brute_date(std::int64_t day) {
    // Civil-from-days, reimplemented here so date strings are checked against
    // something other than the production formatter.
    std::int64_t z = day + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const std::int64_t doe = z - era * 146097;
    const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    std::int64_t y = yoe + era * 400;
    const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::int64_t mp = (5 * doy + 2) / 153;
    const std::int64_t d = doy - (153 * mp + 2) / 5 + 1;
    const std::int64_t m = mp < 10 ? mp + 3 : mp - 9;
    if (m <= 2) ++y;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", static_cast<int>(y), static_cast<int>(m),
                  static_cast<int>(d));
    return buf;
}

void check_growth(Checker& c) {
    struct CaSpec {
        std::string canonical;
        std::vector<std::string> spellings;
    };
    const std::vector<CaSpec> cas = {
        {"alpha authority", {"Alpha Authority", "ALPHA AUTHORITY  ", "Alpha Authority LLC"}},
        {"beta trust", {"Beta Trust", "beta trust gmbh"}},
        {"gamma secure", {"Gamma Secure", "  Gamma Secure Inc"}},
        {"delta sign", {"Delta Sign", "DELTA-SIGN"}},
        {"epsilon pki", {"Epsilon PKI", "epsilon pki ltd"}},
    };
    std::istringstream alias_json(R"({
        "alpha authority llc": "alpha authority",
        "beta trust gmbh": "beta trust",
        "gamma secure inc": "gamma secure",
        "delta-sign": "delta sign",
        "epsilon pki ltd": "epsilon pki"
    })");
    const growth::AliasMap aliases = growth::load_alias_map(alias_json);
    const std::vector<std::string> log_names = {"log-east", "log-north", "log-south", "log-west"};

    const std::int64_t base_day = 17532; // 2018-01-01
    std::mt19937_64 rng(20180401);
    std::vector<growth::Entry> entries;
    entries.reserve(10500);
    auto add_entry = [&](bool precert) {
        const CaSpec& ca = cas[rng() % cas.size()];
        growth::Entry e;
        e.issuer = ca.spellings[rng() % ca.spellings.size()];
        e.log = log_names[rng() % log_names.size()];
        const std::uint64_t day = static_cast<std::uint64_t>(base_day) + rng() % 90;
        e.timestamp_ms = day * 86400000ull + rng() % 86400000ull;
        e.precert = precert;
        entries.push_back(std::move(e));
    };
    for (int i = 0; i < 10000; ++i) add_entry(true);
    for (int i = 0; i < 500; ++i) add_entry(false); // final entries: excluded everywhere
    std::shuffle(entries.begin(), entries.end(), rng);

    // Independent recount: own trim/lowercase, own day bucketing.
    auto brute_ca = [&aliases](const std::string& issuer) {
        std::string s;
        const std::size_t a = issuer.find_first_not_of(" \t\r\n");
        if (a != std::string::npos) {
            const std::size_t b = issuer.find_last_not_of(" \t\r\n");
            s = issuer.substr(a, b - a + 1);
        }
        for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (s.empty()) s = "(unknown)";
        const auto it = aliases.find(s);
        return it == aliases.end() ? s : it->second;
    };

    const std::int64_t win_first = base_day + 10, win_last = base_day + 49;
    std::map<std::string, std::map<std::int64_t, std::uint64_t>> per_day;
    std::map<std::int64_t, std::uint64_t> day_total;
    std::map<std::pair<std::string, std::string>, std::uint64_t> window_cells;
    std::uint64_t window_precerts = 0;
    for (const auto& e : entries) {
        if (!e.precert) continue;
        const std::string ca = brute_ca(e.issuer);
        const auto day = static_cast<std::int64_t>(e.timestamp_ms / 86400000ull);
        ++per_day[ca][day];
        ++day_total[day];
        if (day >= win_first && day <= win_last) {
            ++window_cells[{ca, e.log}];
            ++window_precerts;
        }
    }
    c.require(per_day.size() == cas.size(), "recount did not land on five CAs");

    const growth::DateWindow window = growth::parse_window("2018-01-11..2018-02-19");
    c.require(window.first_day == win_first && window.last_day == win_last,
              "window parse landed on unexpected day numbers");

    const auto series = growth::cumulative_growth(entries, aliases, 10);
    c.require(series.size() == cas.size(),
              "expected one series per CA, got " + std::to_string(series.size()));
    std::set<std::string> seen_ca;
    std::uint64_t prev_total = std::numeric_limits<std::uint64_t>::max();
    for (const auto& s : series) {
        seen_ca.insert(s.ca);
        const auto it = per_day.find(s.ca);
        if (!c.require(it != per_day.end(), "series for unexpected CA \"" + s.ca + "\"")) return;
        const auto& days = it->second;
        if (!c.require(s.points.size() == days.size(),
                       s.ca + ": " + std::to_string(s.points.size()) + " points, recount has " +
                           std::to_string(days.size())))
            return;
        std::uint64_t cum = 0;
        std::size_t i = 0;
        bool points_ok = true;
        for (const auto& [day, count] : days) {
            cum += count;
            if (s.points[i].date != brute_date(day) || s.points[i].cumulative != cum) {
                points_ok = false;
                break;
            }
            ++i;
        }
        c.require(points_ok, s.ca + ": cumulative points differ from the recount");
        c.require(cum <= prev_total, "series are not sorted by total, descending");
        prev_total = cum;
    }
    c.require(seen_ca.size() == cas.size(), "duplicate or missing CA series");

    const auto rates = growth::daily_rates(entries, aliases);
    std::size_t expected_points = 0;
    for (const auto& [ca, days] : per_day) expected_points += days.size();
    c.require(rates.size() == expected_points, "rate point count differs from the recount");
    std::map<std::string, std::int64_t> day_by_date;
    for (const auto& [day, n] : day_total) day_by_date[brute_date(day)] = day;
    std::map<std::string, double> date_sum;
    bool shares_ok = true;
    std::string share_detail;
    for (const auto& r : rates) {
        const auto date_it = day_by_date.find(r.date);
        if (date_it == day_by_date.end()) {
            shares_ok = false;
            share_detail = r.date + ": date not in the recount";
            break;
        }
        const auto ca_it = per_day.find(r.ca);
        if (ca_it == per_day.end() || !ca_it->second.count(date_it->second)) {
            shares_ok = false;
            share_detail = r.date + "/" + r.ca + ": pair not in the recount";
            break;
        }
        const double expect = static_cast<double>(ca_it->second.at(date_it->second)) /
                              static_cast<double>(day_total.at(date_it->second));
        if (std::abs(r.share - expect) > 1e-9) {
            shares_ok = false;
            share_detail = r.date + "/" + r.ca + ": share off by more than 1e-9";
            break;
        }
        date_sum[r.date] += r.share;
    }
    c.require(shares_ok, "daily share mismatch: " + share_detail);
    bool sums_ok = date_sum.size() == day_total.size();
    for (const auto& [date, sum] : date_sum)
        if (std::abs(sum - 1.0) > 1e-9) sums_ok = false;
    c.require(sums_ok, "per-day shares do not sum to one within 1e-9");

    const auto cells = growth::ca_log_matrix(entries, aliases, window);
    std::map<std::pair<std::string, std::string>, std::uint64_t> got;
    bool ordered = true;
    std::pair<std::string, std::string> prev_key;
    std::uint64_t cell_sum = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        std::pair<std::string, std::string> key{cells[i].ca, cells[i].log};
        if (i > 0 && !(prev_key < key)) ordered = false;
        prev_key = key;
        got[key] = cells[i].count;
        cell_sum += cells[i].count;
    }
    c.require(ordered, "matrix cells are not ordered by CA, then log");
    c.require(got == window_cells, "matrix cells differ from the brute-force recount");
    c.require(cell_sum == window_precerts,
              "matrix cells do not partition the windowed precert count");
}

// ---- [5] label statistics and the discovery pipeline ------------------------

void check_leakage(Checker& c) {
    psl::PublicSuffixSet ps;
    ps.add_rule("com");
    ps.add_rule("test");

    auto rec = [&](const std::string& fqdn) {
        auto r = names::split(fqdn, ps);
        if (!r) throw std::runtime_error("split failed for " + fqdn);
        return *r;
    };

    // Hand-tallied label statistics over five names.
    const std::vector<names::FqdnRecord> records = {
        rec("www.a.com"),  rec("www.b.com"),        rec("mail.a.com"),
        rec("www.c.test"), rec("shop.mail.b.com"),
    };
    const auto stats = names::label_stats(records);
    const std::map<std::string, std::map<std::string, std::uint64_t>> expected_stats = {
        {"www", {{"com", 2}, {"test", 1}}},
        {"mail", {{"com", 2}}},
        {"shop", {{"com", 1}}},
    };
    c.require(stats.per_label == expected_stats, "label statistics differ from the hand tally");
    c.require(stats.label_total("www") == 3, "label total for www is not 3");

    // Discovery pipeline: the observed names push "www" over the count
    // threshold, the fixture resolver plants 20 live subdomains, 3 wildcard
    // zones, and 50 dead names among 73 listed domains.
    const std::vector<names::FqdnRecord> observed_records = {rec("www.seen-alpha.test"),
                                                             rec("www.seen-beta.test")};
    const auto observed_stats = names::label_stats(observed_records);
    const std::set<std::string> observed = {"www.seen-alpha.test", "www.seen-beta.test"};

    FixtureDns dns;
    std::vector<std::string> domain_list;
    std::set<std::string> expect_new;
    for (int i = 1; i <= 73; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "d%03d.test", i);
        const std::string domain = buf;
        domain_list.push_back(domain);
        if (i <= 20) {
            FixtureDns::Record r;
            r.addresses = {"203.0.113." + std::to_string(i)};
            dns.add_name("www." + domain, r);
            expect_new.insert("www." + domain);
        } else if (i <= 23) {
            dns.add_wildcard(domain, {"198.51.100." + std::to_string(i)});
        }
        // 24..73: unknown to the fixture, answered NXDOMAIN
    }
    dns.start();

    names::CandidateConfig config;
    config.min_label_count = 2;
    config.top_suffixes_per_label = 10;
    const auto candidates =
        names::construct_candidates(observed_stats, domain_list, observed, ps, config, 20180707);
    c.require(candidates.size() == domain_list.size(),
              "expected one candidate per listed domain, got " +
                  std::to_string(candidates.size()));

    resolver::ResolverConfig rc;
    rc.servers = {dns.address()};
    rc.timeout_ms = 3000;
    rc.retries = 1;
    rc.qps = 2000.0;
    rc.workers = 8;
    const resolver::RoutabilityTable table; // empty deny list: every answer address counts
    const resolver::Blocklist blocklist;
    const auto run = resolver::run_pairs(candidates, rc, table, blocklist);
    dns.stop();

    c.require(run.skipped.empty(), "candidates were skipped without a blocklist");
    c.require(run.verdicts.size() == candidates.size(), "verdict count differs from candidates");
    std::size_t wildcards = 0, dead = 0, indeterminate = 0;
    std::set<std::string> got_new;
    for (const auto& v : run.verdicts) {
        switch (v.outcome) {
        case resolver::Outcome::new_fqdn: got_new.insert(v.candidate.test_name); break;
        case resolver::Outcome::wildcard_zone: ++wildcards; break;
        case resolver::Outcome::nonexistent: ++dead; break;
        default: ++indeterminate; break;
        }
    }
    c.require(got_new == expect_new, "discovered subdomains differ from the 20 planted (got " +
                                         std::to_string(got_new.size()) + ")");
    c.require(wildcards == 3, "wildcard zones: " + std::to_string(wildcards) + " of 3");
    c.require(dead == 50, "nonexistent names: " + std::to_string(dead) + " of 50");
    c.require(indeterminate == 0, std::to_string(indeterminate) + " indeterminate verdicts");

    const std::set<std::string> known = {"www.d001.test", "www.d002.test", "www.d003.test",
                                         "www.d004.test", "www.d005.test"};
    const auto fresh = resolver::diff_against_known(run.verdicts, known);
    c.require(fresh.size() == 15, "known-list diff kept " + std::to_string(fresh.size()) +
                                      " names, expected 15");
    bool diff_ok = true;
    for (const auto& n : fresh)
        if (known.count(n) || !expect_new.count(n)) diff_ok = false;
    c.require(diff_ok, "known-list diff contains unexpected names");
}

// ---- [6] phishing-shaped names vs legitimate bases --------------------------

void check_phishing(Checker& c) {
    psl::PublicSuffixSet ps;
    for (const char* s :
         {"com", "net", "de", "gq", "money", "live", "bid", "am", "co.am", "uk", "co.uk"})
        ps.add_rule(s);
    const auto rules = phishing::default_rules();

    const std::pair<const char*, const char*> cases[] = {
        {"appleid.apple.com-7etr6eti.gq", "Apple"},
        {"paypal.com-account-security.money", "PayPal"},
        {"www-hotmail-login.live", "Microsoft"},
        {"accounts.google.co.am", "Google"},
        {"www.ebay.co.uk.dll7.bid", "eBay"},
    };
    for (const auto& [fqdn, service] : cases) {
        const auto record = names::split(fqdn, ps);
        if (!c.require(record.has_value(), std::string(fqdn) + " did not split")) continue;
        const auto findings = phishing::match(*record, rules);
        bool hit = false;
        for (const auto& f : findings)
            if (f.service == service) hit = true;
        c.require(hit, std::string(fqdn) + " was not flagged as " + service);
    }

    const char* legitimate[] = {
        "www.apple.com",    "appleid.apple.com",   "www.paypal.com",  "login.live.com",
        "outlook.live.com", "www.hotmail.com",     "accounts.google.com",
        "mail.google.com",  "www.ebay.de",         "signin.ebay.de",
    };
    std::size_t flagged = 0;
    std::string first_flagged;
    for (const char* fqdn : legitimate) {
        const auto record = names::split(fqdn, ps);
        if (!c.require(record.has_value(), std::string(fqdn) + " did not split")) continue;
        const auto findings = phishing::match(*record, rules);
        if (!findings.empty() && first_flagged.empty())
            first_flagged = std::string(fqdn) + " -> " + findings.front().service;
        flagged += findings.size();
    }
    c.require(flagged == 0, "legitimate names produced " + std::to_string(flagged) +
                                " findings (" + first_flagged + ")");
}

// ---- [7] honeypot telemetry metrics and scan correlation --------------------

void check_honeypot(Checker& c) {
    const std::string fqdn = "k3v9t2p8w5nq.leak.example";
    const std::uint64_t entry = 1530000000000ull;
    honeypot::HoneypotDomain domain;
    domain.fqdn = fqdn;
    domain.ct_entry_ms = entry;
    domain.batch = "batch-a";
    const std::vector<honeypot::HoneypotDomain> domains = {domain};

    std::ostringstream tsv;
    auto dns_line = [&](std::uint64_t t, const std::string& src, const std::string& asn,
                        const std::string& ecs, const char* qtype, const std::string& name) {
        tsv << t << "\tdns_query\t" << name << '\t' << qtype << '\t' << src << '\t' << asn
            << '\t' << ecs << "\t\n";
    };

    // Validation traffic from the issuing CA's checker: three lookups before
    // the entry was logged, two re-checks afterwards from the same source.
    const std::string ca_src = "192.0.2.50";
    dns_line(entry - 120000, ca_src, "", "", "A", fqdn);
    dns_line(entry - 60000, ca_src, "64497", "", "A", fqdn);
    dns_line(entry - 900, ca_src, "", "", "AAAA", fqdn);
    dns_line(entry + 250000, ca_src, "", "", "A", fqdn);
    dns_line(entry + 400000, ca_src, "64497", "", "A", fqdn);

    // Background noise outside the honeypot name.
    dns_line(entry + 10000, "172.16.9.9", "", "", "A", "other.leak.example");
    dns_line(entry + 11000, "172.16.9.9", "", "", "A", "www.unrelated.example");
    dns_line(entry + 12000, "172.16.9.10", "64498", "", "A", "leak.example");

    // 55 post-logging queries: the first one 197 s after the entry, 14
    // distinct ASes with a pinned first three, 4 distinct client subnets.
    const std::vector<std::uint32_t> asns = {15169, 8560, 54054, 7018,  3356,  701,   1299,
                                             2914,  6939, 9009,  16509, 14061, 24940, 63949};
    for (int k = 0; k < 55; ++k) {
        std::string asn;
        if (k < 14) asn = std::to_string(asns[static_cast<std::size_t>(k)]);
        else if (k < 30) asn = std::to_string(asns[static_cast<std::size_t>(k % 8)]);
        std::string ecs;
        if (k == 0 || k == 20) ecs = "203.0.113.0/24";
        else if (k == 5 || k == 33) ecs = "198.51.100.0/24";
        else if (k == 9) ecs = "100.64.7.0/24";
        else if (k == 12) ecs = "192.0.2.0/24";
        dns_line(entry + 197000 + static_cast<std::uint64_t>(k) * 1000,
                 "172.16.0." + std::to_string(k + 1), asn, ecs, k % 3 ? "A" : "AAAA", fqdn);
    }

    std::istringstream in(tsv.str());
    const auto load = honeypot::load_telemetry(in);
    c.require(load.malformed_lines == 0, "telemetry fixture should parse cleanly");
    c.require(load.events.size() == 63,
              "expected 63 events, got " + std::to_string(load.events.size()));

    const auto scoped = honeypot::filter_to_domains(load.events, domains);
    c.require(scoped.size() == 60,
              "domain filter kept " + std::to_string(scoped.size()) + " events, expected 60");
    auto cleaned = honeypot::filter_ca_validation(scoped, domains);
    c.require(cleaned.size() == 55,
              "validation filter kept " + std::to_string(cleaned.size()) + ", expected 55");
    bool no_ca_residue = true;
    bool min_delta_ok = true;
    for (const auto& e : cleaned) {
        if (e.src_ip == ca_src) no_ca_residue = false;
        if (e.time_ms < entry) min_delta_ok = false;
    }
    c.require(no_ca_residue, "validation-source queries survived the filter");
    c.require(min_delta_ok, "a query earlier than the log entry survived the filter");

    std::mt19937_64 shuffle_rng(7);
    std::shuffle(cleaned.begin(), cleaned.end(), shuffle_rng);
    const auto reports = honeypot::report(domains, cleaned);
    if (!c.require(reports.size() == 1, "expected a single domain report")) return;
    const auto& r = reports.front();
    c.require(r.first_dns_ms == entry + 197000, "first query timestamp is off");
    c.require(r.delta_s == 197, "entry-to-first-lookup delta is not 197 s");
    c.require(r.query_count == 55,
              "query count " + std::to_string(r.query_count) + ", expected 55");
    c.require(r.distinct_as == 14,
              "distinct ASes " + std::to_string(r.distinct_as) + ", expected 14");
    c.require(r.distinct_ecs == 4,
              "distinct client subnets " + std::to_string(r.distinct_ecs) + ", expected 4");
    c.require(r.first_3_ases == std::vector<std::uint32_t>{15169, 8560, 54054},
              "first three ASes are wrong or out of order");

    // Client-subnet breakdown with a pinned 115/25/10 top three.
    std::vector<honeypot::Event> subnet_events;
    std::uint64_t t = entry + 500000;
    auto push_ecs = [&](const std::string& ecs, int count) {
        for (int i = 0; i < count; ++i) {
            honeypot::Event e;
            e.time_ms = t++;
            e.kind = honeypot::EventKind::dns_query;
            e.qname = fqdn;
            e.qtype = "A";
            e.src_ip = "192.0.2.1";
            e.ecs = ecs;
            subnet_events.push_back(std::move(e));
        }
    };
    push_ecs("198.51.100.0/24", 115);
    push_ecs("203.0.113.0/24", 25);
    push_ecs("100.64.9.0/24", 10);
    push_ecs("", 7); // no subnet attached: not part of the breakdown
    push_ecs("not-a-subnet", 1);
    push_ecs("300.1.2.0/24", 1);
    const auto breakdown = honeypot::ecs_breakdown(subnet_events);
    c.require(breakdown.malformed_ecs == 2, "expected two malformed client subnets");
    const bool top3 = breakdown.stats.size() == 3 &&
                      breakdown.stats[0].prefix == "198.51.100.0/24" &&
                      breakdown.stats[0].count == 115 &&
                      breakdown.stats[1].prefix == "203.0.113.0/24" &&
                      breakdown.stats[1].count == 25 &&
                      breakdown.stats[2].prefix == "100.64.9.0/24" &&
                      breakdown.stats[2].count == 10;
    c.require(top3, "client-subnet breakdown is not 115/25/10");

    // Query-then-connect correlation: a 30-port sweep from the /24 that had
    // just resolved the name is flagged; one-sided sources produce nothing.
    std::vector<honeypot::Event> scan_dns, scan_conn;
    auto mk_dns = [&](std::uint64_t when, const std::string& src,
                      std::optional<std::uint32_t> asn) {
        honeypot::Event e;
        e.time_ms = when;
        e.kind = honeypot::EventKind::dns_query;
        e.qname = fqdn;
        e.qtype = "A";
        e.src_ip = src;
        e.asn = asn;
        scan_dns.push_back(std::move(e));
    };
    auto mk_conn = [&](std::uint64_t when, const std::string& src, std::uint16_t port,
                       std::optional<std::uint32_t> asn) {
        honeypot::Event e;
        e.time_ms = when;
        e.kind = honeypot::EventKind::connection;
        e.qname = fqdn;
        e.src_ip = src;
        e.dst_port = port;
        e.asn = asn;
        scan_conn.push_back(std::move(e));
    };
    mk_dns(entry + 600000, "203.0.113.7", 64496);
    mk_dns(entry + 601000, "203.0.113.7", 64496);
    mk_dns(entry + 650000, "74.125.1.9", 15169); // queried, never connected
    for (int p = 0; p < 30; ++p)
        mk_conn(entry + 605000 + static_cast<std::uint64_t>(p) * 10, "203.0.113.8",
                static_cast<std::uint16_t>(20000 + p), 64511);
    mk_conn(entry + 700000, "8.8.8.8", 443, 15169); // connected, never queried
    const auto correlations = honeypot::correlate_scans(scan_dns, scan_conn);
    if (!c.require(correlations.size() == 1, "expected exactly one correlated source, got " +
                                                 std::to_string(correlations.size())))
        return;
    const auto& scan = correlations.front();
    c.require(scan.source_prefix == "203.0.113.0/24",
              "correlated prefix is " + scan.source_prefix);
    c.require(scan.flagged, "query-then-connect source was not flagged");
    c.require(scan.ports.size() == 30,
              "port count " + std::to_string(scan.ports.size()) + ", expected 30");
    c.require(scan.first_dns_ms == entry + 600000 &&
                  scan.first_connection_ms == entry + 605000 && scan.lag_ms == 5000,
              "scan timing fields are off");
    c.require(scan.asns == std::set<std::uint32_t>{64496, 64511}, "scan AS union is wrong");
}

} // namespace

int main() {
    using Clock = std::chrono::steady_clock;
    struct Criterion {
        const char* name;
        void (*fn)(Checker&);
        double budget_s; // 0: bounded only by the whole-run budget
    };
    const Criterion criteria[] = {
        {"merkle roots and proofs against a recursive oracle", check_merkle, 60.0},
        {"log audit: tamper detection and clean round-trip", check_audit, 120.0},
        {"embedded SCT verification and mismatch classification", check_sct, 0.0},
        {"per-CA growth tallies against a brute-force recount", check_growth, 0.0},
        {"label statistics and subdomain discovery pipeline", check_leakage, 0.0},
        {"phishing-shaped names flagged, legitimate bases exempt", check_phishing, 0.0},
        {"honeypot telemetry metrics and scan correlation", check_honeypot, 0.0},
    };

    const auto suite_start = Clock::now();
    int failed = 0;
    int index = 0;
    for (const auto& crit : criteria) {
        ++index;
        Checker c;
        const auto start = Clock::now();
        try {
            crit.fn(c);
        } catch (const std::exception& e) {
            c.require(false, std::string("unhandled exception: ") + e.what());
        } catch (...) {
            c.require(false, "unhandled non-standard exception");
        }
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        if (crit.budget_s > 0 && secs > crit.budget_s)
            c.require(false, "exceeded the " + std::to_string(static_cast<int>(crit.budget_s)) +
                                 " s budget");
        if (c.ok()) {
            std::printf("PASS  [%d] %-56s %6.2fs\n", index, crit.name, secs);
        } else {
            ++failed;
            std::printf("FAIL  [%d] %-56s %6.2fs\n", index, crit.name, secs);
            std::size_t shown = 0;
            for (const auto& note : c.failures()) {
                if (shown++ == 6) {
                    std::printf("      - (and %zu more)\n", c.failures().size() - 6);
                    break;
                }
                std::printf("      - %s\n", note.c_str());
            }
        }
        std::fflush(stdout);
    }

    const double total = std::chrono::duration<double>(Clock::now() - suite_start).count();
    const bool within_budget = total < 600.0;
    std::printf("%s  [8] %-56s %6.2fs\n", within_budget ? "PASS" : "FAIL",
                "whole run under ten minutes, loopback traffic only", total);
    if (!within_budget) ++failed;
    std::fflush(stdout);
    return failed == 0 ? 0 : 1;
}
