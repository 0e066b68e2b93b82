#include "ctkit/cli.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctkit/bytes.hpp"
#include "ctkit/growth.hpp"
#include "ctkit/honeypot.hpp"
#include "ctkit/leaf.hpp"
#include "ctkit/logclient.hpp"
#include "ctkit/names.hpp"
#include "ctkit/phishing.hpp"
#include "ctkit/psl.hpp"
#include "ctkit/resolver.hpp"
#include "ctkit/sct.hpp"
#include "ctkit/store.hpp"
#include "ctkit/x509.hpp"

namespace ctkit::cli {

namespace {

namespace fs = std::filesystem;

fs::path resolve_rel(const fs::path& base_dir, const std::string& value) {
    fs::path p(value);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

void require_exists(const fs::path& p, const char* key) {
    if (!p.empty() && !fs::exists(p)) {
        throw std::runtime_error(std::string("config: ") + key + " path does not exist: " +
                                 p.string());
    }
}

std::string lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

std::vector<std::string> read_lines(const fs::path& file, const char* what) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error(std::string(what) + ": cannot open " + file.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos || line[b] == '#') continue;
        std::size_t e = line.find_last_not_of(" \t");
        out.push_back(lower(std::string_view(line).substr(b, e - b + 1)));
    }
    return out;
}

std::ostream& open_out(std::ofstream& file, const std::string& path, const char* what) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error(std::string(what) + ": cannot write " + path);
    return file;
}

/// PEM CERTIFICATE block(s) if present, else the raw bytes as one DER blob.
std::vector<Bytes> read_cert_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open certificate file " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    std::string data = ss.str();
    if (data.find("-----BEGIN") == std::string::npos) {
        return {Bytes(data.begin(), data.end())};
    }
    std::vector<Bytes> out;
    std::size_t pos = 0;
    const std::string begin_mark = "-----BEGIN CERTIFICATE-----";
    const std::string end_mark = "-----END CERTIFICATE-----";
    while ((pos = data.find(begin_mark, pos)) != std::string::npos) {
        std::size_t body = pos + begin_mark.size();
        std::size_t end = data.find(end_mark, body);
        if (end == std::string::npos) break;
        std::string b64;
        for (std::size_t i = body; i < end; ++i) {
            if (!std::isspace(static_cast<unsigned char>(data[i]))) b64.push_back(data[i]);
        }
        auto der = base64_decode(b64);
        if (!der) throw std::runtime_error("invalid base64 in " + file.string());
        out.push_back(std::move(*der));
        pos = end + end_mark.size();
    }
    if (out.empty()) throw std::runtime_error("no certificate found in " + file.string());
    return out;
}

x509::ParsedCert parse_cert_file(const fs::path& file) {
    auto blobs = read_cert_file(file);
    return x509::parse_certificate(view(blobs.front()));
}

/// Walk every stored entry, handing the parsed certificate along when the
/// bytes decode (nullptr when they do not).
void for_each_certificate(
    store::EntryStore& archive,
    const std::function<void(const std::string& log, const store::StoredEntry& stored,
                             const ctlog::ExtractedCert& info, const x509::ParsedCert* cert)>& fn) {
    for (const auto& log : archive.logs()) {
        archive.for_each(log, [&](const store::StoredEntry& stored) {
            ctlog::ExtractedCert info = ctlog::extract_certificate(stored.entry);
            if (info.parse_ok) {
                try {
                    x509::ParsedCert cert = x509::parse_certificate(view(info.der));
                    fn(log, stored, info, &cert);
                    return;
                } catch (const std::exception&) {
                    // fall through: stored bytes that do not parse as X.509
                }
            }
            fn(log, stored, info, nullptr);
        });
    }
}

std::set<std::string> collect_names(store::EntryStore& archive) {
    std::set<std::string> names;
    for_each_certificate(archive, [&](const std::string&, const store::StoredEntry&,
                                      const ctlog::ExtractedCert&, const x509::ParsedCert* cert) {
        if (!cert) return;
        for (const auto& name : x509::extract_names(*cert)) names.insert(name);
    });
    return names;
}

/// FqdnRecords for a set of unique names. A leading wildcard label is
/// dropped first (the wildcard itself is not a label occurrence); names that
/// are bare public suffixes are excluded and counted.
std::vector<names::FqdnRecord> records_for(const std::set<std::string>& unique_names,
                                           const psl::PublicSuffixSet& suffixes,
                                           std::size_t& suffix_only) {
    std::vector<names::FqdnRecord> records;
    for (const auto& raw : unique_names) {
        std::string_view name = raw;
        if (name.size() > 2 && name[0] == '*' && name[1] == '.') name = name.substr(2);
        auto rec = names::split(name, suffixes);
        if (!rec) {
            ++suffix_only;
            continue;
        }
        records.push_back(std::move(*rec));
    }
    return records;
}

psl::PublicSuffixSet load_psl_or_throw(const Config& cfg) {
    if (cfg.psl.empty()) throw std::runtime_error("a public suffix list is required (config \"psl\")");
    return psl::PublicSuffixSet::from_file(cfg.psl);
}

// ---------------------------------------------------------------- fetch/audit

struct FetchFlags {
    std::vector<std::string> logs; // empty: all configured
    std::optional<std::uint64_t> upto;
    std::size_t batch = 256;
    bool freeze = false; // audit mode: verify the archive, fetch nothing new
};

int run_fetch(const Config& cfg, const FetchFlags& flags) {
    if (cfg.logs.empty()) throw std::runtime_error("a log list is required (config \"logs\")");
    auto descriptors = ctlog::load_log_config(cfg.logs.string());
    store::EntryStore archive(cfg.store_dir);

    int rc = 0;
    bool matched_any = false;
    for (const auto& desc : descriptors) {
        if (!flags.logs.empty() &&
            std::find(flags.logs.begin(), flags.logs.end(), desc.name) == flags.logs.end()) {
            continue;
        }
        matched_any = true;
        ctlog::ClientOptions opt;
        opt.batch_size = flags.batch;
        ctlog::LogClient client(desc, opt);
        ctlog::AuditOptions aopt;
        if (flags.freeze) {
            auto hw = archive.high_water(desc.name);
            aopt.upto = hw ? *hw + 1 : 0;
        } else {
            aopt.upto = flags.upto;
        }
        ctlog::AuditReport report = ctlog::audit_fetch(client, archive, aopt);

        nlohmann::json j{{"log", desc.name},
                         {"log_size", report.log_size},
                         {"stored_before", report.stored_before},
                         {"stored_after", report.stored_after},
                         {"signature_valid", report.signature_valid},
                         {"monotonic", report.monotonic},
                         {"consistent", report.consistent},
                         {"root_matches", report.root_matches},
                         {"ok", report.ok()},
                         {"problems", report.problems}};
        std::cout << j.dump() << "\n";
        if (!report.ok()) rc = 1;
    }
    if (!matched_any) throw std::runtime_error("no configured log matches the --log selection");
    return rc;
}

// ----------------------------------------------------------------------- stats

int run_stats(const Config& cfg) {
    store::EntryStore archive(cfg.store_dir);
    for (const auto& log : archive.logs()) {
        store::Stats s = archive.stats(log);
        nlohmann::json j{{"log", log},
                         {"entries", s.entries},
                         {"bytes", s.bytes},
                         {"x509_entries", s.x509_entries},
                         {"precert_entries", s.precert_entries},
                         {"undecodable", s.undecodable},
                         {"distinct_certificates", s.distinct_certificates}};
        if (s.high_water) j["high_water"] = *s.high_water;
        else j["high_water"] = nullptr;
        std::cout << j.dump() << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------- growth

struct GrowthFlags {
    std::string window;
    std::string out_dir = ".";
    std::size_t top_n = 10;
};

int run_growth(const Config& cfg, const GrowthFlags& flags) {
    store::EntryStore archive(cfg.store_dir);
    growth::AliasMap aliases;
    if (!cfg.ca_aliases.empty()) {
        std::ifstream in(cfg.ca_aliases);
        if (!in) throw std::runtime_error("cannot open alias map " + cfg.ca_aliases.string());
        aliases = growth::load_alias_map(in);
    }

    std::vector<growth::Entry> entries;
    for_each_certificate(archive, [&](const std::string& log, const store::StoredEntry&,
                                      const ctlog::ExtractedCert& info,
                                      const x509::ParsedCert* cert) {
        growth::Entry e;
        e.log = log;
        e.timestamp_ms = info.timestamp_ms;
        e.precert = info.entry_type == sct::EntryType::precert;
        if (cert) e.issuer = cert->issuer_org.empty() ? cert->issuer_cn : cert->issuer_org;
        entries.push_back(std::move(e));
    });

    fs::path dir(flags.out_dir);
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "growth.csv");
        if (!out) throw std::runtime_error("cannot write growth.csv");
        growth::write_growth_csv(out, growth::cumulative_growth(entries, aliases, flags.top_n));
    }
    {
        std::ofstream out(dir / "rates.csv");
        if (!out) throw std::runtime_error("cannot write rates.csv");
        growth::write_rates_csv(out, growth::daily_rates(entries, aliases));
    }
    if (!flags.window.empty()) {
        growth::DateWindow window = growth::parse_window(flags.window);
        std::ofstream out(dir / "matrix.csv");
        if (!out) throw std::runtime_error("cannot write matrix.csv");
        growth::write_matrix_csv(out, growth::ca_log_matrix(entries, aliases, window));
    }
    return 0;
}

// ------------------------------------------------------------------ leak-stats

struct LeakFlags {
    bool top = false; // per-suffix top label instead of raw counts
    std::string out;
};

int run_leak_stats(const Config& cfg, const LeakFlags& flags) {
    store::EntryStore archive(cfg.store_dir);
    psl::PublicSuffixSet suffixes = load_psl_or_throw(cfg);
    std::set<std::string> unique_names = collect_names(archive);
    std::size_t suffix_only = 0;
    auto records = records_for(unique_names, suffixes, suffix_only);
    if (suffix_only) {
        std::cerr << "excluded " << suffix_only << " names that are bare public suffixes\n";
    }
    names::LabelStats stats = names::label_stats(records);

    std::ofstream file;
    std::ostream& out = open_out(file, flags.out, "leak-stats");
    if (flags.top) {
        for (const auto& [suffix, label] : names::top_label_per_suffix(stats)) {
            out << suffix << '\t' << label << '\n';
        }
    } else {
        for (const auto& [label, suffixes_of] : stats.per_label) {
            for (const auto& [suffix, count] : suffixes_of) {
                out << label << '\t' << suffix << '\t' << count << '\n';
            }
        }
    }
    return 0;
}

// ------------------------------------------------------------------- enumerate

struct EnumerateFlags {
    std::uint64_t min_count = 100000;
    std::size_t top_suffixes = 10;
    std::string excluded = "com,net,org";
    std::string out;
};

int run_enumerate(const Config& cfg, const EnumerateFlags& flags,
                  std::optional<std::uint64_t> seed) {
    if (cfg.domain_list.empty()) {
        throw std::runtime_error("a domain list is required (config \"domain_list\")");
    }
    store::EntryStore archive(cfg.store_dir);
    psl::PublicSuffixSet suffixes = load_psl_or_throw(cfg);
    std::set<std::string> unique_names = collect_names(archive);
    std::size_t suffix_only = 0;
    auto records = records_for(unique_names, suffixes, suffix_only);
    names::LabelStats stats = names::label_stats(records);

    names::CandidateConfig cc;
    cc.min_label_count = flags.min_count;
    cc.top_suffixes_per_label = flags.top_suffixes;
    cc.excluded_suffixes.clear();
    std::stringstream ss(flags.excluded);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) cc.excluded_suffixes.insert(lower(item));
    }

    std::vector<std::string> domains = read_lines(cfg.domain_list, "domain list");
    auto candidates =
        names::construct_candidates(stats, domains, unique_names, suffixes, cc, seed);

    std::ofstream file;
    std::ostream& out = open_out(file, flags.out, "enumerate");
    names::write_candidates_tsv(out, candidates);
    std::cerr << candidates.size() << " candidate pairs\n";
    return 0;
}

// ------------------------------------------------------------------ verify-dns

struct VerifyDnsFlags {
    std::string candidates; // TSV test<TAB>control
    std::string out;
    std::string discovered; // optional: newly discovered names, one per line
};

std::vector<names::CandidateFqdn> load_candidates(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("verify-dns: cannot open " + file.string());
    std::vector<names::CandidateFqdn> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error("verify-dns: line " + std::to_string(lineno) +
                                     ": expected test<TAB>control");
        }
        names::CandidateFqdn c;
        c.test_name = lower(std::string_view(line).substr(0, tab));
        c.control_name = lower(std::string_view(line).substr(tab + 1));
        std::size_t dot = c.test_name.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 >= c.test_name.size()) {
            throw std::runtime_error("verify-dns: line " + std::to_string(lineno) +
                                     ": test name has no subdomain label");
        }
        c.label = c.test_name.substr(0, dot);
        c.base_domain = c.test_name.substr(dot + 1);
        out.push_back(std::move(c));
    }
    return out;
}

int run_verify_dns(const Config& cfg, const VerifyDnsFlags& flags) {
    if (flags.candidates.empty()) {
        throw std::runtime_error("verify-dns: --candidates is required");
    }
    if (cfg.resolvers.empty()) {
        throw std::runtime_error("verify-dns: no resolvers configured");
    }
    auto candidates = load_candidates(flags.candidates);

    resolver::ResolverConfig rc;
    rc.servers = cfg.resolvers;
    rc.timeout_ms = cfg.timeout_ms;
    rc.qps = cfg.qps;
    rc.workers = static_cast<std::size_t>(cfg.workers);

    resolver::RoutabilityTable table;
    if (!cfg.routability.empty()) {
        auto mode = cfg.routability_mode == "allow" ? resolver::RoutabilityTable::Mode::allow
                                                    : resolver::RoutabilityTable::Mode::deny;
        table = resolver::RoutabilityTable::from_file(cfg.routability, mode);
    }
    resolver::Blocklist blocklist;
    if (!cfg.blocklist.empty()) blocklist = resolver::Blocklist::from_file(cfg.blocklist);

    resolver::RunResult result = resolver::run_pairs(candidates, rc, table, blocklist);
    if (!result.skipped.empty()) {
        std::cerr << "skipped " << result.skipped.size() << " blocklisted candidates\n";
    }

    std::ofstream file;
    std::ostream& out = open_out(file, flags.out, "verify-dns");
    resolver::write_verdicts_tsv(out, result.verdicts);

    if (!flags.discovered.empty()) {
        std::set<std::string> known;
        if (!cfg.known_fqdns.empty()) {
            for (auto& name : read_lines(cfg.known_fqdns, "known list")) known.insert(name);
        }
        std::ofstream dfile(flags.discovered);
        if (!dfile) throw std::runtime_error("verify-dns: cannot write " + flags.discovered);
        for (const auto& name : resolver::diff_against_known(result.verdicts, known)) {
            dfile << name << '\n';
        }
    }
    return 0;
}

// ------------------------------------------------------------------ sct verify

struct SctFlags {
    std::string cert;
    std::string issuer;
    std::string precert; // optional: classify failures against this precert
    std::string logs;    // overrides config log list
};

int run_sct_verify(const Config& cfg, const SctFlags& flags) {
    if (flags.cert.empty()) throw std::runtime_error("sct verify: --cert is required");
    fs::path log_path = flags.logs.empty() ? cfg.logs : fs::path(flags.logs);
    if (log_path.empty()) {
        throw std::runtime_error("sct verify: a log list is required (--logs or config \"logs\")");
    }

    x509::ParsedCert cert = parse_cert_file(flags.cert);
    std::optional<x509::ParsedCert> issuer;
    if (!flags.issuer.empty()) issuer = parse_cert_file(flags.issuer);
    std::optional<x509::ParsedCert> precert;
    if (!flags.precert.empty()) precert = parse_cert_file(flags.precert);

    std::vector<sct::LogKey> keys;
    for (const auto& desc : ctlog::load_log_config(log_path.string())) {
        keys.push_back(sct::make_log_key(view(desc.spki_der), desc.name));
    }

    std::vector<sct::Sct> scts = sct::scts_from_cert(cert);
    if (scts.empty()) {
        std::cerr << "certificate carries no embedded SCTs\n";
    }

    int rc = 0;
    for (auto& s : scts) {
        sct::verify_sct(s, cert, issuer ? &*issuer : nullptr, keys);
        nlohmann::json j{{"fingerprint", to_hex(view(cert.fingerprint))},
                         {"log_id", to_hex(view(s.log_id))},
                         {"timestamp_ms", s.timestamp_ms},
                         {"channel", sct::to_string(s.channel)},
                         {"status", sct::to_string(s.status)}};
        for (const auto& k : keys) {
            if (k.id == s.log_id && !k.name.empty()) {
                j["log"] = k.name;
                break;
            }
        }
        if (!s.note.empty()) j["note"] = s.note;
        if (s.status == sct::Status::invalid_signature && precert) {
            sct::SctFinding finding = sct::classify_invalid(*precert, cert, s);
            j["classification"] = sct::to_string(finding.classification);
            if (!finding.diff_summary.empty()) j["diff"] = finding.diff_summary;
        } else if (s.status == sct::Status::valid) {
            j["classification"] = sct::to_string(sct::Classification::ok);
        }
        std::cout << j.dump() << "\n";
        if (s.status == sct::Status::invalid_signature) rc = 1;
    }
    return rc;
}

// ----------------------------------------------------------------- phish scan

struct PhishFlags {
    std::string rules;
    std::string names_file; // "-" for stdin; empty: names from the store
    std::string out;
    std::string breakdown;
};

int run_phish(const Config& cfg, const PhishFlags& flags) {
    psl::PublicSuffixSet suffixes = load_psl_or_throw(cfg);

    std::vector<phishing::ServiceRule> rules;
    fs::path rule_path = flags.rules.empty() ? cfg.phishing_rules : fs::path(flags.rules);
    if (rule_path.empty()) rules = phishing::default_rules();
    else rules = phishing::load_rules_file(rule_path);

    std::set<std::string> unique_names;
    if (flags.names_file == "-") {
        std::string line;
        while (std::getline(std::cin, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) unique_names.insert(lower(line));
        }
    } else if (!flags.names_file.empty()) {
        for (auto& name : read_lines(flags.names_file, "names")) unique_names.insert(name);
    } else {
        store::EntryStore archive(cfg.store_dir);
        unique_names = collect_names(archive);
    }

    std::size_t suffix_only = 0;
    auto records = records_for(unique_names, suffixes, suffix_only);

    std::vector<phishing::Finding> findings;
    for (const auto& rec : records) {
        auto hits = phishing::match(rec, rules);
        findings.insert(findings.end(), hits.begin(), hits.end());
    }

    std::ofstream file;
    std::ostream& out = open_out(file, flags.out, "phish");
    phishing::write_findings_csv(out, findings);

    if (!flags.breakdown.empty()) {
        std::ofstream bfile(flags.breakdown);
        if (!bfile) throw std::runtime_error("phish: cannot write " + flags.breakdown);
        phishing::write_breakdown_csv(bfile, phishing::suffix_breakdown(findings));
    }
    return 0;
}

// ------------------------------------------------------------ honeypot-report

struct HoneypotFlags {
    std::string manifest;
    std::string telemetry;
    std::string out_dir = ".";
    std::size_t generate = 0; // when nonzero: emit a fresh manifest instead
    std::string zone;
    std::string batch;
};

int run_honeypot(const Config& cfg, const HoneypotFlags& flags,
                 std::optional<std::uint64_t> seed) {
    if (flags.generate > 0) {
        if (flags.zone.empty()) {
            throw std::runtime_error("honeypot-report: --zone is required with --generate");
        }
        auto domains = honeypot::generate_domains(flags.generate, flags.zone, seed, flags.batch);
        honeypot::write_manifest(std::cout, domains);
        return 0;
    }

    if (flags.manifest.empty() || flags.telemetry.empty()) {
        throw std::runtime_error("honeypot-report: --manifest and --telemetry are required");
    }
    auto domains = honeypot::load_manifest_file(flags.manifest);
    honeypot::TelemetryLoad telemetry = honeypot::load_telemetry_file(flags.telemetry);
    if (telemetry.malformed_lines) {
        std::cerr << "skipped " << telemetry.malformed_lines << " malformed telemetry lines\n";
    }

    auto events = honeypot::filter_to_domains(telemetry.events, domains);
    auto filtered = honeypot::filter_ca_validation(events, domains);
    if (!cfg.asn_table.empty()) {
        honeypot::AsnTable table = honeypot::AsnTable::from_file(cfg.asn_table);
        honeypot::annotate_asn(filtered, table);
    }

    fs::path dir(flags.out_dir);
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "report.csv");
        if (!out) throw std::runtime_error("honeypot-report: cannot write report.csv");
        honeypot::write_report_csv(out, honeypot::report(domains, filtered));
    }
    {
        honeypot::EcsBreakdown ecs = honeypot::ecs_breakdown(filtered);
        if (ecs.malformed_ecs) {
            std::cerr << "excluded " << ecs.malformed_ecs << " events with malformed client subnets\n";
        }
        std::ofstream out(dir / "ecs.csv");
        if (!out) throw std::runtime_error("honeypot-report: cannot write ecs.csv");
        out << "prefix,count,qtypes\n";
        for (const auto& s : ecs.stats) {
            out << s.prefix << ',' << s.count << ',';
            bool first = true;
            for (const auto& q : s.qtypes) {
                if (!first) out << ';';
                out << q;
                first = false;
            }
            out << '\n';
        }
    }
    {
        std::ofstream out(dir / "scans.csv");
        if (!out) throw std::runtime_error("honeypot-report: cannot write scans.csv");
        honeypot::write_correlations_csv(out, honeypot::correlate_scans(filtered, filtered));
    }
    return 0;
}

} // namespace

Config Config::load(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("config: cannot open " + file.string());
    nlohmann::json doc = nlohmann::json::parse(in);
    if (!doc.is_object()) throw std::runtime_error("config: top level must be an object");

    Config cfg;
    fs::path base = file.parent_path();
    auto path_of = [&](const char* key, fs::path& target) {
        if (doc.contains(key)) {
            target = resolve_rel(base, doc[key].get<std::string>());
            require_exists(target, key);
        }
    };
    if (doc.contains("store_dir")) {
        cfg.store_dir = resolve_rel(base, doc["store_dir"].get<std::string>());
    }
    path_of("logs", cfg.logs);
    path_of("psl", cfg.psl);
    path_of("domain_list", cfg.domain_list);
    path_of("phishing_rules", cfg.phishing_rules);
    path_of("ca_aliases", cfg.ca_aliases);
    path_of("routability", cfg.routability);
    path_of("blocklist", cfg.blocklist);
    path_of("known_fqdns", cfg.known_fqdns);
    path_of("asn_table", cfg.asn_table);
    if (doc.contains("routability_mode")) {
        cfg.routability_mode = doc["routability_mode"].get<std::string>();
        if (cfg.routability_mode != "allow" && cfg.routability_mode != "deny") {
            throw std::runtime_error("config: routability_mode must be \"allow\" or \"deny\"");
        }
    }
    if (doc.contains("resolvers")) {
        for (const auto& r : doc["resolvers"]) cfg.resolvers.push_back(r.get<std::string>());
    }
    if (doc.contains("qps")) cfg.qps = doc["qps"].get<double>();
    if (doc.contains("timeout_ms")) cfg.timeout_ms = doc["timeout_ms"].get<int>();
    if (doc.contains("workers")) cfg.workers = doc["workers"].get<int>();
    return cfg;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Certificate Transparency analysis toolkit"};
    app.fallthrough();
    app.require_subcommand(1);

    // Globals, overriding the config file.
    std::string config_path;
    std::string store_dir_flag, psl_flag, logs_flag, blocklist_flag, domain_list_flag;
    std::vector<std::string> resolver_flags;
    std::optional<double> qps_flag;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "Configuration file (JSON)");
    app.add_option("--store-dir", store_dir_flag, "Entry store directory");
    app.add_option("--psl", psl_flag, "Public suffix list file");
    app.add_option("--logs", logs_flag, "Log list file (JSON)");
    app.add_option("--domain-list", domain_list_flag, "Registrable-domain list file");
    app.add_option("--blocklist", blocklist_flag, "Do-not-query list file");
    app.add_option("--resolver", resolver_flags, "Resolver address ip[:port] (repeatable)");
    app.add_option("--qps", qps_flag, "Queries-per-second cap");
    app.add_option("--seed", seed, "Seed for randomized steps (reproducible runs)");

    auto effective_config = [&]() {
        Config cfg;
        if (!config_path.empty()) {
            cfg = Config::load(config_path);
        } else if (fs::exists("ctkit.json")) {
            cfg = Config::load("ctkit.json");
        }
        if (!store_dir_flag.empty()) cfg.store_dir = store_dir_flag;
        if (!psl_flag.empty()) cfg.psl = psl_flag;
        if (!logs_flag.empty()) cfg.logs = logs_flag;
        if (!domain_list_flag.empty()) cfg.domain_list = domain_list_flag;
        if (!blocklist_flag.empty()) cfg.blocklist = blocklist_flag;
        if (!resolver_flags.empty()) cfg.resolvers = resolver_flags;
        if (qps_flag) cfg.qps = *qps_flag;
        return cfg;
    };

    int rc = 0;
    auto set_rc = [&rc](int value) {
        if (value != 0) rc = value;
    };

    // fetch / audit
    FetchFlags fetch_flags;
    auto* fetch = app.add_subcommand("fetch", "Fetch new entries from configured logs and verify");
    fetch->add_option("--log", fetch_flags.logs, "Only this log (repeatable)");
    fetch->add_option("--upto", fetch_flags.upto, "Stop after this many entries (prefix audit)");
    fetch->add_option("--batch", fetch_flags.batch, "get-entries batch size");
    fetch->callback([&] { set_rc(run_fetch(effective_config(), fetch_flags)); });

    FetchFlags audit_flags;
    audit_flags.freeze = true;
    auto* audit = app.add_subcommand("audit", "Re-verify the stored archive against the log head");
    audit->add_option("--log", audit_flags.logs, "Only this log (repeatable)");
    audit->callback([&] { set_rc(run_fetch(effective_config(), audit_flags)); });

    // stats, also nested as `store stats`
    auto* stats = app.add_subcommand("stats", "Entry store statistics (JSON Lines)");
    stats->callback([&] { set_rc(run_stats(effective_config())); });
    auto* store_group = app.add_subcommand("store", "Entry store operations");
    store_group->require_subcommand(1);
    auto* store_stats = store_group->add_subcommand("stats", "Entry store statistics (JSON Lines)");
    store_stats->callback([&] { set_rc(run_stats(effective_config())); });

    // growth
    GrowthFlags growth_flags;
    auto* growth_cmd = app.add_subcommand("growth", "Per-CA growth, daily shares, CA x log matrix");
    growth_cmd->add_option("--window", growth_flags.window,
                           "Date window for the matrix (YYYY-MM or YYYY-MM-DD..YYYY-MM-DD)");
    growth_cmd->add_option("--out-dir", growth_flags.out_dir, "Output directory for CSV files");
    growth_cmd->add_option("--top", growth_flags.top_n, "Series for the top N CAs, rest as other");
    growth_cmd->callback([&] { set_rc(run_growth(effective_config(), growth_flags)); });

    // leak-stats
    LeakFlags leak_flags;
    auto* leak = app.add_subcommand("leak-stats", "Subdomain label statistics from stored names");
    leak->add_flag("--top", leak_flags.top, "Emit the top label per suffix instead of raw counts");
    leak->add_option("--out", leak_flags.out, "Output file (default stdout)");
    leak->callback([&] { set_rc(run_leak_stats(effective_config(), leak_flags)); });

    // enumerate
    EnumerateFlags enum_flags;
    auto* enumerate = app.add_subcommand("enumerate", "Construct candidate FQDNs with controls");
    enumerate->add_option("--min-count", enum_flags.min_count,
                          "Minimum total occurrences for a label to survive");
    enumerate->add_option("--top-suffixes", enum_flags.top_suffixes,
                          "Suffixes to keep per label");
    enumerate->add_option("--exclude", enum_flags.excluded,
                          "Comma-separated suffixes to disregard");
    enumerate->add_option("--out", enum_flags.out, "Output file (default stdout)");
    enumerate->callback([&] { set_rc(run_enumerate(effective_config(), enum_flags, seed)); });

    // verify-dns
    VerifyDnsFlags dns_flags;
    auto* verify_dns = app.add_subcommand("verify-dns", "Resolve candidate pairs and judge them");
    verify_dns->add_option("--candidates", dns_flags.candidates, "Candidate TSV from enumerate")
        ->required();
    verify_dns->add_option("--out", dns_flags.out, "Verdict TSV (default stdout)");
    verify_dns->add_option("--discovered", dns_flags.discovered,
                           "Write newly discovered names (after the known list) here");
    verify_dns->callback([&] { set_rc(run_verify_dns(effective_config(), dns_flags)); });

    // sct-verify, also nested as `sct verify`
    SctFlags sct_flags;
    auto add_sct_options = [&sct_flags](CLI::App* cmd) {
        cmd->add_option("--cert", sct_flags.cert, "Certificate (PEM or DER)")->required();
        cmd->add_option("--issuer", sct_flags.issuer, "Issuer certificate (PEM or DER)");
        cmd->add_option("--precert", sct_flags.precert,
                        "Matching precertificate; classifies signature failures");
        cmd->add_option("--logs", sct_flags.logs, "Log list file (defaults to config)");
    };
    auto* sct_verify = app.add_subcommand("sct-verify", "Verify embedded SCTs (JSON Lines)");
    add_sct_options(sct_verify);
    sct_verify->callback([&] { set_rc(run_sct_verify(effective_config(), sct_flags)); });
    auto* sct_group = app.add_subcommand("sct", "SCT operations");
    sct_group->require_subcommand(1);
    auto* sct_nested = sct_group->add_subcommand("verify", "Verify embedded SCTs (JSON Lines)");
    add_sct_options(sct_nested);
    sct_nested->callback([&] { set_rc(run_sct_verify(effective_config(), sct_flags)); });

    // phish, also nested as `phish scan`
    PhishFlags phish_flags;
    auto add_phish_options = [&phish_flags](CLI::App* cmd) {
        cmd->add_option("--rules", phish_flags.rules, "Rules file (JSON); built-ins when absent");
        cmd->add_option("--names", phish_flags.names_file,
                        "Names file, '-' for stdin; default reads the store");
        cmd->add_option("--out", phish_flags.out, "Findings CSV (default stdout)");
        cmd->add_option("--breakdown", phish_flags.breakdown, "Per-service suffix histogram CSV");
    };
    auto* phish = app.add_subcommand("phish", "Flag names imitating known services");
    add_phish_options(phish);
    auto* phish_scan = phish->add_subcommand("scan", "Flag names imitating known services");
    add_phish_options(phish_scan);
    phish_scan->callback([&] { set_rc(run_phish(effective_config(), phish_flags)); });
    phish->callback([&] {
        if (!phish_scan->parsed()) set_rc(run_phish(effective_config(), phish_flags));
    });

    // honeypot-report
    HoneypotFlags hp_flags;
    auto* honeypot_cmd =
        app.add_subcommand("honeypot-report", "Honeypot telemetry analysis (or manifest generation)");
    honeypot_cmd->add_option("--manifest", hp_flags.manifest, "Domain manifest TSV");
    honeypot_cmd->add_option("--telemetry", hp_flags.telemetry, "Telemetry TSV");
    honeypot_cmd->add_option("--out-dir", hp_flags.out_dir, "Output directory for CSV files");
    honeypot_cmd->add_option("--generate", hp_flags.generate,
                             "Generate this many fresh domains and print a manifest");
    honeypot_cmd->add_option("--zone", hp_flags.zone, "Parent zone for --generate");
    honeypot_cmd->add_option("--batch", hp_flags.batch, "Batch tag for --generate");
    honeypot_cmd->callback([&] { set_rc(run_honeypot(effective_config(), hp_flags, seed)); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}

} // namespace ctkit::cli
