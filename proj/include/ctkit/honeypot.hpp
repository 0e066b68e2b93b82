#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctkit::honeypot {

// Leak-only honeypot domains and the telemetry analysis around them: CT-to-
// first-DNS latency, per-AS and EDNS-client-subnet query statistics, and the
// correlation of DNS lookups with subsequent port scans.

struct HoneypotDomain {
    std::string fqdn;                // random 12-character leftmost label under the parent zone
    std::uint64_t ct_entry_ms = 0;   // first appearance in a CT log
    std::string batch;
    std::string ipv6;                // address the name resolves to, recorded for reference
};

/// `count` domains with pairwise-distinct random 12-character labels
/// (a-z0-9, ~62 bits each) under parent_zone. A seed reproduces a batch;
/// nullopt draws fresh entropy.
std::vector<HoneypotDomain> generate_domains(std::size_t count, std::string_view parent_zone,
                                             std::optional<std::uint64_t> seed = std::nullopt,
                                             std::string_view batch = "");

/// Issuance is external; implementations return the CT entry timestamp for
/// a freshly leaked domain.
class IssuanceDriver {
public:
    virtual ~IssuanceDriver() = default;
    virtual std::uint64_t issue(const HoneypotDomain& domain) = 0;
};

/// Test stub: hands back a caller-supplied timestamp.
class StubIssuer : public IssuanceDriver {
public:
    explicit StubIssuer(std::function<std::uint64_t(const HoneypotDomain&)> fn)
        : fn_(std::move(fn)) {}
    std::uint64_t issue(const HoneypotDomain& domain) override { return fn_(domain); }

private:
    std::function<std::uint64_t(const HoneypotDomain&)> fn_;
};

/// Runs `command <fqdn>` and reads an epoch-millisecond timestamp from its
/// stdout; throws when the command fails or prints no number.
class CommandIssuer : public IssuanceDriver {
public:
    explicit CommandIssuer(std::string command) : command_(std::move(command)) {}
    std::uint64_t issue(const HoneypotDomain& domain) override;

private:
    std::string command_;
};

// Manifest: TSV fqdn<TAB>ct_entry_ms<TAB>batch[<TAB>ipv6].
std::vector<HoneypotDomain> load_manifest(std::istream& in);
std::vector<HoneypotDomain> load_manifest_file(const std::filesystem::path& file);
void write_manifest(std::ostream& out, std::span<const HoneypotDomain> domains);

enum class EventKind { dns_query, connection };

struct Event {
    std::uint64_t time_ms = 0;
    EventKind kind = EventKind::dns_query;
    std::string qname; // queried name; for connections, the targeted host name
    std::string qtype; // "A", "AAAA", ... (dns_query only)
    std::string src_ip;
    std::optional<std::uint32_t> asn;
    std::string ecs; // EDNS client subnet as sent, e.g. "203.0.113.0/24"
    std::optional<std::uint16_t> dst_port; // connection only
};

struct TelemetryLoad {
    std::vector<Event> events;
    std::size_t malformed_lines = 0; // skipped, counted for the caller to log
};

/// TSV `epoch_ms<TAB>kind<TAB>qname<TAB>qtype<TAB>src_ip<TAB>asn<TAB>ecs<TAB>dst_port`,
/// empty fields allowed, '#' comments. kind is "dns_query" or "connection".
TelemetryLoad load_telemetry(std::istream& in);
TelemetryLoad load_telemetry_file(const std::filesystem::path& file);

/// Events whose qname is a honeypot domain (or beneath one); everything else
/// is background noise and dropped.
std::vector<Event> filter_to_domains(std::span<const Event> events,
                                     std::span<const HoneypotDomain> domains);

/// Remove CA-validation traffic: per domain, DNS queries before the CT entry
/// time, and any later DNS queries from sources that had queried that domain
/// pre-logging (the same validation infrastructure re-checking). Connections
/// are untouched.
std::vector<Event> filter_ca_validation(std::span<const Event> events,
                                        std::span<const HoneypotDomain> domains);

/// Offline prefix -> ASN mapping, longest prefix wins.
/// File format: one `CIDR<TAB>asn` (or space-separated) per line.
class AsnTable {
public:
    AsnTable() = default;
    static AsnTable from_file(const std::filesystem::path& file);

    void add(std::string_view cidr, std::uint32_t asn); // throws on malformed CIDR
    std::optional<std::uint32_t> lookup(std::string_view ip) const;
    std::size_t size() const { return prefixes_.size(); }

private:
    struct Prefix {
        std::uint32_t base = 0;
        std::uint32_t mask = 0;
        unsigned len = 0;
        std::uint32_t asn = 0;
    };
    std::vector<Prefix> prefixes_;
};

/// Fill in missing event ASNs from the table; pre-annotated values win.
void annotate_asn(std::span<Event> events, const AsnTable& table);

struct DomainReport {
    std::string fqdn;
    std::uint64_t ct_entry_ms = 0;
    std::optional<std::uint64_t> first_dns_ms;
    std::optional<std::int64_t> delta_s; // first DNS minus CT entry, whole seconds
    std::uint64_t query_count = 0;       // Q
    std::uint64_t distinct_as = 0;       // AS, over queries carrying an ASN
    std::uint64_t distinct_ecs = 0;      // CS, over queries carrying a client subnet (/24)
    std::vector<std::uint32_t> first_3_ases; // first-seen order
    std::optional<std::uint64_t> first_http_ms;
    std::optional<std::int64_t> http_delta_s; // first connection minus CT entry
    std::set<std::uint32_t> http_asns;
};

/// Per-domain metrics over (already filtered) events. Input order does not
/// matter; events are sorted internally.
std::vector<DomainReport> report(std::span<const HoneypotDomain> domains,
                                 std::span<const Event> events);

void write_report_csv(std::ostream& out, std::span<const DomainReport> reports);

struct EcsStat {
    std::string prefix; // normalized to /24, e.g. "203.0.113.0/24"
    std::uint64_t count = 0;
    std::set<std::string> qtypes;
};

struct EcsBreakdown {
    std::vector<EcsStat> stats;      // sorted by count descending, then prefix
    std::size_t malformed_ecs = 0;   // events excluded for an unparsable subnet
};

/// Query counts and qtype sets per EDNS client subnet, normalized to /24.
/// Events without a subnet are not part of the breakdown.
EcsBreakdown ecs_breakdown(std::span<const Event> events);

struct ScanCorrelation {
    std::string source_prefix; // ECS /24 when the queries carried one, else source-IP /24
    bool flagged = false;      // queried a honeypot name, then connected later
    std::uint64_t first_dns_ms = 0;
    std::uint64_t first_connection_ms = 0;
    std::int64_t lag_ms = 0; // first connection minus first DNS query
    std::set<std::uint16_t> ports;
    std::set<std::string> targets;
    std::set<std::uint32_t> asns;
};

/// One record per source seen on both sides: DNS queries correlated with
/// connections from the same /24 (or covered by the queries' client subnet).
/// Sources that only queried, or only connected, produce no record.
std::vector<ScanCorrelation> correlate_scans(std::span<const Event> dns_events,
                                             std::span<const Event> connection_events);

void write_correlations_csv(std::ostream& out, std::span<const ScanCorrelation> records);

} // namespace ctkit::honeypot
