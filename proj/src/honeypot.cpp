#include "ctkit/honeypot.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>

#include "ctkit/dnswire.hpp"
#include "ctkit/names.hpp"

namespace ctkit::honeypot {

namespace {

std::string lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t tab = line.find('\t', pos);
        if (tab == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, tab - pos));
        pos = tab + 1;
    }
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

/// Normalize an ECS field to a /24 prefix string; nullopt on anything that
/// does not parse as IPv4 with an optional length.
std::optional<std::string> normalize_ecs(std::string_view ecs) {
    std::size_t slash = ecs.find('/');
    std::string_view ip_part = slash == std::string_view::npos ? ecs : ecs.substr(0, slash);
    if (slash != std::string_view::npos) {
        auto len = parse_number<unsigned>(ecs.substr(slash + 1));
        if (!len || *len > 32) return std::nullopt;
    }
    auto ip = dns::parse_ipv4(ip_part);
    if (!ip) return std::nullopt;
    return dns::ipv4_to_string(*ip & 0xFFFFFF00u) + "/24";
}

std::optional<std::string> ip_slash24(std::string_view ip_text) {
    auto ip = dns::parse_ipv4(ip_text);
    if (!ip) return std::nullopt;
    return dns::ipv4_to_string(*ip & 0xFFFFFF00u) + "/24";
}

/// Whole seconds between two epoch-millisecond stamps, floored.
std::int64_t seconds_between(std::uint64_t later_ms, std::uint64_t earlier_ms) {
    std::int64_t diff = static_cast<std::int64_t>(later_ms) - static_cast<std::int64_t>(earlier_ms);
    return diff >= 0 ? diff / 1000 : (diff - 999) / 1000;
}

/// Index of the domain a qname belongs to (exact name or beneath it).
std::optional<std::size_t> owning_domain(std::string_view qname,
                                         std::span<const HoneypotDomain> domains) {
    std::string low = lower(qname);
    for (std::size_t i = 0; i < domains.size(); ++i) {
        const std::string& fqdn = domains[i].fqdn;
        if (low == fqdn) return i;
        if (low.size() > fqdn.size() + 1 && low.compare(low.size() - fqdn.size(), fqdn.size(), fqdn) == 0 &&
            low[low.size() - fqdn.size() - 1] == '.') {
            return i;
        }
    }
    return std::nullopt;
}

} // namespace

std::vector<HoneypotDomain> generate_domains(std::size_t count, std::string_view parent_zone,
                                             std::optional<std::uint64_t> seed,
                                             std::string_view batch) {
    std::mt19937_64 rng(seed ? *seed : std::random_device{}());
    std::set<std::string> used;
    std::vector<HoneypotDomain> out;
    out.reserve(count);
    while (out.size() < count) {
        std::string label = names::random_label(rng, 12);
        if (!used.insert(label).second) continue;
        HoneypotDomain d;
        d.fqdn = label + "." + std::string(parent_zone);
        d.batch = std::string(batch);
        out.push_back(std::move(d));
    }
    return out;
}

std::uint64_t CommandIssuer::issue(const HoneypotDomain& domain) {
    std::string quoted = "'";
    for (char c : domain.fqdn) {
        if (c == '\'') quoted += "'\\''";
        else quoted.push_back(c);
    }
    quoted += "'";
    std::string cmd = command_ + " " + quoted;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("honeypot: cannot run issuance command");
    std::string output;
    char buf[256];
    while (std::fgets(buf, sizeof buf, pipe)) output += buf;
    int rc = ::pclose(pipe);
    if (rc != 0) {
        throw std::runtime_error("honeypot: issuance command failed with status " +
                                 std::to_string(rc));
    }
    std::size_t begin = output.find_first_of("0123456789");
    if (begin == std::string::npos) {
        throw std::runtime_error("honeypot: issuance command printed no timestamp");
    }
    std::size_t end = begin;
    while (end < output.size() && std::isdigit(static_cast<unsigned char>(output[end]))) ++end;
    auto value = parse_number<std::uint64_t>(std::string_view(output).substr(begin, end - begin));
    if (!value) throw std::runtime_error("honeypot: issuance command printed no timestamp");
    return *value;
}

std::vector<HoneypotDomain> load_manifest(std::istream& in) {
    std::vector<HoneypotDomain> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_tabs(line);
        if (fields.size() < 3) {
            throw std::runtime_error("manifest: line " + std::to_string(lineno) +
                                     ": expected fqdn<TAB>ct_entry_ms<TAB>batch");
        }
        HoneypotDomain d;
        d.fqdn = lower(fields[0]);
        auto ts = parse_number<std::uint64_t>(fields[1]);
        if (!ts) {
            throw std::runtime_error("manifest: line " + std::to_string(lineno) +
                                     ": bad timestamp \"" + std::string(fields[1]) + "\"");
        }
        d.ct_entry_ms = *ts;
        d.batch = std::string(fields[2]);
        if (fields.size() > 3) d.ipv6 = std::string(fields[3]);
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<HoneypotDomain> load_manifest_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("manifest: cannot open " + file.string());
    return load_manifest(in);
}

void write_manifest(std::ostream& out, std::span<const HoneypotDomain> domains) {
    for (const auto& d : domains) {
        out << d.fqdn << '\t' << d.ct_entry_ms << '\t' << d.batch;
        if (!d.ipv6.empty()) out << '\t' << d.ipv6;
        out << '\n';
    }
}

TelemetryLoad load_telemetry(std::istream& in) {
    TelemetryLoad load;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_tabs(line);
        if (fields.size() < 8) {
            ++load.malformed_lines;
            continue;
        }
        Event e;
        auto ts = parse_number<std::uint64_t>(fields[0]);
        if (!ts) {
            ++load.malformed_lines;
            continue;
        }
        e.time_ms = *ts;
        if (fields[1] == "dns_query") {
            e.kind = EventKind::dns_query;
        } else if (fields[1] == "connection") {
            e.kind = EventKind::connection;
        } else {
            ++load.malformed_lines;
            continue;
        }
        e.qname = lower(fields[2]);
        e.qtype = std::string(fields[3]);
        e.src_ip = std::string(fields[4]);
        if (!fields[5].empty()) {
            auto asn = parse_number<std::uint32_t>(fields[5]);
            if (!asn) {
                ++load.malformed_lines;
                continue;
            }
            e.asn = *asn;
        }
        e.ecs = std::string(fields[6]);
        if (!fields[7].empty()) {
            auto port = parse_number<std::uint16_t>(fields[7]);
            if (!port) {
                ++load.malformed_lines;
                continue;
            }
            e.dst_port = *port;
        }
        load.events.push_back(std::move(e));
    }
    return load;
}

TelemetryLoad load_telemetry_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("telemetry: cannot open " + file.string());
    return load_telemetry(in);
}

std::vector<Event> filter_to_domains(std::span<const Event> events,
                                     std::span<const HoneypotDomain> domains) {
    std::vector<Event> out;
    for (const auto& e : events) {
        if (owning_domain(e.qname, domains)) out.push_back(e);
    }
    return out;
}

std::vector<Event> filter_ca_validation(std::span<const Event> events,
                                        std::span<const HoneypotDomain> domains) {
    // Sources that queried a domain before its CT entry are that domain's
    // validation infrastructure; their later queries for it go too.
    std::vector<std::set<std::string>> pre_sources(domains.size());
    for (const auto& e : events) {
        if (e.kind != EventKind::dns_query) continue;
        auto idx = owning_domain(e.qname, domains);
        if (idx && e.time_ms < domains[*idx].ct_entry_ms) {
            pre_sources[*idx].insert(e.src_ip);
        }
    }
    std::vector<Event> out;
    for (const auto& e : events) {
        if (e.kind == EventKind::dns_query) {
            auto idx = owning_domain(e.qname, domains);
            if (idx) {
                if (e.time_ms < domains[*idx].ct_entry_ms) continue;
                if (pre_sources[*idx].count(e.src_ip)) continue;
            }
        }
        out.push_back(e);
    }
    return out;
}

AsnTable AsnTable::from_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("asn table: cannot open " + file.string());
    AsnTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        std::size_t sep = line.find_first_of(" \t", b);
        if (sep == std::string::npos) {
            throw std::runtime_error("asn table: line " + std::to_string(lineno) +
                                     ": expected CIDR and asn");
        }
        std::size_t vb = line.find_first_not_of(" \t", sep);
        std::size_t ve = line.find_first_of(" \t\r", vb);
        auto asn = parse_number<std::uint32_t>(
            std::string_view(line).substr(vb, ve == std::string::npos ? ve : ve - vb));
        if (!asn) {
            throw std::runtime_error("asn table: line " + std::to_string(lineno) + ": bad asn");
        }
        t.add(std::string_view(line).substr(b, sep - b), *asn);
    }
    return t;
}

void AsnTable::add(std::string_view cidr, std::uint32_t asn) {
    std::size_t slash = cidr.find('/');
    std::string_view ip_part = slash == std::string_view::npos ? cidr : cidr.substr(0, slash);
    unsigned len = 32;
    if (slash != std::string_view::npos) {
        auto parsed = parse_number<unsigned>(cidr.substr(slash + 1));
        if (!parsed || *parsed > 32) {
            throw std::invalid_argument("asn table: bad prefix length in " + std::string(cidr));
        }
        len = *parsed;
    }
    auto ip = dns::parse_ipv4(ip_part);
    if (!ip) throw std::invalid_argument("asn table: bad address in " + std::string(cidr));
    Prefix p;
    p.len = len;
    p.mask = len == 0 ? 0 : ~std::uint32_t(0) << (32 - len);
    p.base = *ip & p.mask;
    p.asn = asn;
    prefixes_.push_back(p);
}

std::optional<std::uint32_t> AsnTable::lookup(std::string_view ip_text) const {
    auto ip = dns::parse_ipv4(ip_text);
    if (!ip) return std::nullopt;
    std::optional<std::uint32_t> best;
    unsigned best_len = 0;
    for (const auto& p : prefixes_) {
        if ((*ip & p.mask) == p.base && (!best || p.len >= best_len)) {
            best = p.asn;
            best_len = p.len;
        }
    }
    return best;
}

void annotate_asn(std::span<Event> events, const AsnTable& table) {
    for (auto& e : events) {
        if (!e.asn) e.asn = table.lookup(e.src_ip);
    }
}

std::vector<DomainReport> report(std::span<const HoneypotDomain> domains,
                                 std::span<const Event> events) {
    std::vector<std::vector<const Event*>> queries(domains.size());
    std::vector<std::vector<const Event*>> connections(domains.size());
    for (const auto& e : events) {
        auto idx = owning_domain(e.qname, domains);
        if (!idx) continue;
        (e.kind == EventKind::dns_query ? queries : connections)[*idx].push_back(&e);
    }

    auto by_time = [](const Event* a, const Event* b) {
        return a->time_ms < b->time_ms;
    };

    std::vector<DomainReport> out;
    out.reserve(domains.size());
    for (std::size_t i = 0; i < domains.size(); ++i) {
        std::sort(queries[i].begin(), queries[i].end(), by_time);
        std::sort(connections[i].begin(), connections[i].end(), by_time);

        DomainReport r;
        r.fqdn = domains[i].fqdn;
        r.ct_entry_ms = domains[i].ct_entry_ms;
        r.query_count = queries[i].size();

        std::set<std::uint32_t> ases;
        std::set<std::string> subnets;
        for (const Event* e : queries[i]) {
            if (e->asn) {
                if (ases.insert(*e->asn).second && r.first_3_ases.size() < 3) {
                    r.first_3_ases.push_back(*e->asn);
                }
            }
            if (!e->ecs.empty()) {
                if (auto prefix = normalize_ecs(e->ecs)) subnets.insert(*prefix);
            }
        }
        r.distinct_as = ases.size();
        r.distinct_ecs = subnets.size();
        if (!queries[i].empty()) {
            r.first_dns_ms = queries[i].front()->time_ms;
            r.delta_s = seconds_between(*r.first_dns_ms, r.ct_entry_ms);
        }
        if (!connections[i].empty()) {
            r.first_http_ms = connections[i].front()->time_ms;
            r.http_delta_s = seconds_between(*r.first_http_ms, r.ct_entry_ms);
            for (const Event* e : connections[i]) {
                if (e->asn) r.http_asns.insert(*e->asn);
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

template <typename Set>
void write_joined(std::ostream& out, const Set& values) {
    bool first = true;
    for (const auto& v : values) {
        if (!first) out << ';';
        out << v;
        first = false;
    }
}

} // namespace

void write_report_csv(std::ostream& out, std::span<const DomainReport> reports) {
    out << "fqdn,ct_entry_ms,first_dns_ms,delta_s,queries,distinct_as,distinct_ecs,"
           "first_3_ases,first_http_ms,http_delta_s,http_asns\n";
    for (const auto& r : reports) {
        out << r.fqdn << ',' << r.ct_entry_ms << ',';
        if (r.first_dns_ms) out << *r.first_dns_ms;
        out << ',';
        if (r.delta_s) out << *r.delta_s;
        out << ',' << r.query_count << ',' << r.distinct_as << ',' << r.distinct_ecs << ',';
        write_joined(out, r.first_3_ases);
        out << ',';
        if (r.first_http_ms) out << *r.first_http_ms;
        out << ',';
        if (r.http_delta_s) out << *r.http_delta_s;
        out << ',';
        write_joined(out, r.http_asns);
        out << '\n';
    }
}

EcsBreakdown ecs_breakdown(std::span<const Event> events) {
    EcsBreakdown result;
    std::map<std::string, EcsStat> stats;
    for (const auto& e : events) {
        if (e.kind != EventKind::dns_query || e.ecs.empty()) continue;
        auto prefix = normalize_ecs(e.ecs);
        if (!prefix) {
            ++result.malformed_ecs;
            continue;
        }
        auto& s = stats[*prefix];
        s.prefix = *prefix;
        s.count += 1;
        if (!e.qtype.empty()) s.qtypes.insert(e.qtype);
    }
    for (auto& [prefix, s] : stats) result.stats.push_back(std::move(s));
    std::sort(result.stats.begin(), result.stats.end(), [](const EcsStat& a, const EcsStat& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.prefix < b.prefix;
    });
    return result;
}

std::vector<ScanCorrelation> correlate_scans(std::span<const Event> dns_events,
                                             std::span<const Event> connection_events) {
    struct DnsSide {
        std::uint64_t first_ms = ~std::uint64_t(0);
        std::set<std::uint32_t> asns;
    };
    std::map<std::string, DnsSide> queried;
    for (const auto& e : dns_events) {
        if (e.kind != EventKind::dns_query) continue;
        std::optional<std::string> prefix;
        if (!e.ecs.empty()) prefix = normalize_ecs(e.ecs);
        if (!prefix) prefix = ip_slash24(e.src_ip);
        if (!prefix) continue;
        auto& side = queried[*prefix];
        side.first_ms = std::min(side.first_ms, e.time_ms);
        if (e.asn) side.asns.insert(*e.asn);
    }

    struct ConnSide {
        std::uint64_t first_ms = ~std::uint64_t(0);
        std::set<std::uint16_t> ports;
        std::set<std::string> targets;
        std::set<std::uint32_t> asns;
    };
    std::map<std::string, ConnSide> connected;
    for (const auto& e : connection_events) {
        if (e.kind != EventKind::connection) continue;
        auto prefix = ip_slash24(e.src_ip);
        if (!prefix) continue;
        auto& side = connected[*prefix];
        side.first_ms = std::min(side.first_ms, e.time_ms);
        if (e.dst_port) side.ports.insert(*e.dst_port);
        if (!e.qname.empty()) side.targets.insert(e.qname);
        if (e.asn) side.asns.insert(*e.asn);
    }

    std::vector<ScanCorrelation> out;
    for (const auto& [prefix, dns_side] : queried) {
        auto it = connected.find(prefix);
        if (it == connected.end()) continue; // queried but never connected
        const ConnSide& conn = it->second;
        ScanCorrelation rec;
        rec.source_prefix = prefix;
        rec.first_dns_ms = dns_side.first_ms;
        rec.first_connection_ms = conn.first_ms;
        rec.lag_ms = static_cast<std::int64_t>(conn.first_ms) -
                     static_cast<std::int64_t>(dns_side.first_ms);
        rec.flagged = conn.first_ms > dns_side.first_ms;
        rec.ports = conn.ports;
        rec.targets = conn.targets;
        rec.asns = dns_side.asns;
        rec.asns.insert(conn.asns.begin(), conn.asns.end());
        out.push_back(std::move(rec));
    }
    return out;
}

void write_correlations_csv(std::ostream& out, std::span<const ScanCorrelation> records) {
    out << "source,flagged,first_dns_ms,first_connection_ms,lag_ms,port_count,ports,targets\n";
    for (const auto& r : records) {
        out << r.source_prefix << ',' << (r.flagged ? 1 : 0) << ',' << r.first_dns_ms << ','
            << r.first_connection_ms << ',' << r.lag_ms << ',' << r.ports.size() << ',';
        write_joined(out, r.ports);
        out << ',';
        write_joined(out, r.targets);
        out << '\n';
    }
}

} // namespace ctkit::honeypot
