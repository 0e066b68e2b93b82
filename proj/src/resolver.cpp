#include "ctkit/resolver.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <fstream>
#include <random>
#include <stdexcept>
#include <thread>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include "ctkit/dnswire.hpp"

namespace ctkit::resolver {

namespace {

std::string lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

} // namespace

RoutabilityTable RoutabilityTable::from_lines(std::span<const std::string> cidrs, Mode mode) {
    RoutabilityTable t;
    t.mode_ = mode;
    for (const auto& line : cidrs) t.add_prefix(line);
    return t;
}

RoutabilityTable RoutabilityTable::from_file(const std::filesystem::path& file, Mode mode) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("routability: cannot open " + file.string());
    RoutabilityTable t;
    t.mode_ = mode;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        std::size_t e = line.find_first_of(" \t\r#", b);
        t.add_prefix(std::string_view(line).substr(b, e == std::string::npos ? e : e - b));
    }
    return t;
}

void RoutabilityTable::add_prefix(std::string_view cidr) {
    std::size_t slash = cidr.find('/');
    std::string_view ip_part = slash == std::string_view::npos ? cidr : cidr.substr(0, slash);
    unsigned len = 32;
    if (slash != std::string_view::npos) {
        std::string_view len_part = cidr.substr(slash + 1);
        auto [ptr, ec] = std::from_chars(len_part.data(), len_part.data() + len_part.size(), len);
        if (ec != std::errc() || ptr != len_part.data() + len_part.size() || len > 32) {
            throw std::invalid_argument("routability: bad prefix length in " + std::string(cidr));
        }
    }
    auto ip = dns::parse_ipv4(ip_part);
    if (!ip) throw std::invalid_argument("routability: bad address in " + std::string(cidr));
    std::uint32_t mask = len == 0 ? 0 : ~std::uint32_t(0) << (32 - len);
    prefixes_.emplace_back(*ip & mask, mask);
}

bool RoutabilityTable::covered(std::uint32_t ip) const {
    for (const auto& [base, mask] : prefixes_) {
        if ((ip & mask) == base) return true;
    }
    return false;
}

bool RoutabilityTable::valid(std::uint32_t ip) const {
    return mode_ == Mode::allow ? covered(ip) : !covered(ip);
}

bool RoutabilityTable::valid(std::string_view dotted) const {
    auto ip = dns::parse_ipv4(dotted);
    return ip && valid(*ip);
}

Blocklist Blocklist::from_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("blocklist: cannot open " + file.string());
    Blocklist b;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos || line[begin] == '#') continue;
        std::size_t end = line.find_first_of(" \t\r#", begin);
        b.add(std::string_view(line).substr(begin, end == std::string::npos ? end : end - begin));
    }
    return b;
}

void Blocklist::add(std::string_view name) {
    entries_.insert(lower(name));
}

bool Blocklist::blocked(std::string_view name) const {
    std::string low = lower(name);
    std::string_view rest = low;
    while (true) {
        if (entries_.find(rest) != entries_.end()) return true;
        std::size_t dot = rest.find('.');
        if (dot == std::string_view::npos) return false;
        rest = rest.substr(dot + 1);
    }
}

TokenBucket::TokenBucket(double per_second)
    : rate_(per_second > 0 ? per_second : 1.0),
      capacity_(std::max(1.0, rate_)),
      tokens_(capacity_),
      last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
    for (;;) {
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto now = std::chrono::steady_clock::now();
            double elapsed = std::chrono::duration<double>(now - last_).count();
            last_ = now;
            tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
            if (tokens_ >= 1.0) {
                tokens_ -= 1.0;
                return;
            }
        }
        std::this_thread::sleep_for(std::chrono::duration<double>(0.5 / rate_));
    }
}

const char* to_string(Status s) {
    switch (s) {
    case Status::answered: return "answered";
    case Status::nxdomain: return "nxdomain";
    case Status::servfail: return "servfail";
    case Status::timeout: return "timeout";
    case Status::chain_capped: return "chain_capped";
    }
    return "unknown";
}

const char* to_string(Outcome o) {
    switch (o) {
    case Outcome::new_fqdn: return "new_fqdn";
    case Outcome::wildcard_zone: return "wildcard_zone";
    case Outcome::nonexistent: return "nonexistent";
    case Outcome::indeterminate: return "indeterminate";
    }
    return "unknown";
}

namespace {

struct ServerAddr {
    std::uint32_t ip = 0;
    std::uint16_t port = 53;
};

std::optional<ServerAddr> parse_server(std::string_view text) {
    ServerAddr addr;
    std::size_t colon = text.rfind(':');
    std::string_view host = text;
    if (colon != std::string_view::npos) {
        host = text.substr(0, colon);
        std::string_view port_part = text.substr(colon + 1);
        unsigned port = 0;
        auto [ptr, ec] = std::from_chars(port_part.data(), port_part.data() + port_part.size(), port);
        if (ec != std::errc() || ptr != port_part.data() + port_part.size() || port == 0 ||
            port > 65535) {
            return std::nullopt;
        }
        addr.port = static_cast<std::uint16_t>(port);
    }
    auto ip = dns::parse_ipv4(host);
    if (!ip) return std::nullopt;
    addr.ip = *ip;
    return addr;
}

/// One UDP exchange. Returns nullopt on timeout; sets fail_note and returns
/// nullopt on a transport error the caller should treat as servfail.
std::optional<dns::Message> exchange(const ServerAddr& server, BytesView query, int timeout_ms,
                                     std::uint16_t expect_id, bool& transport_error,
                                     std::string& fail_note) {
    transport_error = false;
    int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd < 0) {
        transport_error = true;
        fail_note = "socket creation failed";
        return std::nullopt;
    }
    sockaddr_in sin{};
    sin.sin_family = AF_INET;
    sin.sin_port = htons(server.port);
    sin.sin_addr.s_addr = htonl(server.ip);
    if (::sendto(fd, query.data(), query.size(), 0, reinterpret_cast<sockaddr*>(&sin),
                 sizeof sin) < 0) {
        ::close(fd);
        transport_error = true;
        fail_note = "send failed";
        return std::nullopt;
    }
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    for (;;) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) break;
        pollfd pfd{fd, POLLIN, 0};
        int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (ready < 0) {
            ::close(fd);
            transport_error = true;
            fail_note = "poll failed";
            return std::nullopt;
        }
        if (ready == 0) break;
        std::uint8_t buf[4096];
        ssize_t n = ::recvfrom(fd, buf, sizeof buf, 0, nullptr, nullptr);
        if (n <= 0) continue;
        try {
            dns::Message m = dns::parse_message(BytesView(buf, static_cast<std::size_t>(n)));
            if (m.id != expect_id || !m.qr) continue; // stray datagram; keep waiting
            ::close(fd);
            return m;
        } catch (const std::exception&) {
            continue; // malformed datagram; keep waiting for the real answer
        }
    }
    ::close(fd);
    return std::nullopt;
}

thread_local std::mt19937_64 tl_rng{std::random_device{}()};

} // namespace

ResolutionResult resolve(std::string_view name, const ResolverConfig& config,
                         const RoutabilityTable& table, TokenBucket* bucket) {
    ResolutionResult res;
    res.name = lower(name);

    std::vector<ServerAddr> servers;
    for (const auto& s : config.servers) {
        if (auto addr = parse_server(s)) servers.push_back(*addr);
    }
    if (servers.empty()) {
        res.status = Status::servfail;
        res.note = "no usable resolver address configured";
        return res;
    }

    std::set<std::string> seen{res.name};
    std::string target = res.name;
    std::size_t depth = 0;
    std::size_t attempt = 0; // round-robins the server list across queries

    while (true) {
        const std::string queried_target = target;
        if (bucket) bucket->acquire();
        std::uint16_t id = static_cast<std::uint16_t>(tl_rng());
        Bytes query = dns::encode_query(id, target, dns::kTypeA);

        std::optional<dns::Message> reply;
        bool transport_error = false;
        for (int tries = 0; tries <= config.retries; ++tries) {
            const ServerAddr& server = servers[attempt++ % servers.size()];
            reply = exchange(server, view(query), config.timeout_ms, id, transport_error, res.note);
            if (reply || transport_error) break;
            if (tries < config.retries) {
                // Jittered pause before the retry so synchronized timeouts
                // do not re-burst against the resolver.
                std::uniform_int_distribution<int> jitter(50, 250);
                std::this_thread::sleep_for(std::chrono::milliseconds(jitter(tl_rng)));
                if (bucket) bucket->acquire();
            }
        }
        if (transport_error) {
            res.status = Status::servfail;
            return res;
        }
        if (!reply) {
            res.status = Status::timeout;
            return res;
        }
        if (reply->rcode == dns::kRcodeNxdomain) {
            res.status = Status::nxdomain;
            return res;
        }
        if (reply->rcode != dns::kRcodeOk) {
            res.status = Status::servfail;
            res.note = "rcode " + std::to_string(reply->rcode);
            return res;
        }

        // Walk CNAMEs inside this response; a recursive resolver usually
        // flattens the whole chain into one answer section.
        bool progressed = true;
        while (progressed) {
            progressed = false;
            for (const auto& rr : reply->answers) {
                if (lower(rr.name) != target) continue;
                if (rr.type == dns::kTypeA) {
                    if (auto addr = dns::a_record_address(rr)) {
                        if (std::find(res.addresses.begin(), res.addresses.end(), *addr) ==
                            res.addresses.end()) {
                            res.addresses.push_back(*addr);
                        }
                    }
                } else if (rr.type == dns::kTypeCname && res.addresses.empty()) {
                    std::string next = lower(rr.rdata_name);
                    if (++depth > config.max_cname_depth || !seen.insert(next).second) {
                        res.status = Status::chain_capped;
                        res.note = depth > config.max_cname_depth ? "cname chain too long"
                                                                  : "cname loop";
                        return res;
                    }
                    res.cname_chain.push_back(next);
                    target = next;
                    progressed = true;
                    break;
                }
            }
            if (!res.addresses.empty()) break;
        }

        if (!res.addresses.empty()) {
            res.status = Status::answered;
            break;
        }
        if (target != queried_target) {
            continue; // the reply ended in an unresolved CNAME; query its tail
        }
        res.status = Status::answered; // rcode 0, no A records
        break;
    }

    for (const auto& addr : res.addresses) {
        if (table.valid(addr)) res.valid_addresses.push_back(addr);
    }
    return res;
}

Outcome judge(const names::CandidateFqdn& candidate, const ResolutionResult& test,
              const ResolutionResult& control) {
    if (test.name != candidate.test_name || control.name != candidate.control_name) {
        throw std::invalid_argument("judge: results do not belong to this candidate pair");
    }
    auto indeterminate = [](const ResolutionResult& r) {
        return r.status == Status::servfail || r.status == Status::timeout ||
               r.status == Status::chain_capped;
    };
    if (indeterminate(test) || indeterminate(control)) return Outcome::indeterminate;
    bool test_valid = test.answered_valid();
    bool control_valid = control.answered_valid();
    if (test_valid && !control_valid) return Outcome::new_fqdn;
    if (test_valid && control_valid) return Outcome::wildcard_zone;
    return Outcome::nonexistent;
}

RunResult run_pairs(std::span<const names::CandidateFqdn> candidates,
                    const ResolverConfig& config, const RoutabilityTable& table,
                    const Blocklist& blocklist) {
    RunResult result;
    std::vector<const names::CandidateFqdn*> work;
    for (const auto& c : candidates) {
        if (blocklist.blocked(c.test_name)) {
            result.skipped.push_back(c.test_name);
        } else {
            work.push_back(&c);
        }
    }

    result.verdicts.resize(work.size());
    TokenBucket bucket(config.qps);
    std::atomic<std::size_t> next{0};
    std::size_t pool = std::max<std::size_t>(1, std::min(config.workers, work.size()));

    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= work.size()) return;
            const names::CandidateFqdn& c = *work[i];
            Verdict v;
            v.candidate = c;
            v.test = resolve(c.test_name, config, table, &bucket);
            v.control = resolve(c.control_name, config, table, &bucket);
            v.outcome = judge(c, v.test, v.control);
            result.verdicts[i] = std::move(v);
        }
    };

    std::vector<std::thread> threads;
    for (std::size_t i = 0; i + 1 < pool; ++i) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    return result;
}

std::vector<std::string> diff_against_known(std::span<const Verdict> verdicts,
                                            const std::set<std::string>& known) {
    std::vector<std::string> out;
    for (const auto& v : verdicts) {
        if (v.outcome == Outcome::new_fqdn && !known.count(v.candidate.test_name)) {
            out.push_back(v.candidate.test_name);
        }
    }
    return out;
}

void write_verdicts_tsv(std::ostream& out, std::span<const Verdict> verdicts) {
    for (const auto& v : verdicts) {
        out << v.candidate.test_name << '\t' << to_string(v.outcome) << '\t';
        for (std::size_t i = 0; i < v.test.valid_addresses.size(); ++i) {
            if (i) out << ',';
            out << v.test.valid_addresses[i];
        }
        out << '\n';
    }
}

} // namespace ctkit::resolver
