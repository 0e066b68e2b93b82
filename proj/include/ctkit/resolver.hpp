#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctkit/names.hpp"

namespace ctkit::resolver {

// Existence probing for candidate/control name pairs: A-record resolution
// with CNAME chasing, routability filtering of answers, rate limiting, and
// the pairwise judgment that separates real subdomains from wildcard zones.

/// Prefix filter deciding which answer addresses count. In allow mode an
/// address is valid only when some prefix covers it (a border router's view
/// of the routable space); in deny mode every address is valid unless a
/// prefix covers it (a bogon/special-purpose exclusion list, the shipped
/// default). Shrinking an allow table can only shrink the valid set, keeping
/// discovered-name counts lower bounds.
class RoutabilityTable {
public:
    enum class Mode { allow, deny };

    RoutabilityTable() : mode_(Mode::deny) {} // empty deny list: everything valid

    static RoutabilityTable from_lines(std::span<const std::string> cidrs, Mode mode);
    static RoutabilityTable from_file(const std::filesystem::path& file, Mode mode);

    /// Throws std::invalid_argument on a malformed CIDR.
    void add_prefix(std::string_view cidr);

    bool valid(std::uint32_t ip) const; // host byte order
    bool valid(std::string_view dotted) const;

    Mode mode() const { return mode_; }
    std::size_t prefix_count() const { return prefixes_.size(); }

private:
    bool covered(std::uint32_t ip) const;

    Mode mode_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> prefixes_; // (base, mask)
};

/// Names we must not query: exact matches and anything beneath a listed
/// domain. One name per line, '#' comments.
class Blocklist {
public:
    Blocklist() = default;
    static Blocklist from_file(const std::filesystem::path& file);

    void add(std::string_view name);
    bool blocked(std::string_view name) const;
    std::size_t size() const { return entries_.size(); }

private:
    std::set<std::string, std::less<>> entries_;
};

/// Global queries-per-second cap shared across worker threads.
class TokenBucket {
public:
    explicit TokenBucket(double per_second);

    /// Blocks until a token is available.
    void acquire();

private:
    std::mutex mu_;
    double rate_;
    double capacity_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
};

struct ResolverConfig {
    std::vector<std::string> servers; // "ip" or "ip:port"; tried round-robin
    int timeout_ms = 2000;
    int retries = 2; // extra attempts on timeout, with jittered delay
    double qps = 100.0;
    std::size_t workers = 8;
    std::size_t max_cname_depth = 10;
};

enum class Status {
    answered,
    nxdomain,
    servfail,
    timeout,
    chain_capped, // CNAME indirection exceeded max_cname_depth or looped
};

const char* to_string(Status s);

struct ResolutionResult {
    std::string name;
    Status status = Status::timeout;
    std::vector<std::string> addresses;       // every A answer seen
    std::vector<std::string> cname_chain;     // targets followed, in order
    std::vector<std::string> valid_addresses; // subset passing the routability filter
    std::string note;                         // transport detail when something went sideways

    bool answered_valid() const {
        return status == Status::answered && !valid_addresses.empty();
    }
};

/// A-record lookup with CNAME chasing. Network failures land in status and
/// note; this never throws for network reasons. Pass a bucket to rate-limit.
ResolutionResult resolve(std::string_view name, const ResolverConfig& config,
                         const RoutabilityTable& table, TokenBucket* bucket = nullptr);

enum class Outcome { new_fqdn, wildcard_zone, nonexistent, indeterminate };

const char* to_string(Outcome o);

/// Pairwise judgment. Indeterminate statuses (servfail, timeout, chain cap)
/// on either side win first; then: test valid and control invalid means a
/// real subdomain, both valid means the zone wildcards, test invalid means
/// the name does not exist. Throws std::invalid_argument when the results do
/// not belong to the candidate.
Outcome judge(const names::CandidateFqdn& candidate, const ResolutionResult& test,
              const ResolutionResult& control);

struct Verdict {
    names::CandidateFqdn candidate;
    Outcome outcome = Outcome::indeterminate;
    ResolutionResult test;
    ResolutionResult control;
};

struct RunResult {
    std::vector<Verdict> verdicts;         // in candidate order
    std::vector<std::string> skipped;      // blocklisted test names, never queried
};

/// Resolve every pair with a bounded worker pool; both halves of a pair stay
/// on one worker so pairing is by candidate identity, not arrival order.
RunResult run_pairs(std::span<const names::CandidateFqdn> candidates,
                    const ResolverConfig& config, const RoutabilityTable& table,
                    const Blocklist& blocklist);

/// new_fqdn verdicts whose test name is not on the known list.
std::vector<std::string> diff_against_known(std::span<const Verdict> verdicts,
                                            const std::set<std::string>& known);

/// TSV: name<TAB>outcome<TAB>comma-joined valid addresses.
void write_verdicts_tsv(std::ostream& out, std::span<const Verdict> verdicts);

} // namespace ctkit::resolver
