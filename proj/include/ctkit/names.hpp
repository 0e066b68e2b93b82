#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctkit/psl.hpp"

namespace ctkit::names {

// Public-suffix-aware decomposition of certificate names, subdomain-label
// statistics, and construction of candidate FQDNs with paired random
// controls for existence probing.

struct FqdnRecord {
    std::string fqdn;
    std::string public_suffix;
    std::string base_domain;         // registrable domain: one label beneath the suffix
    std::vector<std::string> labels; // subdomain labels, leftmost first
};

/// Decompose an FQDN against the suffix set. Returns nullopt when the name
/// is itself a public suffix (no registrable domain) — callers exclude such
/// names from statistics. Reassembling the record reproduces the input.
std::optional<FqdnRecord> split(std::string_view fqdn, const psl::PublicSuffixSet& psl);

/// join(labels) + "." + base_domain (or base_domain alone); inverse of split.
std::string reassemble(const FqdnRecord& record);

struct LabelStats {
    /// label -> public suffix -> occurrence count. Every label of a
    /// multi-label subdomain counts once per FQDN position; feed one record
    /// per unique FQDN to count names once regardless of how many
    /// certificates carry them.
    std::map<std::string, std::map<std::string, std::uint64_t>> per_label;

    std::uint64_t label_total(std::string_view label) const;
    void merge(const LabelStats& other); // associative, for parallel tallies
};

LabelStats label_stats(std::span<const FqdnRecord> records);

/// Most common subdomain label for each suffix; ties go to the
/// lexicographically smaller label.
std::map<std::string, std::string> top_label_per_suffix(const LabelStats& stats);

struct CandidateConfig {
    std::uint64_t min_label_count = 100000; // drop labels rarer than this across the data set
    std::size_t top_suffixes_per_label = 10;
    std::set<std::string> excluded_suffixes = {"com", "net", "org"};
};

struct CandidateFqdn {
    std::string test_name;
    std::string control_name; // same zone, leftmost label replaced by a random string
    std::string label;
    std::string base_domain;
};

/// `length` characters drawn from a-z0-9.
std::string random_label(std::mt19937_64& rng, std::size_t length);

/// For every label with at least min_label_count total occurrences: rank its
/// suffixes by per-(suffix,label) count (excluded suffixes dropped first),
/// keep the top K, and prepend the label to each domain-list entry under
/// those suffixes. Names already observed in CT are skipped. Each candidate
/// pairs with a control whose leftmost label is 16 random characters.
/// Pass a seed for reproducible controls; nullopt draws fresh entropy.
std::vector<CandidateFqdn> construct_candidates(const LabelStats& stats,
                                                std::span<const std::string> domain_list,
                                                const std::set<std::string>& observed_fqdns,
                                                const psl::PublicSuffixSet& psl,
                                                const CandidateConfig& config,
                                                std::optional<std::uint64_t> seed = std::nullopt);

/// TSV, one candidate per line: test_name<TAB>control_name.
void write_candidates_tsv(std::ostream& out, std::span<const CandidateFqdn> candidates);

} // namespace ctkit::names
