#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ctkit/names.hpp"

namespace ctkit::phishing {

// Rule-driven flagging of names in the certificate stream that imitate
// well-known services. Matching runs over the full lowercase FQDN because
// impersonations embed the target brand in subdomain labels and registrable
// domains alike. Output is ranked candidates for human review, not verdicts.

struct Pattern {
    bool is_regex = false;
    std::string text;    // the substring, or the regex source
    std::regex compiled; // case-insensitive; empty for substring patterns
};

struct ServiceRule {
    std::string service;
    std::vector<Pattern> patterns;
    std::set<std::string> legit_bases; // registrable domains that are the real service
};

struct Finding {
    std::string fqdn;
    std::string service;
    std::string pattern; // the pattern text that matched
    std::string public_suffix;
};

/// Built-in rules for Apple, PayPal, Microsoft, Google, and eBay, plus a
/// small taxation-office set. Reconstructed from observed impersonation
/// shapes; treat as a starting point and tune via a rules file.
std::vector<ServiceRule> default_rules();

/// JSON: {"services": [{"service": ..., "patterns": [...], "legit_bases":
/// [...]}]}. A pattern is either a bare string (substring match) or an
/// object {"regex": ...} / {"substring": ...}. An invalid regex throws at
/// load time.
std::vector<ServiceRule> load_rules(std::istream& in);
std::vector<ServiceRule> load_rules_file(const std::filesystem::path& file);

/// Findings for every service whose patterns match the name. A name whose
/// base domain is in a rule's legit_bases never matches that rule,
/// regardless of patterns.
std::vector<Finding> match(const names::FqdnRecord& record, std::span<const ServiceRule> rules);

struct SuffixShare {
    std::string service;
    std::string suffix;
    std::uint64_t count = 0;
    double share = 0.0; // of that service's findings; sums to 1 per service
};

std::vector<SuffixShare> suffix_breakdown(std::span<const Finding> findings);

// CSV emitters.
void write_findings_csv(std::ostream& out, std::span<const Finding> findings);
void write_breakdown_csv(std::ostream& out, std::span<const SuffixShare> shares);

} // namespace ctkit::phishing
