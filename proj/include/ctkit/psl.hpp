#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>

namespace ctkit::psl {

// Public Suffix List in its standard text format: one rule per line,
// "//" comments, "*." wildcard rules, "!" exception rules. Matching follows
// the published algorithm — longest match wins, exception rules override
// wildcards, and the implicit "*" rule makes the rightmost label a suffix
// when nothing else matches. Rule order in the file never affects results.

class PublicSuffixSet {
public:
    static PublicSuffixSet from_stream(std::istream& in);
    static PublicSuffixSet from_file(const std::filesystem::path& file); // throws on I/O failure

    /// One PSL line; comments and blanks are ignored.
    void add_rule(std::string_view line);

    /// The public suffix of a lowercase dotted name (never empty: the
    /// implicit "*" rule matches the rightmost label).
    std::string suffix_of(std::string_view fqdn) const;

    /// True when the name as a whole is a public suffix, i.e. there is no
    /// registrable domain beneath it.
    bool is_suffix(std::string_view fqdn) const;

    std::size_t rule_count() const { return exact_.size() + wildcard_.size() + exception_.size(); }

private:
    std::set<std::string, std::less<>> exact_;     // "co.uk"
    std::set<std::string, std::less<>> wildcard_;  // "ck" for a "*.ck" rule
    std::set<std::string, std::less<>> exception_; // "www.ck" for a "!www.ck" rule
};

} // namespace ctkit::psl
