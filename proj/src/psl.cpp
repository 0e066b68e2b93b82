#include "ctkit/psl.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ctkit::psl {

namespace {

std::string lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

/// The suffix of `name` starting at label position `i` (0 = whole name).
std::string_view tail_at(std::string_view name, std::size_t skip_labels) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < skip_labels; ++i) {
        std::size_t dot = name.find('.', pos);
        if (dot == std::string_view::npos) return {};
        pos = dot + 1;
    }
    return name.substr(pos);
}

std::size_t label_count(std::string_view name) {
    if (name.empty()) return 0;
    std::size_t n = 1;
    for (char c : name) {
        if (c == '.') ++n;
    }
    return n;
}

} // namespace

PublicSuffixSet PublicSuffixSet::from_stream(std::istream& in) {
    PublicSuffixSet set;
    std::string line;
    while (std::getline(in, line)) set.add_rule(line);
    return set;
}

PublicSuffixSet PublicSuffixSet::from_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("psl: cannot open " + file.string());
    return from_stream(in);
}

void PublicSuffixSet::add_rule(std::string_view line) {
    // The list format takes only the first whitespace-delimited token.
    std::size_t begin = line.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return;
    std::size_t end = line.find_first_of(" \t\r\n", begin);
    std::string_view rule = line.substr(begin, end == std::string_view::npos ? end : end - begin);
    if (rule.empty() || rule.substr(0, 2) == "//") return;

    if (rule.front() == '!') {
        exception_.insert(lower(rule.substr(1)));
    } else if (rule.substr(0, 2) == "*.") {
        wildcard_.insert(lower(rule.substr(2)));
    } else if (rule == "*") {
        // The implicit default rule; always in effect.
    } else {
        exact_.insert(lower(rule));
    }
}

std::string PublicSuffixSet::suffix_of(std::string_view fqdn) const {
    std::size_t n = label_count(fqdn);
    if (n == 0) return {};

    // An exception rule overrides everything: its match minus the leftmost
    // label is the suffix.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::string_view tail = tail_at(fqdn, i);
        if (exception_.find(tail) != exception_.end()) {
            return std::string(tail_at(fqdn, i + 1));
        }
    }

    // Longest explicit match, scanning from the whole name down; a wildcard
    // rule "*.x" matches any "<label>.x".
    for (std::size_t i = 0; i < n; ++i) {
        std::string_view tail = tail_at(fqdn, i);
        if (exact_.find(tail) != exact_.end()) return std::string(tail);
        if (i + 1 < n && wildcard_.find(tail_at(fqdn, i + 1)) != wildcard_.end()) {
            return std::string(tail);
        }
        // A "*.x" rule also makes bare "x" behave as a suffix: "x" has no
        // registrable domain beneath the rule's reach.
        if (i + 1 == n && wildcard_.find(tail) != wildcard_.end()) return std::string(tail);
    }

    // Implicit "*" rule: the rightmost label.
    return std::string(tail_at(fqdn, n - 1));
}

bool PublicSuffixSet::is_suffix(std::string_view fqdn) const {
    return !fqdn.empty() && suffix_of(fqdn) == fqdn;
}

} // namespace ctkit::psl
