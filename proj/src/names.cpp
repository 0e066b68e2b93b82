#include "ctkit/names.hpp"

#include <algorithm>
#include <ostream>

namespace ctkit::names {

std::optional<FqdnRecord> split(std::string_view fqdn, const psl::PublicSuffixSet& psl) {
    std::string suffix = psl.suffix_of(fqdn);
    if (suffix.empty() || suffix.size() >= fqdn.size()) return std::nullopt; // the name is a suffix

    FqdnRecord rec;
    rec.fqdn = std::string(fqdn);
    rec.public_suffix = suffix;

    std::string_view rest = fqdn.substr(0, fqdn.size() - suffix.size() - 1); // minus ".suffix"
    std::size_t last_dot = rest.rfind('.');
    std::string_view base_label =
        last_dot == std::string_view::npos ? rest : rest.substr(last_dot + 1);
    rec.base_domain = std::string(base_label) + "." + suffix;

    if (last_dot != std::string_view::npos) {
        std::string_view sub = rest.substr(0, last_dot);
        std::size_t pos = 0;
        while (true) {
            std::size_t dot = sub.find('.', pos);
            if (dot == std::string_view::npos) {
                rec.labels.emplace_back(sub.substr(pos));
                break;
            }
            rec.labels.emplace_back(sub.substr(pos, dot - pos));
            pos = dot + 1;
        }
    }
    return rec;
}

std::string reassemble(const FqdnRecord& record) {
    std::string out;
    for (const auto& label : record.labels) {
        out += label;
        out += '.';
    }
    out += record.base_domain;
    return out;
}

std::uint64_t LabelStats::label_total(std::string_view label) const {
    auto it = per_label.find(std::string(label));
    if (it == per_label.end()) return 0;
    std::uint64_t total = 0;
    for (const auto& [suffix, n] : it->second) total += n;
    return total;
}

void LabelStats::merge(const LabelStats& other) {
    for (const auto& [label, suffixes] : other.per_label) {
        auto& mine = per_label[label];
        for (const auto& [suffix, n] : suffixes) mine[suffix] += n;
    }
}

LabelStats label_stats(std::span<const FqdnRecord> records) {
    LabelStats stats;
    for (const auto& rec : records) {
        for (const auto& label : rec.labels) {
            stats.per_label[label][rec.public_suffix] += 1;
        }
    }
    return stats;
}

std::map<std::string, std::string> top_label_per_suffix(const LabelStats& stats) {
    // suffix -> (count, label); lexicographically smaller label wins ties,
    // which iterating labels in map order gives us with a strict '>'.
    std::map<std::string, std::pair<std::uint64_t, std::string>> best;
    for (const auto& [label, suffixes] : stats.per_label) {
        for (const auto& [suffix, n] : suffixes) {
            auto it = best.find(suffix);
            if (it == best.end() || n > it->second.first) {
                best[suffix] = {n, label};
            }
        }
    }
    std::map<std::string, std::string> out;
    for (const auto& [suffix, top] : best) out[suffix] = top.second;
    return out;
}

std::string random_label(std::mt19937_64& rng, std::size_t length) {
    static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::uniform_int_distribution<std::size_t> pick(0, sizeof(kAlphabet) - 2);
    std::string out;
    out.reserve(length);
    for (std::size_t i = 0; i < length; ++i) out.push_back(kAlphabet[pick(rng)]);
    return out;
}

std::vector<CandidateFqdn> construct_candidates(const LabelStats& stats,
                                                std::span<const std::string> domain_list,
                                                const std::set<std::string>& observed_fqdns,
                                                const psl::PublicSuffixSet& psl,
                                                const CandidateConfig& config,
                                                std::optional<std::uint64_t> seed) {
    std::mt19937_64 rng(seed ? *seed : std::random_device{}());

    // Group the domain list by suffix once; candidate order then follows
    // label order, suffix rank, and domain-list order, so a fixed seed
    // reproduces the exact output.
    std::map<std::string, std::vector<const std::string*>> domains_by_suffix;
    for (const auto& domain : domain_list) {
        domains_by_suffix[psl.suffix_of(domain)].push_back(&domain);
    }

    std::vector<CandidateFqdn> out;
    for (const auto& [label, suffixes] : stats.per_label) {
        std::uint64_t total = 0;
        for (const auto& [suffix, n] : suffixes) total += n;
        if (total < config.min_label_count) continue;

        std::vector<std::pair<std::uint64_t, std::string>> ranked;
        for (const auto& [suffix, n] : suffixes) {
            if (config.excluded_suffixes.count(suffix)) continue;
            ranked.emplace_back(n, suffix);
        }
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        if (ranked.size() > config.top_suffixes_per_label) {
            ranked.resize(config.top_suffixes_per_label);
        }

        for (const auto& [n, suffix] : ranked) {
            auto it = domains_by_suffix.find(suffix);
            if (it == domains_by_suffix.end()) continue;
            for (const std::string* domain : it->second) {
                std::string test = label + "." + *domain;
                if (observed_fqdns.count(test)) continue;
                CandidateFqdn c;
                c.test_name = std::move(test);
                c.control_name = random_label(rng, 16) + "." + *domain;
                c.label = label;
                c.base_domain = *domain;
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

void write_candidates_tsv(std::ostream& out, std::span<const CandidateFqdn> candidates) {
    for (const auto& c : candidates) {
        out << c.test_name << '\t' << c.control_name << '\n';
    }
}

} // namespace ctkit::names
