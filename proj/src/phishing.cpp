#include "ctkit/phishing.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "ctkit/growth.hpp" // csv_field

namespace ctkit::phishing {

namespace {

std::string lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

Pattern substring_pattern(std::string text) {
    Pattern p;
    p.is_regex = false;
    p.text = lower(text);
    return p;
}

Pattern regex_pattern(const std::string& text) {
    Pattern p;
    p.is_regex = true;
    p.text = text;
    try {
        p.compiled = std::regex(text, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
        throw std::runtime_error("phishing: invalid regex \"" + text + "\": " + e.what());
    }
    return p;
}

ServiceRule rule(std::string service, std::vector<Pattern> patterns,
                 std::set<std::string> legit) {
    ServiceRule r;
    r.service = std::move(service);
    r.patterns = std::move(patterns);
    r.legit_bases = std::move(legit);
    return r;
}

} // namespace

std::vector<ServiceRule> default_rules() {
    std::vector<ServiceRule> rules;
    rules.push_back(rule("Apple", {substring_pattern("apple"), substring_pattern("icloud")},
                         {"apple.com", "icloud.com", "apple.co.uk", "applepay.com"}));
    rules.push_back(rule("PayPal", {substring_pattern("paypal")},
                         {"paypal.com", "paypal.me", "paypal-prepaid.com"}));
    rules.push_back(rule("Microsoft",
                         {substring_pattern("microsoft"), substring_pattern("hotmail"),
                          substring_pattern("outlook"), substring_pattern("office365"),
                          regex_pattern("(^|[.-])live([.-]|$)")},
                         {"microsoft.com", "hotmail.com", "outlook.com", "live.com",
                          "office365.com", "office.com", "microsoftonline.com"}));
    rules.push_back(rule("Google",
                         {substring_pattern("google"), substring_pattern("gmail")},
                         {"google.com", "gmail.com", "googleapis.com", "google.co.uk",
                          "googleusercontent.com", "withgoogle.com"}));
    rules.push_back(rule("eBay", {substring_pattern("ebay")},
                         {"ebay.com", "ebay.co.uk", "ebay.de", "ebayinc.com"}));
    // Taxation offices: agencies phished for refund fraud.
    rules.push_back(rule("IRS", {substring_pattern("irs.gov"), regex_pattern("(^|[.-])irs[.-]")},
                         {"irs.gov"}));
    rules.push_back(rule("HMRC", {substring_pattern("hmrc")}, {"hmrc.gov.uk", "gov.uk"}));
    rules.push_back(
        rule("ATO", {substring_pattern("ato.gov.au"), substring_pattern("mygov")},
             {"ato.gov.au", "my.gov.au", "mygov.au"}));
    return rules;
}

std::vector<ServiceRule> load_rules(std::istream& in) {
    nlohmann::json doc = nlohmann::json::parse(in);
    if (!doc.is_object() || !doc.contains("services") || !doc["services"].is_array()) {
        throw std::runtime_error("phishing: rules file needs a \"services\" array");
    }
    std::vector<ServiceRule> rules;
    for (const auto& svc : doc["services"]) {
        ServiceRule r;
        r.service = svc.at("service").get<std::string>();
        for (const auto& pat : svc.at("patterns")) {
            if (pat.is_string()) {
                r.patterns.push_back(substring_pattern(pat.get<std::string>()));
            } else if (pat.is_object() && pat.contains("regex")) {
                r.patterns.push_back(regex_pattern(pat["regex"].get<std::string>()));
            } else if (pat.is_object() && pat.contains("substring")) {
                r.patterns.push_back(substring_pattern(pat["substring"].get<std::string>()));
            } else {
                throw std::runtime_error("phishing: pattern must be a string or an object with "
                                         "\"regex\" or \"substring\"");
            }
        }
        if (r.patterns.empty()) {
            throw std::runtime_error("phishing: service \"" + r.service + "\" has no patterns");
        }
        if (svc.contains("legit_bases")) {
            for (const auto& base : svc["legit_bases"]) {
                r.legit_bases.insert(lower(base.get<std::string>()));
            }
        }
        rules.push_back(std::move(r));
    }
    return rules;
}

std::vector<ServiceRule> load_rules_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("phishing: cannot open " + file.string());
    return load_rules(in);
}

std::vector<Finding> match(const names::FqdnRecord& record, std::span<const ServiceRule> rules) {
    std::string name = lower(record.fqdn);
    std::string base = lower(record.base_domain);
    std::vector<Finding> out;
    for (const auto& r : rules) {
        if (r.legit_bases.count(base)) continue; // the real service, not an imitation
        for (const auto& p : r.patterns) {
            bool hit = p.is_regex ? std::regex_search(name, p.compiled)
                                  : name.find(p.text) != std::string::npos;
            if (hit) {
                out.push_back({record.fqdn, r.service, p.text, record.public_suffix});
                break; // one finding per service; first matching pattern wins
            }
        }
    }
    return out;
}

std::vector<SuffixShare> suffix_breakdown(std::span<const Finding> findings) {
    std::map<std::string, std::map<std::string, std::uint64_t>> per_service;
    for (const auto& f : findings) per_service[f.service][f.public_suffix] += 1;
    std::vector<SuffixShare> out;
    for (const auto& [service, suffixes] : per_service) {
        std::uint64_t total = 0;
        for (const auto& [suffix, n] : suffixes) total += n;
        for (const auto& [suffix, n] : suffixes) {
            out.push_back({service, suffix, n,
                           static_cast<double>(n) / static_cast<double>(total)});
        }
    }
    return out;
}

void write_findings_csv(std::ostream& out, std::span<const Finding> findings) {
    out << "fqdn,service,pattern,suffix\n";
    for (const auto& f : findings) {
        out << growth::csv_field(f.fqdn) << ',' << growth::csv_field(f.service) << ','
            << growth::csv_field(f.pattern) << ',' << growth::csv_field(f.public_suffix) << '\n';
    }
}

void write_breakdown_csv(std::ostream& out, std::span<const SuffixShare> shares) {
    out << "service,suffix,count,share\n";
    char buf[32];
    for (const auto& s : shares) {
        std::snprintf(buf, sizeof buf, "%.9f", s.share);
        out << growth::csv_field(s.service) << ',' << growth::csv_field(s.suffix) << ','
            << s.count << ',' << buf << '\n';
    }
}

} // namespace ctkit::phishing
