#include "ctkit/growth.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <charconv>
#include <ctime>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace ctkit::growth {

namespace {

bool space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::int64_t civil_to_day(int y, int m, int d) {
    // Howard Hinnant's days_from_civil; valid far beyond certificate lifetimes.
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void day_to_civil(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y = static_cast<int>(yr + (m <= 2));
}

int parse_int(std::string_view text, const char* what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw std::invalid_argument(std::string("window: bad ") + what + " in \"" +
                                    std::string(text) + "\"");
    }
    return value;
}

std::int64_t parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw std::invalid_argument("window: expected YYYY-MM-DD, got \"" + std::string(text) + "\"");
    }
    int y = parse_int(text.substr(0, 4), "year");
    int m = parse_int(text.substr(5, 2), "month");
    int d = parse_int(text.substr(8, 2), "day");
    if (m < 1 || m > 12 || d < 1 || d > 31) {
        throw std::invalid_argument("window: out-of-range date \"" + std::string(text) + "\"");
    }
    return civil_to_day(y, m, d);
}

} // namespace

std::string normalize_ca(std::string_view issuer) {
    std::size_t b = 0;
    std::size_t e = issuer.size();
    while (b < e && space(issuer[b])) ++b;
    while (e > b && space(issuer[e - 1])) --e;
    std::string out;
    out.reserve(e - b);
    for (std::size_t i = b; i < e; ++i) {
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(issuer[i]))));
    }
    if (out.empty()) return "(unknown)";
    return out;
}

std::string ca_key(std::string_view issuer, const AliasMap& aliases) {
    std::string norm = normalize_ca(issuer);
    auto it = aliases.find(norm);
    return it == aliases.end() ? norm : it->second;
}

AliasMap load_alias_map(std::istream& in) {
    nlohmann::json doc = nlohmann::json::parse(in);
    if (!doc.is_object()) throw std::runtime_error("alias map: top level must be an object");
    AliasMap out;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!it.value().is_string()) throw std::runtime_error("alias map: values must be strings");
        out[normalize_ca(it.key())] = it.value().get<std::string>();
    }
    return out;
}

std::int64_t day_of_ms(std::uint64_t timestamp_ms) {
    // Floor division keeps pre-1970 timestamps on the right day.
    std::int64_t s = static_cast<std::int64_t>(timestamp_ms / 1000);
    return s >= 0 ? s / 86400 : (s - 86399) / 86400;
}

std::string format_day(std::int64_t day) {
    int y;
    unsigned m, d;
    day_to_civil(day, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
    return buf;
}

DateWindow parse_window(std::string_view text) {
    if (auto sep = text.find(".."); sep != std::string_view::npos) {
        DateWindow w;
        w.first_day = parse_date(text.substr(0, sep));
        w.last_day = parse_date(text.substr(sep + 2));
        if (w.first_day > w.last_day) throw std::invalid_argument("window: range is inverted");
        return w;
    }
    if (text.size() == 7 && text[4] == '-') {
        int y = parse_int(text.substr(0, 4), "year");
        int m = parse_int(text.substr(5, 2), "month");
        if (m < 1 || m > 12) throw std::invalid_argument("window: month out of range");
        DateWindow w;
        w.first_day = civil_to_day(y, m, 1);
        w.last_day = (m == 12 ? civil_to_day(y + 1, 1, 1) : civil_to_day(y, m + 1, 1)) - 1;
        return w;
    }
    throw std::invalid_argument("window: expected YYYY-MM or YYYY-MM-DD..YYYY-MM-DD, got \"" +
                                std::string(text) + "\"");
}

std::vector<GrowthSeries> cumulative_growth(std::span<const Entry> entries, const AliasMap& aliases,
                                            std::size_t top_n) {
    std::map<std::string, std::map<std::int64_t, std::uint64_t>> per_ca_day;
    for (const auto& e : entries) {
        if (!e.precert) continue;
        per_ca_day[ca_key(e.issuer, aliases)][day_of_ms(e.timestamp_ms)] += 1;
    }

    std::vector<std::pair<std::uint64_t, std::string>> totals;
    for (const auto& [ca, days] : per_ca_day) {
        std::uint64_t total = 0;
        for (const auto& [day, n] : days) total += n;
        totals.emplace_back(total, ca);
    }
    std::sort(totals.begin(), totals.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    std::map<std::int64_t, std::uint64_t> other_days;
    std::vector<std::pair<std::string, const std::map<std::int64_t, std::uint64_t>*>> kept;
    for (std::size_t i = 0; i < totals.size(); ++i) {
        const auto& ca = totals[i].second;
        if (i < top_n) {
            kept.emplace_back(ca, &per_ca_day[ca]);
        } else {
            for (const auto& [day, n] : per_ca_day[ca]) other_days[day] += n;
        }
    }

    std::vector<GrowthSeries> out;
    auto emit = [&out](const std::string& ca, const std::map<std::int64_t, std::uint64_t>& days) {
        GrowthSeries s;
        s.ca = ca;
        std::uint64_t running = 0;
        for (const auto& [day, n] : days) {
            running += n;
            s.points.push_back({format_day(day), running});
        }
        out.push_back(std::move(s));
    };
    for (const auto& [ca, days] : kept) emit(ca, *days);
    if (!other_days.empty()) emit("other", other_days);
    return out;
}

std::vector<RatePoint> daily_rates(std::span<const Entry> entries, const AliasMap& aliases) {
    std::map<std::int64_t, std::map<std::string, std::uint64_t>> per_day_ca;
    for (const auto& e : entries) {
        if (!e.precert) continue;
        per_day_ca[day_of_ms(e.timestamp_ms)][ca_key(e.issuer, aliases)] += 1;
    }
    std::vector<RatePoint> out;
    for (const auto& [day, cas] : per_day_ca) {
        std::uint64_t total = 0;
        for (const auto& [ca, n] : cas) total += n;
        std::string date = format_day(day);
        for (const auto& [ca, n] : cas) {
            out.push_back({date, ca, static_cast<double>(n) / static_cast<double>(total)});
        }
    }
    return out;
}

std::vector<MatrixCell> ca_log_matrix(std::span<const Entry> entries, const AliasMap& aliases,
                                      const DateWindow& window) {
    std::map<std::pair<std::string, std::string>, std::uint64_t> cells;
    for (const auto& e : entries) {
        if (!e.precert || !window.contains(day_of_ms(e.timestamp_ms))) continue;
        cells[{ca_key(e.issuer, aliases), e.log}] += 1;
    }
    std::vector<MatrixCell> out;
    out.reserve(cells.size());
    for (const auto& [key, n] : cells) out.push_back({key.first, key.second, n});
    return out;
}

std::string csv_field(std::string_view raw) {
    if (raw.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(raw);
    std::string quoted = "\"";
    for (char c : raw) {
        if (c == '"') quoted += "\"\"";
        else quoted.push_back(c);
    }
    quoted += '"';
    return quoted;
}

void write_growth_csv(std::ostream& out, const std::vector<GrowthSeries>& series) {
    out << "date,ca,cumulative\n";
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            out << p.date << ',' << csv_field(s.ca) << ',' << p.cumulative << '\n';
        }
    }
}

void write_rates_csv(std::ostream& out, const std::vector<RatePoint>& rates) {
    out << "date,ca,share\n";
    char buf[32];
    for (const auto& r : rates) {
        std::snprintf(buf, sizeof buf, "%.9f", r.share);
        out << r.date << ',' << csv_field(r.ca) << ',' << buf << '\n';
    }
}

void write_matrix_csv(std::ostream& out, const std::vector<MatrixCell>& cells) {
    out << "ca,log,count\n";
    for (const auto& c : cells) {
        out << csv_field(c.ca) << ',' << csv_field(c.log) << ',' << c.count << '\n';
    }
}

} // namespace ctkit::growth
