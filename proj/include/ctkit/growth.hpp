#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctkit::growth {

// Log-evolution tallies over stored entries: per-CA cumulative precertificate
// growth, per-CA daily shares, and the CA x log distribution matrix. All
// three count precertificates only and bucket dates by the leaf timestamp
// in UTC.

/// The slice of a stored entry the tallies need.
struct Entry {
    std::string log;                // log name the entry came from
    std::uint64_t timestamp_ms = 0; // leaf timestamp
    bool precert = false;
    std::string issuer; // issuer Organization (CN when the DN has no O)
};

/// Issuer spellings that should merge into one CA, keyed by their normalized
/// form. Values are the canonical CA name.
using AliasMap = std::map<std::string, std::string>;

/// Lowercased, whitespace-trimmed issuer string; empty input maps to
/// "(unknown)" so every entry lands in some row.
std::string normalize_ca(std::string_view issuer);

/// normalize_ca plus alias substitution.
std::string ca_key(std::string_view issuer, const AliasMap& aliases);

/// JSON object of {"alias": "canonical", ...}; keys are normalized on load.
AliasMap load_alias_map(std::istream& in);

/// Days since the Unix epoch for a millisecond timestamp, UTC.
std::int64_t day_of_ms(std::uint64_t timestamp_ms);

/// "YYYY-MM-DD" for a day number.
std::string format_day(std::int64_t day);

/// Inclusive day range. Accepts "YYYY-MM" (whole month) and
/// "YYYY-MM-DD..YYYY-MM-DD"; throws std::invalid_argument otherwise.
struct DateWindow {
    std::int64_t first_day = 0;
    std::int64_t last_day = 0;

    bool contains(std::int64_t day) const { return day >= first_day && day <= last_day; }
};

DateWindow parse_window(std::string_view text);

struct GrowthPoint {
    std::string date; // YYYY-MM-DD
    std::uint64_t cumulative = 0;
};

struct GrowthSeries {
    std::string ca;
    std::vector<GrowthPoint> points; // dates strictly increasing, counts non-decreasing
};

/// One series per CA among the top_n by total precert count; everything else
/// merges into an "other" series. Sorted by total, descending.
std::vector<GrowthSeries> cumulative_growth(std::span<const Entry> entries, const AliasMap& aliases,
                                            std::size_t top_n = 10);

struct RatePoint {
    std::string date;
    std::string ca;
    double share = 0.0;
};

/// Per-day share of precert entries per CA; for every day that has entries
/// the shares sum to 1. Ordered by date, then CA.
std::vector<RatePoint> daily_rates(std::span<const Entry> entries, const AliasMap& aliases);

struct MatrixCell {
    std::string ca;
    std::string log;
    std::uint64_t count = 0;
};

/// Precert counts per (CA, log) within the window; only nonzero cells are
/// emitted, ordered by CA, then log.
std::vector<MatrixCell> ca_log_matrix(std::span<const Entry> entries, const AliasMap& aliases,
                                      const DateWindow& window);

// CSV emitters (header row + quoted fields where needed).
void write_growth_csv(std::ostream& out, const std::vector<GrowthSeries>& series);
void write_rates_csv(std::ostream& out, const std::vector<RatePoint>& rates);
void write_matrix_csv(std::ostream& out, const std::vector<MatrixCell>& cells);

/// Quote a CSV field when it contains a comma, quote, or newline.
std::string csv_field(std::string_view raw);

} // namespace ctkit::growth
