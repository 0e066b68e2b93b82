#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctkit/bytes.hpp"
#include "ctkit/leaf.hpp"
#include "ctkit/merkle.hpp"

namespace ctkit::store {

// Append-only per-log archive: one JSON line per entry carrying the raw
// leaf/extra bytes plus the certificate fingerprint, and a sidecar with the
// newest verified tree head so monotonicity survives across runs.

struct StoredEntry {
    ctlog::Entry entry;
    Hash fingerprint{}; // digest of the extracted certificate DER
    bool parse_ok = false;
};

struct Stats {
    std::uint64_t entries = 0;
    std::uint64_t bytes = 0;
    std::optional<std::uint64_t> high_water; // highest contiguous index
    std::uint64_t x509_entries = 0;
    std::uint64_t precert_entries = 0;
    std::uint64_t undecodable = 0;
    std::uint64_t distinct_certificates = 0;
};

class EntryStore {
public:
    explicit EntryStore(std::filesystem::path dir);

    /// File-system-safe name for a log: lowercased, every byte outside
    /// [a-z0-9._-] becomes '_', scheme prefixes dropped.
    static std::string sanitize_log_name(std::string_view log);

    /// Highest contiguous stored index, nullopt when nothing is stored.
    /// Opening a log scans it once and truncates a torn tail in place.
    std::optional<std::uint64_t> high_water(const std::string& log);

    /// Append entries in index order and return how many were newly
    /// committed. Indexes at or below the high-water mark are skipped so
    /// replays are idempotent; an index gap throws.
    std::uint64_t append(const std::string& log, std::span<const ctlog::Entry> entries);

    /// Stream every stored entry in index order; integrity-checks each line.
    void for_each(const std::string& log,
                  const std::function<void(const StoredEntry&)>& fn);

    /// Stream indexes [first, last); throws when the range reaches beyond
    /// the stored prefix.
    void scan(const std::string& log, std::uint64_t first, std::uint64_t last,
              const std::function<void(const StoredEntry&)>& fn);

    /// Leaf hashes for the first `upto` entries (everything when nullopt).
    std::vector<Hash> leaf_hashes(const std::string& log,
                                  std::optional<std::uint64_t> upto = std::nullopt);

    std::vector<std::string> logs() const;
    Stats stats(const std::string& log);

    std::optional<merkle::TreeHead> load_tree_head(const std::string& log) const;
    void save_tree_head(const std::string& log, const merkle::TreeHead& head);

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path entries_path(const std::string& log) const;
    std::filesystem::path head_path(const std::string& log) const;
    void open_scan(const std::string& log);

    std::filesystem::path dir_;
    // per-log high-water cache; nullopt means "present but empty"
    std::unordered_map<std::string, std::optional<std::uint64_t>> hwm_;
};

} // namespace ctkit::store
