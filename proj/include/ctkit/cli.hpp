#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ctkit::cli {

// Operator entry point: one binary, subcommand style, config file plus flag
// overrides. All outputs are machine-readable (CSV/TSV/JSON Lines);
// diagnostics go to stderr.

/// Shared configuration. Every path named in the file must exist at load
/// time; relative paths resolve against the config file's directory.
struct Config {
    std::filesystem::path store_dir = "store";
    std::filesystem::path logs;           // log list (JSON)
    std::filesystem::path psl;            // public suffix list
    std::filesystem::path domain_list;    // registrable domains, one per line
    std::filesystem::path phishing_rules; // JSON rules; built-ins when empty
    std::filesystem::path ca_aliases;     // issuer alias map (JSON)
    std::filesystem::path routability;    // CIDR prefix list
    std::string routability_mode = "deny"; // "deny" (bogon list) or "allow" (router table)
    std::filesystem::path blocklist;      // names never to query
    std::filesystem::path known_fqdns;    // externally known names, one per line
    std::filesystem::path asn_table;      // prefix -> ASN (TSV)
    std::vector<std::string> resolvers;   // "ip[:port]"
    double qps = 100.0;
    int timeout_ms = 2000;
    int workers = 8;

    static Config load(const std::filesystem::path& file); // throws on missing referenced files
};

/// Exit codes: 0 success, 1 operational failure (including failed
/// verification), 2 usage errors and unknown subcommands.
int run(int argc, const char* const* argv);

} // namespace ctkit::cli
