#pragma once

#include <atomic>
#include <map>
#include <string>
#include <thread>
#include <vector>

namespace testutil {

/// Authoritative DNS fixture on a loopback UDP socket. Exact names carry a
/// behavior; zones answer NXDOMAIN for unknown names beneath them; wildcard
/// zones answer every name beneath them with fixed addresses. Configure
/// before start(); the server is immutable while running.
class FixtureDns {
public:
    enum class Behavior { answer, nxdomain, servfail, drop };

    struct Record {
        Behavior behavior = Behavior::answer;
        std::vector<std::string> addresses; // A records
        std::string cname;                  // when set: CNAME first, then the target's records
    };

    FixtureDns() = default;
    ~FixtureDns() { stop(); }
    FixtureDns(const FixtureDns&) = delete;
    FixtureDns& operator=(const FixtureDns&) = delete;

    void add_name(const std::string& fqdn, Record r);
    void add_zone(const std::string& zone);
    void add_wildcard(const std::string& zone, std::vector<std::string> addresses);

    void start();
    void stop();
    std::string address() const; // "127.0.0.1:port"

    std::uint64_t query_count() const { return queries_.load(); }

private:
    void serve();

    std::map<std::string, Record> names_;
    std::map<std::string, std::vector<std::string>> wildcards_;
    std::vector<std::string> zones_;
    std::atomic<std::uint64_t> queries_{0};
    std::atomic<bool> running_{false};
    std::thread thread_;
    int fd_ = -1;
    int port_ = 0;
};

} // namespace testutil
