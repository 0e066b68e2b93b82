#include "ctkit/logclient.hpp"

#include <chrono>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ctkit/crypto.hpp"
#include "ctkit/sha256.hpp"
#include "ctkit/tlswire.hpp"

namespace ctkit::ctlog {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error("logclient: " + what);
}

/// Split scheme://host[:port] from any path prefix.
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto slash = url.find('/', host_start);
    if (slash == std::string::npos) return {url, ""};
    std::string prefix = url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, slash), prefix};
}

Hash hash_from_b64(const std::string& b64, const char* what) {
    auto raw = base64_decode(b64);
    if (!raw || raw->size() != 32) fail(std::string(what) + ": not a 32-byte digest");
    Hash h;
    std::copy(raw->begin(), raw->end(), h.begin());
    return h;
}

std::vector<Hash> hashes_from_b64_array(const json& arr, const char* what) {
    if (!arr.is_array()) fail(std::string(what) + ": not an array");
    std::vector<Hash> out;
    out.reserve(arr.size());
    for (const auto& item : arr) {
        out.push_back(hash_from_b64(item.get<std::string>(), what));
    }
    return out;
}

/// DigitallySigned: hash alg, signature alg, u16-prefixed signature.
bool verify_digitally_signed(const sct::LogKey& key, BytesView data, BytesView blob) {
    wire::Cursor c(blob);
    std::uint8_t hash_alg = 0;
    std::uint8_t sig_alg = 0;
    Bytes sig;
    if (!c.read_u8(hash_alg) || !c.read_u8(sig_alg) || !c.read_vec16(sig) || !c.done()) {
        return false;
    }
    if (hash_alg != crypto::kHashSha256) return false;
    return crypto::verify_sha256(view(key.spki_der), sig_alg, data, view(sig));
}

} // namespace

std::vector<LogDescriptor> load_log_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open log config " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("logs") || !j["logs"].is_array()) {
        fail("log config " + path + " is not an object with a \"logs\" array");
    }
    std::vector<LogDescriptor> out;
    for (const auto& item : j["logs"]) {
        LogDescriptor d;
        d.name = item.at("name").get<std::string>();
        d.url = item.at("url").get<std::string>();
        auto key = base64_decode(item.at("public_key").get<std::string>());
        if (!key) fail("log " + d.name + ": public_key is not base64");
        d.spki_der = std::move(*key);
        if (item.contains("inclusion_date")) {
            d.inclusion_date = item["inclusion_date"].get<std::string>();
        }
        out.push_back(std::move(d));
    }
    return out;
}

LogClient::LogClient(LogDescriptor log, Options opt) : log_(std::move(log)), opt_(opt) {
    auto [origin, prefix] = split_url(log_.url);
    prefix_ = prefix;
    http_ = std::make_unique<httplib::Client>(origin);
    http_->set_connection_timeout(opt_.timeout_s, 0);
    http_->set_read_timeout(opt_.timeout_s, 0);
    if (!opt_.verify_tls) http_->enable_server_certificate_verification(false);
    key_ = sct::make_log_key(view(log_.spki_der));
}

LogClient::~LogClient() = default;

const Hash& LogClient::log_id() const {
    return key_.id;
}

std::string LogClient::request(const std::string& path) {
    std::string target = prefix_ + path;
    int backoff_ms = opt_.backoff_initial_ms;
    for (int attempt = 0;; ++attempt) {
        auto res = http_->Get(target);
        if (res && res->status == 200) return res->body;
        if (attempt >= opt_.max_retries) {
            std::string why = res ? "status " + std::to_string(res->status)
                                  : "transport error " + httplib::to_string(res.error());
            fail("GET " + target + " failed after " + std::to_string(attempt + 1) +
                 " attempts: " + why);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
        backoff_ms *= 2;
    }
}

merkle::TreeHead LogClient::get_tree_head() {
    json j = json::parse(request("/ct/v1/get-sth"), nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail("get-sth: not a JSON object");
    merkle::TreeHead head;
    head.tree_size = j.at("tree_size").get<std::uint64_t>();
    head.timestamp_ms = j.at("timestamp").get<std::uint64_t>();
    head.root_hash = hash_from_b64(j.at("sha256_root_hash").get<std::string>(), "get-sth root");
    auto sig = base64_decode(j.at("tree_head_signature").get<std::string>());
    if (!sig) fail("get-sth: signature is not base64");
    head.signature = std::move(*sig);

    Bytes signed_data =
        sct::tree_head_signed_data(head.timestamp_ms, head.tree_size, head.root_hash);
    if (!verify_digitally_signed(key_, view(signed_data), view(head.signature))) {
        fail("get-sth: tree head signature does not verify for log " + log_.name);
    }
    if (verified_size_ && head.tree_size < *verified_size_) {
        fail("get-sth: tree size regressed from " + std::to_string(*verified_size_) + " to " +
             std::to_string(head.tree_size) + " (append-only violation)");
    }
    verified_size_ = head.tree_size;
    return head;
}

std::vector<Entry> LogClient::get_entries(std::uint64_t first, std::uint64_t last) {
    if (first > last) {
        throw std::invalid_argument("logclient: get_entries range [" + std::to_string(first) +
                                    ", " + std::to_string(last) + "] is inverted");
    }
    std::vector<Entry> out;
    out.reserve(last - first + 1);
    std::uint64_t next = first;
    while (next <= last) {
        std::uint64_t want_last = std::min(last, next + opt_.batch_size - 1);
        std::string path = "/ct/v1/get-entries?start=" + std::to_string(next) +
                           "&end=" + std::to_string(want_last);
        json j = json::parse(request(path), nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("entries") ||
            !j["entries"].is_array()) {
            fail("get-entries: malformed response");
        }
        const auto& entries = j["entries"];
        if (entries.empty()) fail("get-entries: log returned no entries for " + path);
        for (const auto& item : entries) {
            Entry e;
            e.index = next++;
            auto leaf = base64_decode(item.at("leaf_input").get<std::string>());
            auto extra = base64_decode(item.at("extra_data").get<std::string>());
            if (!leaf || !extra) fail("get-entries: entry is not base64");
            e.leaf_input = std::move(*leaf);
            e.extra_data = std::move(*extra);
            out.push_back(std::move(e));
            if (next > last) break;
        }
    }
    return out;
}

std::vector<Hash> LogClient::get_consistency(std::uint64_t old_size, std::uint64_t new_size) {
    std::string path = "/ct/v1/get-consistency-proof?first=" + std::to_string(old_size) +
                       "&second=" + std::to_string(new_size);
    json j = json::parse(request(path), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("consistency")) {
        fail("get-consistency-proof: malformed response");
    }
    return hashes_from_b64_array(j["consistency"], "consistency node");
}

LogClient::InclusionProof LogClient::get_proof_by_hash(const Hash& leaf_hash,
                                                       std::uint64_t tree_size) {
    std::string path = "/ct/v1/get-proof-by-hash?hash=" +
                       httplib::detail::encode_url(base64_encode(view(leaf_hash))) +
                       "&tree_size=" + std::to_string(tree_size);
    json j = json::parse(request(path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail("get-proof-by-hash: malformed response");
    InclusionProof proof;
    proof.leaf_index = j.at("leaf_index").get<std::uint64_t>();
    proof.audit_path = hashes_from_b64_array(j.at("audit_path"), "audit path node");
    return proof;
}

AuditReport audit_fetch(LogClient& client, store::EntryStore& archive, const AuditOptions& opt) {
    AuditReport report;
    const std::string& name = client.log().name;

    auto archived_head = archive.load_tree_head(name);
    merkle::TreeHead head;
    try {
        head = client.get_tree_head();
        report.signature_valid = true;
    } catch (const std::exception& e) {
        report.signature_valid = false;
        report.problems.emplace_back(e.what());
        return report;
    }
    report.log_size = head.tree_size;

    if (archived_head && head.tree_size < archived_head->tree_size) {
        report.monotonic = false;
        report.problems.push_back("tree shrank: archived head has size " +
                                  std::to_string(archived_head->tree_size) + ", log now signs " +
                                  std::to_string(head.tree_size));
        return report;
    }
    if (archived_head && head.tree_size == archived_head->tree_size &&
        head.root_hash != archived_head->root_hash) {
        report.consistent = false;
        report.problems.push_back("log re-signed size " + std::to_string(head.tree_size) +
                                  " with a different root");
        return report;
    }

    auto hwm = archive.high_water(name);
    std::uint64_t stored = hwm ? *hwm + 1 : 0;
    report.stored_before = stored;

    std::uint64_t target = head.tree_size;
    if (opt.upto && *opt.upto < target) target = *opt.upto;
    if (target < stored) target = stored; // already past the cap; audit what is on disk
    if (target > stored) {
        auto fetched = client.get_entries(stored, target - 1);
        archive.append(name, fetched);
    }
    auto hwm_after = archive.high_water(name);
    std::uint64_t stored_after = hwm_after ? *hwm_after + 1 : 0;
    report.stored_after = stored_after;

    // Root over the stored prefix: equal to the signed root when everything
    // was fetched, otherwise checked via a consistency proof.
    auto hashes = archive.leaf_hashes(name);
    Hash local_root = merkle::root_of_hashes(hashes);
    if (stored_after == head.tree_size) {
        report.root_matches = local_root == head.root_hash;
        if (!report.root_matches) {
            report.problems.push_back("recomputed root over " + std::to_string(stored_after) +
                                      " entries does not match the signed root");
        }
    } else if (stored_after > 0) {
        merkle::ConsistencyProof proof;
        proof.old_size = stored_after;
        proof.new_size = head.tree_size;
        try {
            proof.path = client.get_consistency(stored_after, head.tree_size);
        } catch (const std::exception& e) {
            report.root_matches = false;
            report.problems.emplace_back(e.what());
            return report;
        }
        report.root_matches = merkle::verify_consistency(proof, local_root, head.root_hash);
        if (!report.root_matches) {
            report.problems.push_back("stored prefix of " + std::to_string(stored_after) +
                                      " entries is not consistent with the signed root");
        }
    } else {
        // Nothing stored and nothing requested (upto == 0): vacuously clean.
        report.root_matches = true;
    }

    if (archived_head && archived_head->tree_size > 0 &&
        head.tree_size > archived_head->tree_size) {
        merkle::ConsistencyProof proof;
        proof.old_size = archived_head->tree_size;
        proof.new_size = head.tree_size;
        try {
            proof.path = client.get_consistency(proof.old_size, proof.new_size);
            report.consistent =
                merkle::verify_consistency(proof, archived_head->root_hash, head.root_hash);
        } catch (const std::exception& e) {
            report.consistent = false;
            report.problems.emplace_back(e.what());
        }
        if (!report.consistent) {
            report.problems.push_back("archived head (size " +
                                      std::to_string(archived_head->tree_size) +
                                      ") is not consistent with the new head");
        }
    }

    if (report.ok()) archive.save_tree_head(name, head);
    return report;
}

} // namespace ctkit::ctlog
