#include "ctkit/store.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "ctkit/sha256.hpp"

namespace ctkit::store {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error("store: " + what);
}

StoredEntry finish_entry(ctlog::Entry e) {
    StoredEntry s;
    auto cert = ctlog::extract_certificate(e);
    s.fingerprint = sha256(view(cert.der));
    s.parse_ok = cert.parse_ok;
    s.entry = std::move(e);
    return s;
}

std::string record_line(const StoredEntry& s) {
    json j;
    j["index"] = s.entry.index;
    j["leaf_input"] = base64_encode(view(s.entry.leaf_input));
    j["extra_data"] = base64_encode(view(s.entry.extra_data));
    j["sha256"] = to_hex(view(s.fingerprint));
    return j.dump();
}

/// Decode one stored line; nullopt when the line is torn or inconsistent.
std::optional<StoredEntry> decode_line(const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    if (!j.contains("index") || !j.contains("leaf_input") || !j.contains("extra_data") ||
        !j.contains("sha256")) {
        return std::nullopt;
    }
    if (!j["index"].is_number_unsigned()) return std::nullopt;
    ctlog::Entry e;
    e.index = j["index"].get<std::uint64_t>();
    auto leaf = base64_decode(j["leaf_input"].get<std::string>());
    auto extra = base64_decode(j["extra_data"].get<std::string>());
    if (!leaf || !extra) return std::nullopt;
    e.leaf_input = std::move(*leaf);
    e.extra_data = std::move(*extra);
    StoredEntry s = finish_entry(std::move(e));
    if (to_hex(view(s.fingerprint)) != j["sha256"].get<std::string>()) return std::nullopt;
    return s;
}

} // namespace

EntryStore::EntryStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::string EntryStore::sanitize_log_name(std::string_view log) {
    std::string_view rest = log;
    for (std::string_view scheme : {"https://", "http://"}) {
        if (rest.substr(0, scheme.size()) == scheme) rest.remove_prefix(scheme.size());
    }
    while (!rest.empty() && rest.back() == '/') rest.remove_suffix(1);
    std::string out;
    out.reserve(rest.size());
    for (char c : rest) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '_' ||
                  c == '-';
        out.push_back(ok ? c : '_');
    }
    if (out.empty()) out = "log";
    return out;
}

std::filesystem::path EntryStore::entries_path(const std::string& log) const {
    return dir_ / (sanitize_log_name(log) + ".entries.jsonl");
}

std::filesystem::path EntryStore::head_path(const std::string& log) const {
    return dir_ / (sanitize_log_name(log) + ".sth.json");
}

void EntryStore::open_scan(const std::string& log) {
    std::string key = sanitize_log_name(log);
    if (hwm_.count(key)) return;

    auto path = entries_path(log);
    std::optional<std::uint64_t> hwm;
    std::uintmax_t good_end = 0;
    std::ifstream in(path, std::ios::binary);
    if (in) {
        std::string line;
        std::uintmax_t consumed = 0;
        while (std::getline(in, line)) {
            bool complete = !in.eof(); // getline at EOF without '\n' means a torn tail
            std::uintmax_t line_end = consumed + line.size() + (complete ? 1 : 0);
            auto entry = complete ? decode_line(line) : std::nullopt;
            if (!entry) break;
            std::uint64_t expected = hwm ? *hwm + 1 : 0;
            if (entry->entry.index != expected) break;
            hwm = entry->entry.index;
            good_end = line_end;
            consumed = line_end;
        }
        in.close();
        std::error_code ec;
        auto size = std::filesystem::file_size(path, ec);
        if (!ec && size != good_end) {
            std::filesystem::resize_file(path, good_end, ec);
            if (ec) fail("cannot truncate torn tail of " + path.string());
        }
    }
    hwm_[key] = hwm;
}

std::optional<std::uint64_t> EntryStore::high_water(const std::string& log) {
    open_scan(log);
    return hwm_[sanitize_log_name(log)];
}

std::uint64_t EntryStore::append(const std::string& log, std::span<const ctlog::Entry> entries) {
    open_scan(log);
    auto& hwm = hwm_[sanitize_log_name(log)];
    std::ofstream out(entries_path(log), std::ios::binary | std::ios::app);
    if (!out) fail("cannot open " + entries_path(log).string());
    std::uint64_t committed = 0;
    for (const auto& e : entries) {
        if (hwm && e.index <= *hwm) continue; // replayed entry, already on disk
        std::uint64_t expected = hwm ? *hwm + 1 : 0;
        if (e.index != expected) {
            fail("index gap: got " + std::to_string(e.index) + ", expected " +
                 std::to_string(expected));
        }
        out << record_line(finish_entry(e)) << '\n';
        if (!out) fail("write failed for " + entries_path(log).string());
        hwm = e.index;
        ++committed;
    }
    out.flush();
    if (!out) fail("flush failed for " + entries_path(log).string());
    return committed;
}

void EntryStore::for_each(const std::string& log,
                          const std::function<void(const StoredEntry&)>& fn) {
    open_scan(log);
    std::ifstream in(entries_path(log), std::ios::binary);
    if (!in) return; // nothing stored
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto entry = decode_line(line);
        if (!entry) fail("corrupt record at line " + std::to_string(lineno));
        fn(*entry);
    }
}

void EntryStore::scan(const std::string& log, std::uint64_t first, std::uint64_t last,
                      const std::function<void(const StoredEntry&)>& fn) {
    auto hwm = high_water(log);
    std::uint64_t stored = hwm ? *hwm + 1 : 0;
    if (first > last || last > stored) {
        fail("scan range [" + std::to_string(first) + ", " + std::to_string(last) +
             ") is outside the stored prefix of " + std::to_string(stored));
    }
    for_each(log, [&](const StoredEntry& s) {
        if (s.entry.index >= first && s.entry.index < last) fn(s);
    });
}

std::vector<Hash> EntryStore::leaf_hashes(const std::string& log,
                                          std::optional<std::uint64_t> upto) {
    std::vector<Hash> out;
    if (upto) out.reserve(*upto);
    for_each(log, [&](const StoredEntry& s) {
        if (upto && out.size() >= *upto) return;
        out.push_back(merkle::leaf_hash(view(s.entry.leaf_input)));
    });
    return out;
}

std::vector<std::string> EntryStore::logs() const {
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& it : std::filesystem::directory_iterator(dir_, ec)) {
        auto name = it.path().filename().string();
        std::string suffix = ".entries.jsonl";
        if (name.size() > suffix.size() &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
            out.push_back(name.substr(0, name.size() - suffix.size()));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Stats EntryStore::stats(const std::string& log) {
    Stats st;
    st.high_water = high_water(log);
    std::error_code ec;
    st.bytes = std::filesystem::file_size(entries_path(log), ec);
    if (ec) st.bytes = 0;
    std::unordered_set<std::string> fingerprints;
    for_each(log, [&](const StoredEntry& s) {
        ++st.entries;
        fingerprints.insert(to_hex(view(s.fingerprint)));
        try {
            auto leaf = ctlog::parse_leaf(view(s.entry.leaf_input));
            if (leaf.entry_type == sct::EntryType::precert) {
                ++st.precert_entries;
            } else {
                ++st.x509_entries;
            }
        } catch (const std::exception&) {
            ++st.undecodable;
        }
    });
    st.distinct_certificates = fingerprints.size();
    return st;
}

std::optional<merkle::TreeHead> EntryStore::load_tree_head(const std::string& log) const {
    std::ifstream in(head_path(log), std::ios::binary);
    if (!in) return std::nullopt;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    merkle::TreeHead head;
    if (!j.contains("tree_size") || !j.contains("timestamp") || !j.contains("sha256_root_hash")) {
        return std::nullopt;
    }
    head.tree_size = j["tree_size"].get<std::uint64_t>();
    head.timestamp_ms = j["timestamp"].get<std::uint64_t>();
    auto root = base64_decode(j["sha256_root_hash"].get<std::string>());
    if (!root || root->size() != 32) return std::nullopt;
    std::copy(root->begin(), root->end(), head.root_hash.begin());
    if (j.contains("tree_head_signature")) {
        auto sig = base64_decode(j["tree_head_signature"].get<std::string>());
        if (sig) head.signature = std::move(*sig);
    }
    return head;
}

void EntryStore::save_tree_head(const std::string& log, const merkle::TreeHead& head) {
    json j;
    j["tree_size"] = head.tree_size;
    j["timestamp"] = head.timestamp_ms;
    j["sha256_root_hash"] = base64_encode(view(head.root_hash));
    j["tree_head_signature"] = base64_encode(view(head.signature));
    auto path = head_path(log);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail("cannot write " + tmp.string());
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

} // namespace ctkit::store
