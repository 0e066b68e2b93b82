#include <doctest.h>

#include <fstream>

#include "ctkit/leaf.hpp"
#include "ctkit/merkle.hpp"
#include "ctkit/store.hpp"
#include "support/testutil.hpp"

using namespace ctkit;

namespace {

ctlog::Entry make_entry(std::uint64_t index) {
    ctlog::Leaf leaf;
    leaf.timestamp_ms = 1500000000000 + index;
    leaf.entry_type = sct::EntryType::x509;
    leaf.cert = to_bytes("certificate-" + std::to_string(index));
    ctlog::Entry e;
    e.index = index;
    e.leaf_input = ctlog::encode_leaf(leaf);
    e.extra_data = ctlog::encode_x509_extra({to_bytes("chain-" + std::to_string(index))});
    return e;
}

std::vector<ctlog::Entry> make_entries(std::uint64_t first, std::uint64_t count) {
    std::vector<ctlog::Entry> out;
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(make_entry(first + i));
    return out;
}

} // namespace

TEST_CASE("append then read back byte-identically") {
    testutil::TempDir dir;
    store::EntryStore archive(dir.path());
    auto entries = make_entries(0, 25);
    CHECK(archive.append("demo log", entries) == 25);
    CHECK(archive.high_water("demo log") == 24);

    std::vector<ctlog::Entry> seen;
    archive.for_each("demo log", [&](const store::StoredEntry& s) { seen.push_back(s.entry); });
    REQUIRE(seen.size() == 25);
    for (std::size_t i = 0; i < seen.size(); ++i) {
        CHECK(seen[i].index == i);
        CHECK(seen[i].leaf_input == entries[i].leaf_input);
        CHECK(seen[i].extra_data == entries[i].extra_data);
    }
}

TEST_CASE("replayed entries are skipped, appends are idempotent") {
    testutil::TempDir dir;
    store::EntryStore archive(dir.path());
    auto entries = make_entries(0, 10);
    CHECK(archive.append("log", entries) == 10);
    CHECK(archive.append("log", entries) == 0); // full replay
    auto more = make_entries(5, 10);            // overlap + extension
    CHECK(archive.append("log", more) == 5);
    CHECK(archive.high_water("log") == 14);
    std::size_t n = 0;
    archive.for_each("log", [&](const store::StoredEntry&) { ++n; });
    CHECK(n == 15);
}

TEST_CASE("index gaps are refused") {
    testutil::TempDir dir;
    store::EntryStore archive(dir.path());
    CHECK(archive.append("log", make_entries(0, 3)) == 3);
    auto gapped = make_entries(7, 2);
    CHECK_THROWS(archive.append("log", gapped));
    CHECK(archive.high_water("log") == 2); // nothing past the gap committed
}

TEST_CASE("a fresh handle resumes from disk state") {
    testutil::TempDir dir;
    {
        store::EntryStore archive(dir.path());
        archive.append("log", make_entries(0, 8));
    }
    store::EntryStore again(dir.path());
    CHECK(again.high_water("log") == 7);
    CHECK(again.append("log", make_entries(8, 2)) == 2);
    CHECK(again.high_water("log") == 9);
}

TEST_CASE("torn trailing line is detected") {
    testutil::TempDir dir;
    std::filesystem::path entries_file;
    {
        store::EntryStore archive(dir.path());
        archive.append("log", make_entries(0, 4));
        for (const auto& p : std::filesystem::directory_iterator(dir.path())) {
            if (p.path().string().ends_with(".entries.jsonl")) entries_file = p.path();
        }
    }
    REQUIRE(!entries_file.empty());
    // chop the file mid-record
    auto content = testutil::slurp(entries_file);
    std::ofstream out(entries_file, std::ios::binary | std::ios::trunc);
    out << content.substr(0, content.size() - 10);
    out.close();

    store::EntryStore archive(dir.path());
    CHECK_THROWS(archive.for_each("log", [](const store::StoredEntry&) {}));
}

TEST_CASE("stats partition entries by type and count distinct certificates") {
    testutil::TempDir dir;
    store::EntryStore archive(dir.path());
    auto entries = make_entries(0, 6);
    // one duplicated certificate body under a different index
    ctlog::Leaf dup;
    dup.timestamp_ms = 1500000000000;
    dup.cert = to_bytes("certificate-0");
    entries.push_back({6, ctlog::encode_leaf(dup), ctlog::encode_x509_extra({})});
    // one undecodable leaf
    entries.push_back({7, to_bytes("garbage"), Bytes{}});
    archive.append("log", entries);

    store::Stats s = archive.stats("log");
    CHECK(s.entries == 8);
    CHECK(s.high_water == 7);
    CHECK(s.x509_entries == 7);
    CHECK(s.precert_entries == 0);
    CHECK(s.undecodable == 1);
    CHECK(s.distinct_certificates == 7); // 8 entries, one duplicate body
    CHECK(s.bytes > 0);
}

TEST_CASE("leaf hashes honour the upto bound") {
    testutil::TempDir dir;
    store::EntryStore archive(dir.path());
    auto entries = make_entries(0, 9);
    archive.append("log", entries);
    auto all = archive.leaf_hashes("log", std::nullopt);
    auto capped = archive.leaf_hashes("log", 4);
    REQUIRE(all.size() == 9);
    REQUIRE(capped.size() == 4);
    for (std::size_t i = 0; i < capped.size(); ++i) CHECK(capped[i] == all[i]);
    CHECK(all[3] == merkle::leaf_hash(view(entries[3].leaf_input)));
}

TEST_CASE("tree heads round trip and log names are sanitized") {
    testutil::TempDir dir;
    store::EntryStore archive(dir.path());
    merkle::TreeHead head;
    head.tree_size = 42;
    head.root_hash.fill(0x17);
    head.timestamp_ms = 1700000000000;
    head.signature = to_bytes("sig");
    archive.save_tree_head("Weird/Log Name", head);
    auto back = archive.load_tree_head("Weird/Log Name");
    REQUIRE(back);
    CHECK(back->tree_size == 42);
    CHECK(back->root_hash == head.root_hash);
    CHECK(!archive.load_tree_head("other"));
    CHECK(store::EntryStore::sanitize_log_name("Weird/Log Name") ==
          store::EntryStore::sanitize_log_name("weird/log name"));
}
