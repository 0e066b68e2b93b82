#include <doctest.h>

#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ctkit/names.hpp"
#include "ctkit/psl.hpp"

using namespace ctkit;

namespace {

psl::PublicSuffixSet suffix_fixture() {
    std::istringstream in(
        "// sample of the public suffix list format\n"
        "com\n"
        "net\n"
        "de\n"
        "test\n"
        "uk\n"
        "co.uk\n"
        "\n"
        "*.ck\n"
        "!www.ck\n");
    return psl::PublicSuffixSet::from_stream(in);
}

} // namespace

TEST_CASE("suffix rules parse and count, ignoring comments and blanks") {
    auto set = suffix_fixture();
    CHECK(set.rule_count() == 8);

    psl::PublicSuffixSet empty;
    empty.add_rule("// just a comment");
    empty.add_rule("   ");
    CHECK(empty.rule_count() == 0);
    empty.add_rule("  COM  trailing junk");
    CHECK(empty.rule_count() == 1);
    CHECK(empty.suffix_of("example.com") == "com");
}

TEST_CASE("suffix matching follows longest-match, wildcard, and exception rules") {
    auto set = suffix_fixture();

    CHECK(set.suffix_of("example.com") == "com");
    CHECK(set.suffix_of("www.example.com") == "com");
    CHECK(set.suffix_of("example.co.uk") == "co.uk"); // longest match beats "uk"
    CHECK(set.suffix_of("example.uk") == "uk");

    // "*.ck" puts the suffix one label deeper.
    CHECK(set.suffix_of("example.ck") == "example.ck");
    CHECK(set.suffix_of("shop.example.ck") == "example.ck");
    CHECK(set.is_suffix("ck"));

    // "!www.ck" carves the exception back out.
    CHECK(set.suffix_of("www.ck") == "ck");
    CHECK(set.suffix_of("foo.www.ck") == "ck");

    // Implicit "*" rule: unknown rightmost labels are suffixes.
    CHECK(set.suffix_of("example.zz") == "zz");
    CHECK(set.is_suffix("zz"));
    CHECK(!set.is_suffix("example.com"));
    CHECK(set.is_suffix("com"));
}

TEST_CASE("split decomposes names and reassemble inverts it") {
    auto set = suffix_fixture();

    auto rec = names::split("www.example.com", set);
    REQUIRE(rec);
    CHECK(rec->fqdn == "www.example.com");
    CHECK(rec->public_suffix == "com");
    CHECK(rec->base_domain == "example.com");
    REQUIRE(rec->labels.size() == 1);
    CHECK(rec->labels[0] == "www");
    CHECK(names::reassemble(*rec) == "www.example.com");

    auto deep = names::split("a.b.example.co.uk", set);
    REQUIRE(deep);
    CHECK(deep->public_suffix == "co.uk");
    CHECK(deep->base_domain == "example.co.uk");
    REQUIRE(deep->labels.size() == 2);
    CHECK(deep->labels[0] == "a");
    CHECK(deep->labels[1] == "b");
    CHECK(names::reassemble(*deep) == "a.b.example.co.uk");

    auto bare = names::split("example.com", set);
    REQUIRE(bare);
    CHECK(bare->base_domain == "example.com");
    CHECK(bare->labels.empty());
    CHECK(names::reassemble(*bare) == "example.com");

    // Wildcard rules push the registrable domain one level down.
    auto wild = names::split("www.shop.example.ck", set);
    REQUIRE(wild);
    CHECK(wild->public_suffix == "example.ck");
    CHECK(wild->base_domain == "shop.example.ck");
    REQUIRE(wild->labels.size() == 1);

    // Names that are themselves suffixes have no registrable domain.
    CHECK(!names::split("com", set));
    CHECK(!names::split("co.uk", set));
    CHECK(!names::split("example.ck", set));
}

TEST_CASE("label statistics tally per label and suffix") {
    auto set = suffix_fixture();
    std::vector<names::FqdnRecord> records;
    for (const char* name : {"www.example.com", "www.example.de", "mail.example.com",
                             "www.other.com", "a.b.example.com", "example.com"}) {
        auto rec = names::split(name, set);
        REQUIRE(rec);
        records.push_back(*rec);
    }

    auto stats = names::label_stats(records);
    CHECK(stats.per_label.at("www").at("com") == 2);
    CHECK(stats.per_label.at("www").at("de") == 1);
    CHECK(stats.label_total("www") == 3);
    CHECK(stats.per_label.at("mail").at("com") == 1);
    CHECK(stats.per_label.at("a").at("com") == 1);
    CHECK(stats.per_label.at("b").at("com") == 1);
    CHECK(stats.label_total("nonexistent") == 0);
    // The bare base domain contributes no subdomain labels.
    CHECK(stats.per_label.count("example") == 0);

    // Merging partial tallies matches one pass over everything.
    std::vector<names::FqdnRecord> first(records.begin(), records.begin() + 3);
    std::vector<names::FqdnRecord> second(records.begin() + 3, records.end());
    auto merged = names::label_stats(first);
    merged.merge(names::label_stats(second));
    CHECK(merged.per_label == stats.per_label);
}

TEST_CASE("top label per suffix breaks ties toward the smaller label") {
    names::LabelStats stats;
    stats.per_label["www"]["com"] = 5;
    stats.per_label["mail"]["com"] = 3;
    stats.per_label["beta"]["net"] = 2;
    stats.per_label["alpha"]["net"] = 2;

    auto top = names::top_label_per_suffix(stats);
    CHECK(top.at("com") == "www");
    CHECK(top.at("net") == "alpha");
}

TEST_CASE("random labels draw from a-z0-9 and reproduce under a fixed seed") {
    std::mt19937_64 rng(42);
    auto label = names::random_label(rng, 16);
    CHECK(label.size() == 16);
    for (char c : label) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
        CHECK(ok);
    }
    auto second = names::random_label(rng, 16);
    CHECK(label != second);

    std::mt19937_64 replay(42);
    CHECK(names::random_label(replay, 16) == label);
}

TEST_CASE("candidate construction filters, ranks, and pairs controls") {
    auto set = suffix_fixture();

    names::LabelStats stats;
    stats.per_label["www"]["com"] = 3;
    stats.per_label["www"]["test"] = 2;
    stats.per_label["rare"]["test"] = 1;

    std::vector<std::string> domains{"d1.test", "d2.test", "d3.com"};
    std::set<std::string> observed{"www.d2.test"};

    names::CandidateConfig config;
    config.min_label_count = 2;
    config.top_suffixes_per_label = 10;
    config.excluded_suffixes = {"com"};

    auto candidates = names::construct_candidates(stats, domains, observed, set, config, 7);
    REQUIRE(candidates.size() == 1); // rare label dropped, com excluded, d2 observed
    CHECK(candidates[0].test_name == "www.d1.test");
    CHECK(candidates[0].label == "www");
    CHECK(candidates[0].base_domain == "d1.test");
    REQUIRE(candidates[0].control_name.size() == 16 + 1 + 7);
    CHECK(candidates[0].control_name.substr(16) == ".d1.test");

    // Same seed, same controls; the construction is fully deterministic.
    auto replay = names::construct_candidates(stats, domains, observed, set, config, 7);
    REQUIRE(replay.size() == 1);
    CHECK(replay[0].control_name == candidates[0].control_name);

    auto reseeded = names::construct_candidates(stats, domains, observed, set, config, 8);
    REQUIRE(reseeded.size() == 1);
    CHECK(reseeded[0].control_name != candidates[0].control_name);
}

TEST_CASE("suffix exclusion applies before the top-K cut") {
    auto set = suffix_fixture();

    names::LabelStats stats;
    stats.per_label["www"]["com"] = 10;
    stats.per_label["www"]["net"] = 5;
    stats.per_label["www"]["test"] = 2;

    std::vector<std::string> domains{"d1.test"};
    names::CandidateConfig config;
    config.min_label_count = 1;
    config.top_suffixes_per_label = 1;
    config.excluded_suffixes = {"com", "net"};

    // With exclusion first, "test" survives the K=1 cut; were the cut first,
    // "com" would consume the only slot and nothing would remain.
    auto candidates = names::construct_candidates(stats, domains, {}, set, config, 1);
    REQUIRE(candidates.size() == 1);
    CHECK(candidates[0].test_name == "www.d1.test");
}

TEST_CASE("top-K keeps the most frequent suffixes for each label") {
    auto set = suffix_fixture();

    names::LabelStats stats;
    stats.per_label["www"]["test"] = 9;
    stats.per_label["www"]["de"] = 4;
    stats.per_label["www"]["co.uk"] = 1;

    std::vector<std::string> domains{"d1.test", "d2.de", "d3.co.uk"};
    names::CandidateConfig config;
    config.min_label_count = 1;
    config.top_suffixes_per_label = 2;
    config.excluded_suffixes = {};

    auto candidates = names::construct_candidates(stats, domains, {}, set, config, 1);
    REQUIRE(candidates.size() == 2);
    CHECK(candidates[0].test_name == "www.d1.test");
    CHECK(candidates[1].test_name == "www.d2.de");
}

TEST_CASE("candidate TSV lists test and control names") {
    std::vector<names::CandidateFqdn> candidates{
        {"www.d1.test", "abcdefghij012345.d1.test", "www", "d1.test"},
        {"mail.d2.test", "zyxwvutsrq987654.d2.test", "mail", "d2.test"},
    };
    std::ostringstream out;
    names::write_candidates_tsv(out, candidates);
    CHECK(out.str() == "www.d1.test\tabcdefghij012345.d1.test\n"
                       "mail.d2.test\tzyxwvutsrq987654.d2.test\n");
}
