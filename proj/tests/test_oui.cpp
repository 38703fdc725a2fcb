#include <doctest.h>

#include "iotl/oui.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "iotl/errors.hpp"

using namespace iotl;

namespace {

OuiDatabase bundled_db() { return OuiDatabase::from_file(testutil::data_path("manuf")); }

// Reads the long-name column straight out of the manuf file for a prefix.
std::string name_from_file(const std::string& prefix) {
    std::ifstream in(testutil::data_path("manuf"));
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(prefix, 0) != 0) continue;
        auto first_tab = line.find('\t');
        auto second_tab = line.find('\t', first_tab + 1);
        return line.substr(second_tab + 1);
    }
    return {};
}

}  // namespace

TEST_CASE("lookup returns the registrant byte-for-byte from the bundled file") {
    auto db = bundled_db();
    // expected values are read from the data file, not hard-coded
    CHECK(db.lookup(*MacAddress::parse("ec:1a:59:00:00:01")) == name_from_file("EC:1A:59"));
    CHECK(db.lookup(*MacAddress::parse("50:c7:bf:12:34:56")) == name_from_file("50:C7:BF"));
    CHECK(db.lookup(*MacAddress::parse("00:17:88:99:99:99")) == name_from_file("00:17:88"));
    CHECK(name_from_file("EC:1A:59") == "Belkin International Inc.");  // sanity: file really read
}

TEST_CASE("unknown prefixes are a value, not an error") {
    auto db = bundled_db();
    CHECK_FALSE(db.lookup(MacAddress{0}).has_value());
    CHECK_FALSE(db.lookup(*MacAddress::parse("02:00:00:00:00:01")).has_value());
}

TEST_CASE("MACs sharing 24 bits resolve identically") {
    auto db = bundled_db();
    auto a = db.lookup(*MacAddress::parse("b0:c5:54:00:00:01"));
    auto b = db.lookup(*MacAddress::parse("b0:c5:54:ff:ee:dd"));
    REQUIRE(a.has_value());
    CHECK(a == b);
}

TEST_CASE("longest prefix wins across /24, /28, and /36 entries") {
    auto db = bundled_db();
    CHECK(db.lookup(*MacAddress::parse("8c:1f:64:a1:00:01")) == "Demo Sensors AB");
    CHECK(db.lookup(*MacAddress::parse("8c:1f:64:a1:10:01")) == "Sample Networks Oy");
    CHECK(db.lookup(*MacAddress::parse("8c:1f:64:a5:00:01")) == "Sample Networks Oy");
    CHECK(db.lookup(*MacAddress::parse("8c:1f:64:b0:00:01")) == "IEEE Registration Authority");
}

TEST_CASE("manuf parsing skips comments and odd lines") {
    auto db = OuiDatabase::from_text(
        "# comment line\n"
        "\n"
        "AA:BB:CC\tShort\tLong Name Co.\n"
        "AA-BB-CD\tHyphen\n"                  // short name only, hyphen separators
        "not a mac\tx\ty\n"                   // ignored
        "AA:BB:CE\tTrail\tTrailing\r\n");     // CRLF tolerated
    CHECK(db.size() == 3);
    CHECK(db.lookup(*MacAddress::parse("aa:bb:cc:00:00:01")) == "Long Name Co.");
    CHECK(db.lookup(*MacAddress::parse("aa:bb:cd:00:00:01")) == "Hyphen");
    CHECK(db.lookup(*MacAddress::parse("aa:bb:ce:00:00:01")) == "Trailing");
}

TEST_CASE("missing database file raises a validation error") {
    CHECK_THROWS_AS(OuiDatabase::from_file("/nonexistent/manuf"), ValidationError);
}

TEST_CASE("lookup equals a linear scan for random MACs") {
    auto db = bundled_db();
    auto entries = db.entries();
    auto linear_scan = [&](MacAddress mac) -> std::optional<std::string> {
        int best_len = -1;
        std::string best;
        for (const auto& e : entries) {
            std::uint64_t mask = (~0ULL << (48 - e.mask_len)) & 0xFFFFFFFFFFFFULL;
            if ((mac.bits & mask) == e.prefix && e.mask_len > best_len) {
                best_len = e.mask_len;
                best = e.name;
            }
        }
        if (best_len < 0) return std::nullopt;
        return best;
    };

    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        MacAddress mac{rng() & 0xFFFFFFFFFFFFULL};
        // bias half of the draws into known prefixes so hits are exercised
        if (i % 2 == 0) {
            const auto& e = entries[i % entries.size()];
            mac.bits = e.prefix | (rng() & ((1ULL << (48 - e.mask_len)) - 1));
        }
        INFO("mac: ", mac.to_string());
        CHECK(db.lookup(mac) == linear_scan(mac));
    }
}
