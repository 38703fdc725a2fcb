#include <doctest.h>

#include "iotl/features.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "helpers.hpp"

using namespace iotl;

TEST_CASE("feature type names round-trip") {
    for (FeatureType t : kAllFeatureTypes) {
        auto back = feature_type_from_name(feature_type_name(t));
        REQUIRE(back.has_value());
        CHECK(*back == t);
    }
    CHECK_FALSE(feature_type_from_name("bogus").has_value());
}

TEST_CASE("normalize_feature lowercases, trims, and reduces domains") {
    CHECK(normalize_feature("API.XBCS.NET.", FeatureType::Domains) == "xbcs.net");
    CHECK_FALSE(normalize_feature("  ", FeatureType::Hostname).has_value());
    CHECK(normalize_feature("Mozilla/5.0 (SmartThings)", FeatureType::UserAgent) ==
          "mozilla/5.0 (smartthings)");
    CHECK(normalize_feature("  MyQ-139\t", FeatureType::Hostname) == "myq-139");
    // hostnames are not domain-reduced
    CHECK(normalize_feature("device.home.lan", FeatureType::Hostname) == "device.home.lan");
}

TEST_CASE("registrable domain follows the public suffix rules") {
    const auto& psl = PublicSuffixList::bundled();
    CHECK(psl.registrable_domain("api.xbcs.net") == "xbcs.net");
    CHECK(psl.registrable_domain("a.b.example.co.uk") == "example.co.uk");
    CHECK(psl.registrable_domain("example.com") == "example.com");
    CHECK(psl.registrable_domain("com") == "com");  // bare suffix stays as-is
    CHECK(psl.registrable_domain("foo.unknowntld") == "foo.unknowntld");  // implicit * rule
    // wildcard: *.ck makes everything under a.ck a suffix
    CHECK(psl.registrable_domain("x.y.a.ck") == "y.a.ck");
    // exception: !www.ck is itself registrable
    CHECK(psl.registrable_domain("sub.www.ck") == "www.ck");
}

TEST_CASE("bundled PSL matches the committed rules file") {
    auto from_file = PublicSuffixList::from_file(testutil::data_path("public_suffix_list.dat"));
    const auto& bundled = PublicSuffixList::bundled();
    CHECK(from_file.rule_count() == bundled.rule_count());
    const std::vector<std::string> names = {
        "api.xbcs.net", "x.co.uk", "deep.sub.domain.com.au", "plain.de", "a.b.ck", "www.ck",
        "singlelabel",  "tplinkcloud.com"};
    for (const auto& name : names) {
        CHECK(from_file.registrable_domain(name) == bundled.registrable_domain(name));
    }
}

namespace {

// Independent PSL evaluation: scan every rule line and apply the
// longest-match/exception/wildcard policy directly.
std::string psl_oracle(const std::string& host, const std::vector<std::string>& rules) {
    auto labels_of = [](const std::string& s) {
        std::vector<std::string> labels;
        std::string cur;
        for (char c : s) {
            if (c == '.') {
                labels.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(static_cast<char>(std::tolower(c)));
            }
        }
        labels.push_back(cur);
        return labels;
    };
    auto host_labels = labels_of(host);
    std::size_t best_suffix = 1;
    bool exception = false;
    std::string exception_value;
    for (const auto& raw : rules) {
        std::string rule = raw;
        bool is_exception = false, is_wildcard = false;
        if (!rule.empty() && rule[0] == '!') {
            is_exception = true;
            rule = rule.substr(1);
        } else if (rule.rfind("*.", 0) == 0) {
            is_wildcard = true;
            rule = rule.substr(2);
        }
        auto rule_labels = labels_of(rule);
        if (rule_labels.size() > host_labels.size()) continue;
        bool match = true;
        for (std::size_t i = 0; i < rule_labels.size(); ++i) {
            if (rule_labels[rule_labels.size() - 1 - i] !=
                host_labels[host_labels.size() - 1 - i]) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        if (is_exception) {
            exception = true;
            exception_value = rule;
        } else {
            std::size_t suffix = rule_labels.size() + (is_wildcard ? 1 : 0);
            if (suffix > best_suffix) best_suffix = suffix;
        }
    }
    if (exception) return exception_value;
    if (host_labels.size() <= best_suffix) {
        std::string lowered;
        for (char c : host) lowered.push_back(static_cast<char>(std::tolower(c)));
        return lowered;
    }
    std::string out;
    for (std::size_t i = host_labels.size() - best_suffix - 1; i < host_labels.size(); ++i) {
        if (!out.empty()) out += '.';
        out += host_labels[i];
    }
    return out;
}

}  // namespace

TEST_CASE("registrable domain matches an independent rule-scan oracle") {
    std::vector<std::string> rules;
    {
        std::ifstream in(testutil::data_path("public_suffix_list.dat"));
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line.rfind("//", 0) == 0) continue;
            rules.push_back(line);
        }
    }
    auto psl = PublicSuffixList::from_file(testutil::data_path("public_suffix_list.dat"));
    const std::vector<std::string> hosts = {
        "API.XBCS.NET",      "a.b.c.co.uk",  "tplinkcloud.com", "x.ck",
        "y.x.ck",            "z.y.x.ck",     "www.ck",          "a.www.ck",
        "svc.example.co.jp", "example.com",  "nota.tld.zz",     "one.org.il",
        "n.d.amazonaws.com", "plain.de",     "deep.net.in",     "socket.io",
    };
    for (const auto& host : hosts) {
        INFO("host: ", host);
        CHECK(psl.registrable_domain(host) == psl_oracle(host, rules));
    }
}

TEST_CASE("MacAddress parses common notations") {
    auto a = MacAddress::parse("ec:1a:59:11:22:33");
    REQUIRE(a.has_value());
    CHECK(a->to_string() == "ec:1a:59:11:22:33");
    CHECK(MacAddress::parse("EC-1A-59-11-22-33")->bits == a->bits);
    CHECK(MacAddress::parse("ec1a.5911.2233")->bits == a->bits);
    CHECK_FALSE(MacAddress::parse("ec:1a:59:11:22").has_value());
    CHECK_FALSE(MacAddress::parse("not a mac").has_value());
    std::uint8_t bytes[6] = {0xEC, 0x1A, 0x59, 0x11, 0x22, 0x33};
    CHECK(MacAddress::from_bytes(bytes).bits == a->bits);
}

TEST_CASE("add_value deduplicates and drops empties") {
    DeviceFeatures device;
    device.device_id = "t";
    CHECK(device.add_value(FeatureType::Domains, "A.com"));
    CHECK_FALSE(device.add_value(FeatureType::Domains, "a.com"));  // duplicate after folding case
    CHECK_FALSE(device.add_value(FeatureType::Hostname, "   "));
    CHECK(device.of(FeatureType::Domains).size() == 1);
    CHECK(device.of(FeatureType::Domains)[0].text == "a.com");
    CHECK(device.has_any_values());
    // values of a different type never collide
    CHECK(device.add_value(FeatureType::Hostname, "a.com"));
}

TEST_CASE("utf8_sanitize replaces invalid bytes") {
    CHECK(utf8_sanitize("plain ascii") == "plain ascii");
    CHECK(utf8_sanitize("caf\xC3\xA9") == "caf\xC3\xA9");
    CHECK(utf8_sanitize("bad\xFFbyte") == "bad\xEF\xBF\xBD"
                                          "byte");
    CHECK(utf8_sanitize("trunc\xC3") == "trunc\xEF\xBF\xBD");
    // overlong-start and stray continuation bytes are replaced one by one
    CHECK(utf8_sanitize("\x80\xC1") == "\xEF\xBF\xBD\xEF\xBF\xBD");
}
