#include <doctest.h>

#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "helpers.hpp"

using nlohmann::json;
using testutil::TempDir;
using testutil::run_cli;

namespace {

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

void write_empty_pcap(const std::filesystem::path& path) {
    // global header only: magic, version 2.4, zone, sigfigs, snaplen, ethernet
    static const unsigned char header[24] = {0xD4, 0xC3, 0xB2, 0xA1, 0x02, 0x00, 0x04, 0x00,
                                             0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
                                             0xFF, 0xFF, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00};
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
}

std::string catalogs_arg() {
    return q(testutil::source_dir() / "data" / "catalogs");
}

}  // namespace

TEST_CASE("extract: empty capture exits 0 with an empty device array") {
    TempDir dir;
    write_empty_pcap(dir.path / "empty.pcap");
    auto res = run_cli("extract --pcap " + q(dir.path / "empty.pcap") + " --oui " +
                       q(testutil::data_path("manuf")) + " -o " + q(dir.path / "out.json"));
    CHECK(res.exit_code == 0);
    json out = json::parse(testutil::read_file(dir.path / "out.json"));
    CHECK(out["devices"].is_array());
    CHECK(out["devices"].empty());
}

TEST_CASE("extract: a missing OUI database exits 2") {
    TempDir dir;
    write_empty_pcap(dir.path / "empty.pcap");
    auto res = run_cli("extract --pcap " + q(dir.path / "empty.pcap") +
                       " --oui /definitely/not/there -o " + q(dir.path / "out.json"));
    CHECK(res.exit_code == 2);
    CHECK(res.stderr_text.find("not found") != std::string::npos);
}

TEST_CASE("extract: a malformed capture exits 1 naming the offset") {
    TempDir dir;
    testutil::write_file(dir.path / "bad.pcap", "this is not a capture");
    auto res = run_cli("extract --pcap " + q(dir.path / "bad.pcap") + " --oui " +
                       q(testutil::data_path("manuf")) + " -o " + q(dir.path / "out.json"));
    CHECK(res.exit_code == 1);
    CHECK(res.stderr_text.find("byte offset") != std::string::npos);
}

TEST_CASE("extract: the committed capture produces schema-valid output") {
    TempDir dir;
    auto res = run_cli("extract --pcap " + q(testutil::fixture_path("three_device.pcap")) +
                       " --oui " + q(testutil::data_path("manuf")) + " --psl " +
                       q(testutil::data_path("public_suffix_list.dat")) + " -o " +
                       q(dir.path / "out.json"));
    REQUIRE(res.exit_code == 0);
    json out = json::parse(testutil::read_file(dir.path / "out.json"));
    REQUIRE(out["devices"].is_array());
    CHECK(out["devices"].size() == 4);
    for (const auto& device : out["devices"]) {
        CHECK(device.contains("device_id"));
        CHECK(device.contains("features"));
        for (const char* key : {"hostname", "domains", "tls_issuers", "user_agents", "oui"})
            CHECK(device["features"].contains(key));
    }
}

TEST_CASE("enrich: cold cache offline yields empty result lists and a warning count") {
    TempDir dir;
    auto res = run_cli("enrich " + q(testutil::fixture_path("three_device_features.json")) +
                       " --cache " + q(dir.path / "cache") + " --offline -o " +
                       q(dir.path / "enriched.json"));
    REQUIRE(res.exit_code == 0);
    CHECK(res.stderr_text.find("offline misses") != std::string::npos);
    json out = json::parse(testutil::read_file(dir.path / "enriched.json"));
    for (const auto& device : out["devices"]) {
        for (const auto& [type, values] : device["enriched"].items()) {
            for (const auto& [value, results] : values.items()) CHECK(results.empty());
        }
    }
}

TEST_CASE("enrich: a live stub provider populates the cache; reruns are identical") {
    httplib::Server server;
    server.Get("/search", [&](const httplib::Request& req, httplib::Response& res) {
        json results = json::array();
        results.push_back({{"rank", 1},
                           {"title", req.get_param_value("q") + " result"},
                           {"snippet", "about " + req.get_param_value("q")},
                           {"url", "https://example.com"}});
        res.set_content(json{{"results", results}}.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread service([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    const std::string url = "http://127.0.0.1:" + std::to_string(port);

    TempDir dir;
    auto first = run_cli("enrich " + q(testutil::fixture_path("three_device_features.json")) +
                         " --cache " + q(dir.path / "cache") + " --provider " + url + " -o " +
                         q(dir.path / "first.json"));
    REQUIRE(first.exit_code == 0);
    CHECK(std::filesystem::exists(dir.path / "cache" / "index.json"));

    server.stop();
    service.join();

    // the provider is gone; a warm cache must reproduce the same bytes
    auto second = run_cli("enrich " + q(testutil::fixture_path("three_device_features.json")) +
                          " --cache " + q(dir.path / "cache") + " --offline -o " +
                          q(dir.path / "second.json"));
    REQUIRE(second.exit_code == 0);
    CHECK(testutil::read_file(dir.path / "first.json") ==
          testutil::read_file(dir.path / "second.json"));
}

TEST_CASE("label: runs are byte-identical and reports parse") {
    TempDir a, b;
    std::string base = "label " + q(testutil::fixture_path("ten_device_fixture.json")) +
                       " --catalogs " + catalogs_arg() + " --keywords " +
                       q(testutil::data_path("oracle_keywords.json"));
    auto first = run_cli(base + " -o " + q(a.path / "run"));
    auto second = run_cli(base + " -o " + q(b.path / "run"));
    REQUIRE(first.exit_code == 0);
    REQUIRE(second.exit_code == 0);
    CHECK(testutil::read_file(a.path / "run/reports/summary.json") ==
          testutil::read_file(b.path / "run/reports/summary.json"));
    CHECK(testutil::read_file(a.path / "run/reports/d01.json") ==
          testutil::read_file(b.path / "run/reports/d01.json"));
    CHECK(std::filesystem::exists(a.path / "run/config.json"));

    json report = json::parse(testutil::read_file(a.path / "run/reports/d03.json"));
    CHECK(report["vendor"]["label"] == "myq");
    CHECK(report["function"]["label"] == "garage door");
    CHECK(report["type"][0] == "myq");
}

TEST_CASE("label: --explain prints evidence containing the label") {
    auto res = run_cli("label " + q(testutil::fixture_path("ten_device_fixture.json")) +
                       " --catalogs " + catalogs_arg() + " --keywords " +
                       q(testutil::data_path("oracle_keywords.json")) + " --explain d01");
    REQUIRE(res.exit_code == 0);
    CHECK(res.stdout_text.find("vendor") != std::string::npos);
    CHECK(res.stdout_text.find("belkin") != std::string::npos);
    // the excerpt lines must mention the label (WeMo and Belkin both count)
    bool mentions = res.stdout_text.find("Belkin") != std::string::npos ||
                    res.stdout_text.find("WeMo") != std::string::npos;
    CHECK(mentions);
}

TEST_CASE("label: an unknown device id exits 1") {
    auto res = run_cli("label " + q(testutil::fixture_path("ten_device_fixture.json")) +
                       " --catalogs " + catalogs_arg() + " --explain nosuchdevice");
    CHECK(res.exit_code == 1);
    CHECK(res.stderr_text.find("unknown device") != std::string::npos);
}

TEST_CASE("evaluate: fixture metrics match the hand count") {
    TempDir dir;
    auto res = run_cli("evaluate " + q(testutil::fixture_path("ten_device_fixture.json")) +
                       " --catalogs " + catalogs_arg() + " --keywords " +
                       q(testutil::data_path("oracle_keywords.json")) + " --baseline-oui " +
                       q(testutil::data_path("manuf")) + " -o " + q(dir.path / "run"));
    REQUIRE(res.exit_code == 0);
    json eval = json::parse(testutil::read_file(dir.path / "run/eval.json"));
    CHECK(eval["vendor"]["hit1"] == doctest::Approx(0.9));
    CHECK(eval["vendor"]["hit2"] == doctest::Approx(1.0));
    CHECK(eval["vendor"]["empty_ratio"] == doctest::Approx(0.0));
    CHECK(eval["function"]["hit1"] == doctest::Approx(1.0));
    CHECK(eval["baseline_oui"]["hit1"] == doctest::Approx(0.9));
    CHECK(eval["n_devices"] == 10);
    // the table mirrors the report columns
    std::string table = testutil::read_file(dir.path / "run/eval_table.txt");
    CHECK(table.find("Method") != std::string::npos);
    CHECK(table.find("HIT1") != std::string::npos);
    CHECK(table.find("OUI") != std::string::npos);
}

TEST_CASE("evaluate: --unique-only with a seed is reproducible") {
    TempDir a, b;
    std::string base = "evaluate " + q(testutil::fixture_path("ten_device_fixture.json")) +
                       " --catalogs " + catalogs_arg() + " --keywords " +
                       q(testutil::data_path("oracle_keywords.json")) +
                       " --unique-only --seed 7 -o ";
    REQUIRE(run_cli(base + q(a.path / "run")).exit_code == 0);
    REQUIRE(run_cli(base + q(b.path / "run")).exit_code == 0);
    CHECK(testutil::read_file(a.path / "run/eval.json") ==
          testutil::read_file(b.path / "run/eval.json"));
    json eval = json::parse(testutil::read_file(a.path / "run/eval.json"));
    CHECK(eval["unique_only"]["selected"].size() == 10);  // all fixture types are distinct
}

TEST_CASE("evaluate: reports mode consumes a label run") {
    TempDir dir;
    REQUIRE(run_cli("label " + q(testutil::fixture_path("ten_device_fixture.json")) +
                    " --catalogs " + catalogs_arg() + " --keywords " +
                    q(testutil::data_path("oracle_keywords.json")) + " -o " +
                    q(dir.path / "run"))
                .exit_code == 0);
    auto res = run_cli("evaluate --reports " + q(dir.path / "run/reports") + " --truth " +
                       q(testutil::fixture_path("ten_device_fixture.json")) + " -o " +
                       q(dir.path / "eval"));
    REQUIRE(res.exit_code == 0);
    json eval = json::parse(testutil::read_file(dir.path / "eval/eval.json"));
    CHECK(eval["vendor"]["hit1"] == doctest::Approx(0.9));
    CHECK(eval["vendor"]["hit2"] == doctest::Approx(1.0));
}

TEST_CASE("catalog list prints the three sizes") {
    auto res = run_cli("catalog list --catalogs " + catalogs_arg());
    REQUIRE(res.exit_code == 0);
    CHECK(res.stdout_text.find("vendors: 15") != std::string::npos);
    CHECK(res.stdout_text.find("functions: 10") != std::string::npos);
    CHECK(res.stdout_text.find("types: 32") != std::string::npos);
}

TEST_CASE("catalog update-vendors: stub math and transactionality") {
    TempDir dir;
    // private copy of the catalogs so the run can mutate them
    for (const char* name : {"vendors.json", "functions.json", "types.json"}) {
        testutil::write_file(dir.path / "catalogs" / name,
                             testutil::read_file(testutil::source_dir() / "data" / "catalogs" /
                                                 name));
    }
    json replies{{"ner", {"NewVendorX", "Belkin", "tuesday"}},
                 {"filter", {{"newvendorx", true}, {"belkin", true}, {"tuesday", false}}}};
    testutil::write_file(dir.path / "replies.json", replies.dump());

    SUBCASE("successful update adds filtered-minus-existing") {
        auto res = run_cli("catalog update-vendors " +
                           q(testutil::fixture_path("ten_device_fixture.json")) + " --catalogs " +
                           q(dir.path / "catalogs") + " --chat stub://" +
                           (dir.path / "replies.json").string());
        REQUIRE(res.exit_code == 0);
        json report = json::parse(res.stdout_text);
        CHECK(report["additions"] == json::array({"newvendorx"}));
        CHECK(report["before"] == 15);
        CHECK(report["after"] == 16);
        json vendors = json::parse(testutil::read_file(dir.path / "catalogs/vendors.json"));
        bool found = false;
        for (const auto& v : vendors) found = found || v["name"] == "newvendorx";
        CHECK(found);
    }
    SUBCASE("an unreachable endpoint changes nothing and exits 1") {
        auto before_v = testutil::read_file(dir.path / "catalogs/vendors.json");
        auto before_f = testutil::read_file(dir.path / "catalogs/functions.json");
        auto before_t = testutil::read_file(dir.path / "catalogs/types.json");
        auto res = run_cli("catalog update-vendors " +
                           q(testutil::fixture_path("ten_device_fixture.json")) + " --catalogs " +
                           q(dir.path / "catalogs") + " --chat http://127.0.0.1:1");
        CHECK(res.exit_code == 1);
        CHECK(testutil::read_file(dir.path / "catalogs/vendors.json") == before_v);
        CHECK(testutil::read_file(dir.path / "catalogs/functions.json") == before_f);
        CHECK(testutil::read_file(dir.path / "catalogs/types.json") == before_t);
    }
}

TEST_CASE("catalog acquire bootstraps fresh catalogs from the chat endpoint") {
    TempDir dir;
    json replies{{"acquire", {{"camera", {"Belkin", "Samsung"}}, {"plug", {"Belkin"}}}}};
    testutil::write_file(dir.path / "replies.json", replies.dump());
    // seed directory: functions only matter
    for (const char* name : {"vendors.json", "functions.json", "types.json"}) {
        testutil::write_file(dir.path / "seed" / name,
                             name == std::string("functions.json") ? R"(["camera", "plug"])"
                             : name == std::string("vendors.json") ? R"([{"name":"x"}])"
                                                                   : "[]");
    }
    auto res = run_cli("catalog acquire --catalogs " + q(dir.path / "seed") + " --chat stub://" +
                       (dir.path / "replies.json").string() + " -o " + q(dir.path / "acquired"));
    REQUIRE(res.exit_code == 0);
    json report = json::parse(res.stdout_text);
    CHECK(report["vendors"] == 2);
    CHECK(report["types"] == 3);
    json vendors = json::parse(testutil::read_file(dir.path / "acquired/vendors.json"));
    CHECK(vendors.size() == 2);
}
