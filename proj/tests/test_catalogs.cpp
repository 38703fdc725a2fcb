#include <doctest.h>

#include "iotl/catalogs.hpp"

#include <algorithm>
#include <fstream>

#include "helpers.hpp"
#include "iotl/errors.hpp"

using namespace iotl;
using testutil::TempDir;

namespace {

void write_catalogs(const std::filesystem::path& dir, const std::string& vendors,
                    const std::string& functions, const std::string& types) {
    testutil::write_file(dir / "vendors.json", vendors);
    testutil::write_file(dir / "functions.json", functions);
    testutil::write_file(dir / "types.json", types);
}

}  // namespace

TEST_CASE("normalize_catalog_key folds case and legal suffixes") {
    CHECK(normalize_catalog_key("Belkin International, Inc.") == "belkin international");
    CHECK(normalize_catalog_key("Samjin Co., Ltd.") == "samjin");
    CHECK(normalize_catalog_key("Philips Lighting B.V.") == "philips lighting");
    CHECK(normalize_catalog_key("TP-Link Technologies Co.Ltd.") == "tp-link technologies");
    CHECK(normalize_catalog_key("  Sonos, Inc. ") == "sonos");
    CHECK(normalize_catalog_key("LG") == "lg");  // never stripped to nothing
    CHECK(normalize_catalog_key("ring llc") == "ring");
}

TEST_CASE("the bundled seed catalogs load and report sizes") {
    Catalogs catalogs = load_catalogs(testutil::source_dir() / "data" / "catalogs");
    CHECK(catalogs.vendors.size() == 15);
    CHECK(catalogs.functions.size() == 10);
    CHECK(catalogs.types.size() == 32);
}

TEST_CASE("dangling type pairs are rejected with the pair named") {
    TempDir dir;
    write_catalogs(dir.path, R"([{"name":"acme","aliases":[]}])", R"(["plug"])",
                   R"([["belkin","plug"]])");
    CHECK_THROWS_WITH_AS(load_catalogs(dir.path), doctest::Contains("belkin"), ValidationError);
}

TEST_CASE("an empty function catalog is rejected") {
    TempDir dir;
    write_catalogs(dir.path, R"([{"name":"acme"}])", R"([])", R"([])");
    CHECK_THROWS_WITH_AS(load_catalogs(dir.path), doctest::Contains("function catalog"),
                         ValidationError);
}

TEST_CASE("duplicate canonical vendors are rejected") {
    TempDir dir;
    write_catalogs(dir.path, R"([{"name":"Acme"},{"name":"acme inc"}])", R"(["plug"])", R"([])");
    CHECK_THROWS_WITH_AS(load_catalogs(dir.path), doctest::Contains("duplicate"), ValidationError);
}

TEST_CASE("aliases may not map to two vendors") {
    TempDir dir;
    write_catalogs(dir.path,
                   R"([{"name":"acme","aliases":["shared"]},{"name":"bolt","aliases":["shared"]}])",
                   R"(["plug"])", R"([])");
    CHECK_THROWS_WITH_AS(load_catalogs(dir.path), doctest::Contains("shared"), ValidationError);
}

TEST_CASE("resolve_alias matches canonical names and aliases after normalization") {
    Catalogs catalogs = load_catalogs(testutil::source_dir() / "data" / "catalogs");
    CHECK(catalogs.vendors.resolve_alias("WeMo") == "belkin");
    CHECK(catalogs.vendors.resolve_alias("BELKIN") == "belkin");
    CHECK(catalogs.vendors.resolve_alias("Belkin International, Inc.") == "belkin");
    CHECK_FALSE(catalogs.vendors.resolve_alias("unknown vendor").has_value());
}

TEST_CASE("candidate_functions restricts by vendor and falls back to the full catalog") {
    Catalogs catalogs = load_catalogs(testutil::source_dir() / "data" / "catalogs");
    auto belkin = candidate_functions(std::string("belkin"), catalogs.types, catalogs.functions);
    std::vector<std::string> expected = {"camera", "plug"};
    CHECK(belkin == expected);

    // vendor absent from the type catalog: all functions
    auto absent = candidate_functions(std::string("withheld"), catalogs.types, catalogs.functions);
    CHECK(absent == catalogs.functions.names());

    // abstained vendor: same fallback
    auto unknown = candidate_functions(std::nullopt, catalogs.types, catalogs.functions);
    CHECK(unknown == catalogs.functions.names());
}

TEST_CASE("candidate_functions is never empty and always within the catalog") {
    Catalogs catalogs = load_catalogs(testutil::source_dir() / "data" / "catalogs");
    std::vector<std::optional<std::string>> vendors = {std::nullopt, std::string("belkin"),
                                                       std::string("sonos"), std::string("zzz")};
    for (const auto& vendor : vendors) {
        auto candidates = candidate_functions(vendor, catalogs.types, catalogs.functions);
        CHECK_FALSE(candidates.empty());
        for (const auto& f : candidates) CHECK(catalogs.functions.contains(f));
    }
}

TEST_CASE("save(load(x)) is byte-identical for canonically formatted catalogs") {
    Catalogs catalogs = load_catalogs(testutil::source_dir() / "data" / "catalogs");
    TempDir first, second;
    save_catalogs(catalogs, first.path);
    Catalogs reloaded = load_catalogs(first.path);
    save_catalogs(reloaded, second.path);
    for (const char* name : {"vendors.json", "functions.json", "types.json"}) {
        CHECK(testutil::read_file(first.path / name) == testutil::read_file(second.path / name));
    }
}

TEST_CASE("with_vendor and with_pair are snapshots") {
    VendorCatalog v({{"acme", {}}});
    VendorCatalog v2 = v.with_vendor("Bolt Ltd");
    CHECK(v.size() == 1);
    CHECK(v2.size() == 2);
    CHECK(v2.contains("bolt"));

    TypeCatalog t;
    TypeCatalog t2 = t.with_pair("acme", "plug");
    CHECK(t.size() == 0);
    CHECK(t2.contains("acme", "plug"));
}

TEST_CASE("function catalog imports from CSV") {
    TempDir dir;
    testutil::write_file(dir.path / "functions.csv", "function\nCamera\nplug\ncamera\n\n");
    FunctionCatalog fc = function_catalog_from_csv(dir.path / "functions.csv");
    std::vector<std::string> expected = {"camera", "plug"};
    CHECK(fc.names() == expected);
}
