#include <doctest.h>

#include "iotl/function_labeling.hpp"

#include <random>

#include "fixture_gen.hpp"
#include "helpers.hpp"
#include "iotl/dataset.hpp"
#include "iotl/errors.hpp"
#include "reference_impl.hpp"

using namespace iotl;

namespace {

KeywordOracleBackend bundled_oracle() {
    return KeywordOracleBackend::from_file(testutil::data_path("oracle_keywords.json"));
}

Catalogs bundled_catalogs() {
    return load_catalogs(testutil::source_dir() / "data" / "catalogs");
}

EnrichedDevice device_with_snippet(const std::string& title, const std::string& snippet) {
    EnrichedDevice d;
    d.device.device_id = "t";
    d.device.add_value(FeatureType::Domains, "value.com");
    EnrichedFeature ef;
    ef.source = d.device.of(FeatureType::Domains)[0];
    ef.results.push_back({1, title, snippet, ""});
    d.of(FeatureType::Domains).push_back(std::move(ef));
    return d;
}

}  // namespace

TEST_CASE("classify_text returns one score per candidate") {
    auto oracle = bundled_oracle();
    SUBCASE("keyword hits rank plug over camera") {
        auto scores = classify_text("smart plug energy monitoring", {"plug", "camera"}, oracle);
        REQUIRE(scores.size() == 2);
        CHECK(scores[0].label == "plug");
        CHECK(scores[0].confidence > scores[1].confidence);
        CHECK(scores[1].confidence == 0.0);
    }
    SUBCASE("empty text scores zero everywhere") {
        auto scores = classify_text("", {"plug", "camera", "hub"}, oracle);
        for (const auto& s : scores) CHECK(s.confidence == 0.0);
    }
    SUBCASE("single candidate yields a single score") {
        auto scores = classify_text("anything at all", {"vacuum"}, oracle);
        REQUIRE(scores.size() == 1);
        CHECK(scores[0].label == "vacuum");
    }
    SUBCASE("empty candidate set is a validation error") {
        CHECK_THROWS_AS(classify_text("x", {}, oracle), ValidationError);
    }
}

TEST_CASE("classify_text enforces the backend contract") {
    struct BrokenBackend : ClassifierBackend {
        int mode = 0;
        std::vector<ClassifierScore> classify(const std::string&,
                                              const std::vector<std::string>& c) override {
            if (mode == 0) return {};  // wrong count
            if (mode == 1) {
                std::vector<ClassifierScore> out;
                for (const auto& l : c) out.push_back({l + "-oops", 0.5});
                return out;  // unknown labels
            }
            std::vector<ClassifierScore> out;
            for (const auto& l : c) out.push_back({l, 1.5});
            return out;  // out of range
        }
    } backend;
    backend.mode = 0;
    CHECK_THROWS_AS(classify_text("x", {"a"}, backend), ContractError);
    backend.mode = 1;
    CHECK_THROWS_AS(classify_text("x", {"a"}, backend), ContractError);
    backend.mode = 2;
    CHECK_THROWS_AS(classify_text("x", {"a"}, backend), ContractError);
}

TEST_CASE("label_function classifies against the vendor's candidate functions") {
    auto oracle = bundled_oracle();
    auto catalogs = bundled_catalogs();

    SUBCASE("the garage-door snippet wins for a garage-door vendor") {
        auto device = device_with_snippet(
            "Forum thread", "the API allows us to control the garage door opener remotely");
        LabelResult result =
            label_function(device, std::string("myq"), catalogs, ScoringConfig{}, oracle);
        REQUIRE_FALSE(result.abstained);
        CHECK(result.ranked[0].label == "garage door");
    }
    SUBCASE("no enriched values abstains") {
        EnrichedDevice bare;
        bare.device.device_id = "bare";
        LabelResult result =
            label_function(bare, std::string("belkin"), catalogs, ScoringConfig{}, oracle);
        CHECK(result.abstained);
    }
    SUBCASE("higher-confidence type outweighs a lower one under uniform weights") {
        // Domains result scores camera 0.75; UserAgent result scores plug 0.25
        EnrichedDevice d;
        d.device.device_id = "two-types";
        d.device.add_value(FeatureType::Domains, "a.com");
        d.device.add_value(FeatureType::UserAgent, "agent/1.0");
        EnrichedFeature dom;
        dom.source = d.device.of(FeatureType::Domains)[0];
        dom.results.push_back({1, "camera video surveillance", "", ""});
        d.of(FeatureType::Domains).push_back(dom);
        EnrichedFeature ua;
        ua.source = d.device.of(FeatureType::UserAgent)[0];
        ua.results.push_back({1, "smart plug", "", ""});
        d.of(FeatureType::UserAgent).push_back(ua);

        LabelResult result = label_function(d, std::nullopt, catalogs, ScoringConfig{}, oracle);
        REQUIRE(result.ranked.size() >= 2);
        CHECK(result.ranked[0].label == "camera");
    }
}

TEST_CASE("label_type combines the vendor and function labelers") {
    auto oracle = bundled_oracle();
    auto catalogs = bundled_catalogs();
    Dataset ds = load_dataset(testutil::fixture_path("ten_device_fixture.json"));

    SUBCASE("belkin plug end to end") {
        TypeLabelOutcome outcome = label_type(ds.devices[0].enriched, catalogs, ScoringConfig{},
                                              ScoringConfig{}, oracle);
        REQUIRE(outcome.type.vendor.has_value());
        REQUIRE(outcome.type.function.has_value());
        CHECK(*outcome.type.vendor == "belkin");
        CHECK(*outcome.type.function == "plug");
    }
    SUBCASE("vendor abstention labels the function against the full catalog") {
        auto device = device_with_snippet("robot vacuum cleaner review",
                                          "this robot vacuum has strong suction");
        TypeLabelOutcome outcome =
            label_type(device, catalogs, ScoringConfig{}, ScoringConfig{}, oracle);
        CHECK(outcome.vendor_result.abstained);
        CHECK_FALSE(outcome.type.vendor.has_value());
        REQUIRE(outcome.type.function.has_value());
        CHECK(*outcome.type.function == "vacuum");
        // every catalog function was considered
        CHECK(outcome.function_result.ranked.size() ==
              std::min<std::size_t>(5, catalogs.functions.size()));
    }
}

TEST_CASE("restriction to the vendor's functions never hurts the true function") {
    auto oracle = bundled_oracle();
    auto catalogs = bundled_catalogs();
    Dataset ds = load_dataset(testutil::fixture_path("ten_device_fixture.json"));
    for (const auto& d : ds.devices) {
        const std::string& vendor = d.ground_truth->vendor;
        const std::string& truth = d.ground_truth->function;
        auto rank_of = [&](const LabelResult& r) {
            for (std::size_t i = 0; i < r.ranked.size(); ++i)
                if (r.ranked[i].label == truth) return static_cast<int>(i);
            return static_cast<int>(r.ranked.size());
        };
        LabelResult narrow =
            label_function(d.enriched, vendor, catalogs, ScoringConfig{}, oracle, -1);
        LabelResult full =
            label_function(d.enriched, std::nullopt, catalogs, ScoringConfig{}, oracle, -1);
        INFO("device ", d.enriched.device.device_id);
        CHECK(rank_of(narrow) <= rank_of(full));
    }
}

TEST_CASE("function aggregation equals the brute-force reference on random fixtures") {
    auto catalogs = bundled_catalogs();
    KeywordOracleBackend oracle = bundled_oracle();
    std::mt19937_64 rng(987654);
    const auto candidates = catalogs.functions.names();
    for (int i = 0; i < 60; ++i) {
        EnrichedDevice device = fixgen::random_device(rng, 3, 2, 4);
        ScoringConfig cfg = fixgen::random_config(rng);
        LabelResult result = label_function(device, std::nullopt, catalogs, cfg, oracle, -1);
        if (!device.has_enriched_values()) {
            CHECK(result.abstained);
            continue;
        }
        REQUIRE(result.ranked.size() == candidates.size());
        for (const auto& ranked : result.ranked) {
            double slow = refimpl::ref_score_function(ranked.label, device, candidates, oracle, cfg);
            INFO("label ", ranked.label, " iteration ", i);
            CHECK(ranked.score == doctest::Approx(slow).epsilon(1e-12));
        }
    }
}

TEST_CASE("function labeling is reproducible bit for bit with the oracle") {
    auto oracle = bundled_oracle();
    auto catalogs = bundled_catalogs();
    Dataset ds = load_dataset(testutil::fixture_path("ten_device_fixture.json"));
    for (const auto& d : ds.devices) {
        LabelResult a = label_function(d.enriched, d.ground_truth->vendor, catalogs,
                                       ScoringConfig{}, oracle);
        LabelResult b = label_function(d.enriched, d.ground_truth->vendor, catalogs,
                                       ScoringConfig{}, oracle);
        REQUIRE(a.ranked.size() == b.ranked.size());
        for (std::size_t i = 0; i < a.ranked.size(); ++i) {
            CHECK(a.ranked[i].label == b.ranked[i].label);
            CHECK(a.ranked[i].score == b.ranked[i].score);
        }
    }
}
