#include "iotl/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "iotl/catalogs.hpp"
#include "iotl/errors.hpp"

namespace iotl {

using nlohmann::json;

GroundTruth Dataset::ground_truth() const {
    GroundTruth truth;
    for (const auto& d : devices) {
        if (d.ground_truth) truth[d.enriched.device.device_id] = *d.ground_truth;
    }
    return truth;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ValidationError(msg, path);
}

std::vector<SearchResult> parse_result_array(const json& arr, const std::string& path) {
    if (!arr.is_array()) fail(path, "expected an array of search results");
    std::vector<SearchResult> results;
    std::set<int> seen_ranks;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string rpath = path + "/" + std::to_string(i);
        const auto& r = arr[i];
        if (!r.is_object()) fail(rpath, "expected a result object");
        SearchResult sr;
        if (!r.contains("rank") || !r["rank"].is_number_integer())
            fail(rpath + "/rank", "expected integer rank");
        sr.rank = r["rank"].get<int>();
        if (sr.rank < 1) fail(rpath + "/rank", "rank must be >= 1");
        if (!seen_ranks.insert(sr.rank).second) fail(rpath + "/rank", "duplicate rank");
        auto read_str = [&](const char* key) -> std::string {
            if (!r.contains(key)) return "";
            if (!r[key].is_string()) fail(rpath + "/" + key, "expected string");
            return r[key].get<std::string>();
        };
        sr.title = read_str("title");
        sr.snippet = read_str("snippet");
        sr.url = read_str("url");
        if (sr.title.empty() && sr.snippet.empty())
            fail(rpath, "title and snippet must not both be empty");
        results.push_back(std::move(sr));
    }
    std::sort(results.begin(), results.end(),
              [](const SearchResult& a, const SearchResult& b) { return a.rank < b.rank; });
    return results;
}

}  // namespace

Dataset dataset_from_json(const std::string& text, const PublicSuffixList& psl) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) fail("/", "document is not valid JSON");
    if (!doc.is_object() || !doc.contains("devices") || !doc["devices"].is_array())
        fail("/devices", "expected top-level object with a 'devices' array");

    Dataset dataset;
    const auto& devices = doc["devices"];
    for (std::size_t i = 0; i < devices.size(); ++i) {
        const std::string dpath = "/devices/" + std::to_string(i);
        const auto& d = devices[i];
        if (!d.is_object()) fail(dpath, "expected a device object");

        DatasetDevice out;
        DeviceFeatures& feat = out.enriched.device;
        if (!d.contains("device_id") || !d["device_id"].is_string())
            fail(dpath + "/device_id", "expected string device_id");
        feat.device_id = d["device_id"].get<std::string>();
        if (feat.device_id.empty()) fail(dpath + "/device_id", "device_id must be non-empty");

        if (d.contains("mac") && !d["mac"].is_null()) {
            if (!d["mac"].is_string()) fail(dpath + "/mac", "expected string or null");
            auto mac = MacAddress::parse(d["mac"].get<std::string>());
            if (!mac) fail(dpath + "/mac", "not a 48-bit MAC address");
            feat.mac = *mac;
        }

        if (d.contains("ground_truth") && !d["ground_truth"].is_null()) {
            const auto& gt = d["ground_truth"];
            if (!gt.is_object() || !gt.contains("vendor") || !gt.contains("function") ||
                !gt["vendor"].is_string() || !gt["function"].is_string())
                fail(dpath + "/ground_truth", "expected {\"vendor\":str,\"function\":str}");
            out.ground_truth = GroundTruthLabel{
                normalize_catalog_key(gt["vendor"].get<std::string>()),
                normalize_catalog_key(gt["function"].get<std::string>())};
        }

        if (d.contains("features")) {
            const auto& features = d["features"];
            if (!features.is_object()) fail(dpath + "/features", "expected object");
            for (const auto& [key, value] : features.items()) {
                auto type = feature_type_from_name(key);
                if (!type) fail(dpath + "/features/" + key, "unknown feature type");
                if (!value.is_array()) fail(dpath + "/features/" + key, "expected array");
                for (std::size_t vi = 0; vi < value.size(); ++vi) {
                    if (!value[vi].is_string())
                        fail(dpath + "/features/" + key + "/" + std::to_string(vi),
                             "expected string");
                    feat.add_value(*type, value[vi].get<std::string>(), psl);
                }
            }
        }

        if (d.contains("enriched") && !d["enriched"].is_null()) {
            const auto& enriched = d["enriched"];
            if (!enriched.is_object()) fail(dpath + "/enriched", "expected object");
            for (const auto& [key, per_value] : enriched.items()) {
                const std::string epath = dpath + "/enriched/" + key;
                auto type = feature_type_from_name(key);
                if (!type) fail(epath, "unknown feature type");
                if (!per_value.is_object()) fail(epath, "expected object keyed by feature value");

                // Re-attach in feature-value order for deterministic loading.
                std::set<std::string> remaining;
                for (const auto& [value_key, _] : per_value.items()) remaining.insert(value_key);
                for (const auto& fv : feat.of(*type)) {
                    auto it = per_value.find(fv.text);
                    if (it == per_value.end()) continue;
                    EnrichedFeature ef;
                    ef.source = fv;
                    ef.results = parse_result_array(*it, epath + "/" + fv.text);
                    out.enriched.of(*type).push_back(std::move(ef));
                    remaining.erase(fv.text);
                }
                if (!remaining.empty())
                    fail(epath + "/" + *remaining.begin(),
                         "enriched value is not a feature value of this device");
            }
        }
        dataset.devices.push_back(std::move(out));
    }
    return dataset;
}

Dataset load_dataset(const std::filesystem::path& path, const PublicSuffixList& psl) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open dataset file", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return dataset_from_json(ss.str(), psl);
}

std::string dataset_to_json(const Dataset& dataset) {
    json doc;
    doc["devices"] = json::array();
    for (const auto& d : dataset.devices) {
        const DeviceFeatures& feat = d.enriched.device;
        json jd;
        jd["device_id"] = feat.device_id;
        jd["mac"] = feat.mac ? json(feat.mac->to_string()) : json(nullptr);
        if (d.ground_truth) {
            jd["ground_truth"] = {{"vendor", d.ground_truth->vendor},
                                  {"function", d.ground_truth->function}};
        } else {
            jd["ground_truth"] = nullptr;
        }
        json features = json::object();
        json enriched = json::object();
        for (FeatureType t : kAllFeatureTypes) {
            json values = json::array();
            for (const auto& v : feat.of(t)) values.push_back(v.text);
            features[std::string(feature_type_name(t))] = values;

            json per_value = json::object();
            for (const auto& ef : d.enriched.of(t)) {
                json results = json::array();
                for (const auto& r : ef.results) {
                    results.push_back({{"rank", r.rank},
                                       {"title", r.title},
                                       {"snippet", r.snippet},
                                       {"url", r.url}});
                }
                per_value[ef.source.text] = results;
            }
            enriched[std::string(feature_type_name(t))] = per_value;
        }
        jd["features"] = features;
        jd["enriched"] = enriched;
        doc["devices"].push_back(std::move(jd));
    }
    return doc.dump(2) + "\n";
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write dataset file", path.string());
    out << dataset_to_json(dataset);
}

Dataset dataset_from_features(const std::vector<DeviceFeatures>& devices) {
    Dataset dataset;
    dataset.devices.reserve(devices.size());
    for (const auto& d : devices) {
        DatasetDevice dd;
        dd.enriched.device = d;
        dataset.devices.push_back(std::move(dd));
    }
    return dataset;
}

}  // namespace iotl
