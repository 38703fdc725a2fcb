#include "iotl/reports.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "iotl/errors.hpp"

namespace iotl {

using nlohmann::json;

namespace {

json label_result_to_json(const LabelResult& result) {
    json out;
    const RankedLabel* top = result.top();
    out["label"] = top ? json(top->label) : json(nullptr);
    out["score"] = top ? top->score : 0.0;
    json top2 = json::array();
    for (std::size_t i = 0; i < result.ranked.size() && i < 2; ++i)
        top2.push_back(result.ranked[i].label);
    out["top2"] = top2;
    out["abstained"] = result.abstained;
    json ranked = json::array();
    for (const auto& r : result.ranked) {
        json evidence = json::array();
        for (const auto& e : r.evidence) {
            evidence.push_back({{"type", std::string(feature_type_name(e.feature_type))},
                                {"value", e.source_value},
                                {"rank", e.result_rank},
                                {"excerpt", e.excerpt},
                                {"contribution", e.contribution}});
        }
        ranked.push_back({{"label", r.label}, {"score", r.score}, {"evidence", evidence}});
    }
    out["ranked"] = ranked;
    return out;
}

LabelResult label_result_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("ranked") || !j["ranked"].is_array())
        throw ValidationError("malformed label result", where);
    std::vector<RankedLabel> ranked;
    for (const auto& r : j["ranked"]) {
        RankedLabel label;
        label.label = r.value("label", "");
        label.score = r.value("score", 0.0);
        if (r.contains("evidence") && r["evidence"].is_array()) {
            for (const auto& e : r["evidence"]) {
                EvidenceItem item;
                auto type = feature_type_from_name(e.value("type", ""));
                if (!type) throw ValidationError("unknown feature type in evidence", where);
                item.feature_type = *type;
                item.source_value = e.value("value", "");
                item.result_rank = e.value("rank", 0);
                item.excerpt = e.value("excerpt", "");
                item.contribution = e.value("contribution", 0.0);
                label.evidence.push_back(std::move(item));
            }
        }
        ranked.push_back(std::move(label));
    }
    return LabelResult::from_ranked(std::move(ranked));
}

json report_to_json_value(const DeviceReport& report) {
    json out;
    out["device_id"] = report.device_id;
    out["vendor"] = label_result_to_json(report.vendor);
    out["function"] = label_result_to_json(report.function);
    out["type"] = json::array({report.type.vendor ? json(*report.type.vendor) : json(nullptr),
                               report.type.function ? json(*report.type.function) : json(nullptr)});
    return out;
}

}  // namespace

std::string report_to_json(const DeviceReport& report) {
    return report_to_json_value(report).dump(2) + "\n";
}

DeviceReport report_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ValidationError("report is not a JSON object");
    DeviceReport report;
    report.device_id = j.value("device_id", "");
    if (report.device_id.empty()) throw ValidationError("report missing device_id");
    report.vendor = label_result_from_json(j["vendor"], report.device_id + "/vendor");
    report.function = label_result_from_json(j["function"], report.device_id + "/function");
    if (j.contains("type") && j["type"].is_array() && j["type"].size() == 2) {
        if (j["type"][0].is_string()) report.type.vendor = j["type"][0].get<std::string>();
        if (j["type"][1].is_string()) report.type.function = j["type"][1].get<std::string>();
    }
    return report;
}

std::string reports_to_json(const std::vector<DeviceReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(report_to_json_value(r));
    return json{{"reports", arr}}.dump(2) + "\n";
}

std::vector<DeviceReport> load_reports_dir(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".json" && entry.path().filename() != "summary.json")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<DeviceReport> out;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        out.push_back(report_from_json(ss.str()));
    }
    return out;
}

std::string report_filename(const std::string& device_id) {
    std::string out;
    for (char c : device_id) {
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
            c == '-' || c == '_' || c == '.')
            out.push_back(c);
        else
            out.push_back('-');
    }
    return out + ".json";
}

}  // namespace iotl
