#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "iotl/function_labeling.hpp"
#include "iotl/scoring.hpp"

namespace iotl {

struct DeviceReport {
    std::string device_id;
    LabelResult vendor;
    LabelResult function;
    TypeLabel type;
};

// Label report document:
// {"device_id":..., "vendor":{"label":...,"score":...,"top2":[...],"abstained":bool,
//   "evidence":[{type,value,rank,excerpt,contribution}]}, "function":{...},
//   "type":[vendor,function]}
std::string report_to_json(const DeviceReport& report);
DeviceReport report_from_json(const std::string& text);

std::string reports_to_json(const std::vector<DeviceReport>& reports);  // combined summary
std::vector<DeviceReport> load_reports_dir(const std::filesystem::path& dir);

// Filesystem-safe name for per-device report files ("aa:bb" -> "aa-bb").
std::string report_filename(const std::string& device_id);

}  // namespace iotl
