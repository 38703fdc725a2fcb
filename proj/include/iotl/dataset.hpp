#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iotl/enrichment.hpp"
#include "iotl/features.hpp"

namespace iotl {

struct GroundTruthLabel {
    std::string vendor;
    std::string function;

    friend bool operator==(const GroundTruthLabel&, const GroundTruthLabel&) = default;
};

using GroundTruth = std::map<std::string, GroundTruthLabel>;  // device_id -> label

struct DatasetDevice {
    EnrichedDevice enriched;  // features plus any attached search results
    std::optional<GroundTruthLabel> ground_truth;

    friend bool operator==(const DatasetDevice&, const DatasetDevice&) = default;
};

// The dataset document:
// {"devices":[{"device_id":str, "mac":str|null, "ground_truth":{...}|null,
//   "features":{"hostname":[str],...}, "enriched":{"<type>":{"<value>":[results]}}}]}
struct Dataset {
    std::vector<DatasetDevice> devices;

    GroundTruth ground_truth() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Parses and validates a dataset document. Violations raise ValidationError
// whose message carries the JSON path of the offending node. Feature values
// are normalized on import; enriched results are re-attached in feature-value
// order so loading is deterministic.
Dataset load_dataset(const std::filesystem::path& path,
                     const PublicSuffixList& psl = PublicSuffixList::bundled());
Dataset dataset_from_json(const std::string& text,
                          const PublicSuffixList& psl = PublicSuffixList::bundled());

// Canonical serialization: keys sorted, two-space indent, trailing newline.
// Exporting and re-importing a dataset yields an equal Dataset value.
std::string dataset_to_json(const Dataset& dataset);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

// Wraps extraction output in a dataset document (no enrichment, no truth).
Dataset dataset_from_features(const std::vector<DeviceFeatures>& devices);

}  // namespace iotl
