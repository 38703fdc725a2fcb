#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iotl/backends.hpp"
#include "iotl/catalogs.hpp"
#include "iotl/enrichment.hpp"
#include "iotl/scoring.hpp"

namespace iotl {

// Combined device type. Both parts are reported even when the pair is absent
// from the type catalog; that mismatch is the new-type signal the catalog
// updater looks for.
struct TypeLabel {
    std::optional<std::string> vendor;
    std::optional<std::string> function;
};

// Zero-shot-classifies every enriched result of the device against the
// vendor's candidate functions (full catalog when the vendor is unknown or
// has no type entries). Aggregation follows ScoringConfig exactly as in
// vendor scoring, with classifier confidences in place of match counts.
// Abstains only when the device has no enriched results at all.
LabelResult label_function(const EnrichedDevice& device,
                           const std::optional<std::string>& vendor, const Catalogs& catalogs,
                           const ScoringConfig& cfg, ClassifierBackend& backend, int top_k = 5);

struct TypeLabelOutcome {
    TypeLabel type;
    LabelResult vendor_result;
    LabelResult function_result;
};

// Runs vendor labeling, then function labeling with the winning vendor.
TypeLabelOutcome label_type(const EnrichedDevice& device, const Catalogs& catalogs,
                            const ScoringConfig& function_cfg, const ScoringConfig& vendor_cfg,
                            ClassifierBackend& backend, int top_k = 5);

}  // namespace iotl
