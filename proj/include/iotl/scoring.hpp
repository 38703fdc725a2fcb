#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "iotl/catalogs.hpp"
#include "iotl/enrichment.hpp"
#include "iotl/oui.hpp"

namespace iotl {

// Per-feature-type weights and confidence thresholds for both labelers:
//   total = sum_t w_t * (sum of per-result scores >= theta_t) / n_t
// where n_t is the number of enriched results of type t (when per-type
// normalization is on; otherwise the divisor is 1).
struct ScoringConfig {
    std::array<double, kFeatureTypeCount> weights{1, 1, 1, 1, 1};
    std::array<double, kFeatureTypeCount> thresholds{0, 0, 0, 0, 0};
    bool normalize_by_result_count = true;

    double weight(FeatureType t) const { return weights[static_cast<std::size_t>(t)]; }
    double threshold(FeatureType t) const { return thresholds[static_cast<std::size_t>(t)]; }

    void validate() const;  // throws ValidationError

    friend bool operator==(const ScoringConfig&, const ScoringConfig&) = default;
};

struct EvidenceItem {
    FeatureType feature_type;
    std::string source_value;
    int result_rank = 0;
    std::string excerpt;       // verbatim substring of the matched title or snippet
    double contribution = 0.0;  // this result's share of the label's total score
};

struct RankedLabel {
    std::string label;
    double score = 0.0;
    std::vector<EvidenceItem> evidence;  // sorted by contribution descending
};

// Ranked labels with an explicit abstain marker. abstained <=> ranked empty.
struct LabelResult {
    std::vector<RankedLabel> ranked;
    bool abstained = true;

    const RankedLabel* top() const { return ranked.empty() ? nullptr : &ranked.front(); }
    static LabelResult from_ranked(std::vector<RankedLabel> ranked);
};

struct VendorScore {
    double total = 0.0;
    std::vector<EvidenceItem> evidence;
};

inline constexpr std::size_t kMaxEvidenceItems = 5;

// Weighted string-match score of one vendor against a device's enriched
// results. Per result, the per-label score is the occurrence count of the
// vendor's strings in the title and snippet; aggregation follows
// ScoringConfig.
VendorScore score_vendor(const VendorEntry& vendor, const EnrichedDevice& device,
                         const ScoringConfig& cfg);

// Scores every catalog vendor, keeps those with score > 0, and returns the
// top_k sorted by score descending, ties broken lexicographically by
// canonical name. Abstains when nothing scores above zero.
LabelResult label_vendor(const EnrichedDevice& device, const VendorCatalog& vendors,
                         const ScoringConfig& cfg, int top_k = 5);

// MAC-prefix baseline: the OUI registrant is the single label, resolved
// against the vendor catalog when possible. Abstains on unknown prefixes.
LabelResult oui_baseline(const DeviceFeatures& device, const OuiDatabase& db,
                         const VendorCatalog* vendors = nullptr);

// {"weights":{"hostname":1,...},"thresholds":{...},"normalize":true}
std::string scoring_config_to_json(const ScoringConfig& cfg);
ScoringConfig scoring_config_from_json(const std::string& text);

}  // namespace iotl
