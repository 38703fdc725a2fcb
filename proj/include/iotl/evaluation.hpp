#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iotl/dataset.hpp"
#include "iotl/enrichment.hpp"
#include "iotl/scoring.hpp"

namespace iotl {

struct EvalReport {
    double hit1 = 0.0;
    double hit2 = 0.0;
    double empty_ratio = 0.0;  // complements the labeled fraction
    std::map<std::string, double> per_feature_accuracy;
    std::map<std::string, double> per_feature_availability;
    std::size_t n_devices = 0;
};

// Fraction of devices whose true label is within the top k predictions.
// Abstentions count as misses. Every result device must appear in `truth`.
double hit_at_k(const std::map<std::string, LabelResult>& results,
                const std::map<std::string, std::string>& truth, int k);

// Fraction of devices for which the labeler abstained.
double empty_result_ratio(const std::map<std::string, LabelResult>& results);

using Labeler = std::function<LabelResult(const EnrichedDevice&, const ScoringConfig&)>;

struct PerFeatureAccuracy {
    double accuracy = 0.0;      // over devices possessing the feature
    double availability = 0.0;  // fraction of devices possessing it
};

// Runs the labeler with only the given feature type weighted, over the
// devices that possess that feature.
PerFeatureAccuracy per_feature_accuracy(const std::vector<EnrichedDevice>& devices,
                                        const std::map<std::string, std::string>& truth,
                                        const Labeler& labeler, FeatureType type,
                                        const ScoringConfig& base = {});

struct OptimizeResult {
    ScoringConfig config;
    double training_hit1 = 0.0;             // mean across folds, selected config
    double uniform_training_hit1 = 0.0;     // same objective at the uniform start
    std::vector<double> fold_test_hit1;     // selected config on each held-out fold
};

// Seeded 5-fold cross-validated coordinate search over per-type weights
// (grid {1, 0.75, 0.5, 0.25, 0}, scanned in that order) and thresholds
// (grid {0, 0.1, 0.3, 0.5}). A move is taken only when the mean training
// HIT1 strictly improves, so ties keep the earliest-enumerated config and
// the all-tie landscape returns the uniform starting point. All-zero weight
// vectors are excluded by construction.
OptimizeResult optimize_config(const std::vector<EnrichedDevice>& devices,
                               const std::map<std::string, std::string>& truth,
                               const Labeler& labeler, std::uint64_t seed, int folds = 5);

// |a n b| / |a u b|; two empty sets compare as 0.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

struct SimilarityStats {
    double mean = 0.0;
    double stddev = 0.0;  // across group means
    std::size_t groups = 0;
};

// Mean pairwise Jaccard similarity of feature-value sets within groups of
// devices sharing a (vendor, function), per feature type: averaged within
// each group, then across groups.
std::map<std::string, SimilarityStats> group_similarity_report(
    const std::vector<DeviceFeatures>& devices, const GroundTruth& truth);

// One device per distinct (vendor, function), drawn uniformly with the given
// seed; reproducible.
std::vector<std::string> select_unique_devices(const std::vector<std::string>& device_ids,
                                               const GroundTruth& truth, std::uint64_t seed);

}  // namespace iotl
