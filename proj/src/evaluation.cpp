#include "iotl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "iotl/errors.hpp"

namespace iotl {

double hit_at_k(const std::map<std::string, LabelResult>& results,
                const std::map<std::string, std::string>& truth, int k) {
    if (results.empty()) throw ValidationError("hit_at_k needs at least one result");
    if (k < 1) throw ValidationError("k must be >= 1");
    std::size_t hits = 0;
    for (const auto& [device_id, result] : results) {
        auto it = truth.find(device_id);
        if (it == truth.end())
            throw ValidationError("device '" + device_id + "' missing from ground truth");
        const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(k),
                                                      result.ranked.size());
        for (std::size_t i = 0; i < top; ++i) {
            if (result.ranked[i].label == it->second) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(results.size());
}

double empty_result_ratio(const std::map<std::string, LabelResult>& results) {
    if (results.empty()) return 0.0;
    std::size_t abstained = 0;
    for (const auto& [_, result] : results)
        if (result.abstained) ++abstained;
    return static_cast<double>(abstained) / static_cast<double>(results.size());
}

PerFeatureAccuracy per_feature_accuracy(const std::vector<EnrichedDevice>& devices,
                                        const std::map<std::string, std::string>& truth,
                                        const Labeler& labeler, FeatureType type,
                                        const ScoringConfig& base) {
    PerFeatureAccuracy out;
    if (devices.empty()) return out;

    ScoringConfig single = base;
    single.weights = {0, 0, 0, 0, 0};
    single.weights[static_cast<std::size_t>(type)] = 1.0;

    std::size_t possessing = 0, correct = 0;
    for (const auto& device : devices) {
        if (device.device.of(type).empty()) continue;
        ++possessing;
        auto it = truth.find(device.device.device_id);
        if (it == truth.end()) continue;
        LabelResult result = labeler(device, single);
        if (const RankedLabel* top = result.top(); top && top->label == it->second) ++correct;
    }
    out.availability = static_cast<double>(possessing) / static_cast<double>(devices.size());
    out.accuracy = possessing == 0 ? 0.0
                                   : static_cast<double>(correct) / static_cast<double>(possessing);
    return out;
}

namespace {

// Weight grid scanned high to low and threshold grid low to high: the very
// first candidate enumerated is the uniform config, which the search starts
// from, so a landscape of ties returns uniform.
constexpr std::array<double, 5> kWeightGrid = {1.0, 0.75, 0.5, 0.25, 0.0};
constexpr std::array<double, 4> kThresholdGrid = {0.0, 0.1, 0.3, 0.5};

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int folds, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(folds));
    for (std::size_t i = 0; i < n; ++i) out[i % static_cast<std::size_t>(folds)].push_back(order[i]);
    return out;
}

bool all_weights_zero(const ScoringConfig& cfg) {
    return std::all_of(cfg.weights.begin(), cfg.weights.end(), [](double w) { return w == 0.0; });
}

}  // namespace

OptimizeResult optimize_config(const std::vector<EnrichedDevice>& devices,
                               const std::map<std::string, std::string>& truth,
                               const Labeler& labeler, std::uint64_t seed, int folds) {
    if (folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
    if (devices.size() < static_cast<std::size_t>(folds))
        throw ValidationError("need at least one device per fold");

    const auto fold_members = make_folds(devices.size(), folds, seed);

    auto hit1_over = [&](const std::vector<std::size_t>& subset, const ScoringConfig& cfg) {
        if (subset.empty()) return 0.0;
        std::size_t hits = 0;
        for (std::size_t idx : subset) {
            const auto& device = devices[idx];
            auto it = truth.find(device.device.device_id);
            if (it == truth.end())
                throw ValidationError("device '" + device.device.device_id +
                                      "' missing from ground truth");
            LabelResult result = labeler(device, cfg);
            if (const RankedLabel* top = result.top(); top && top->label == it->second) ++hits;
        }
        return static_cast<double>(hits) / static_cast<double>(subset.size());
    };

    // training members per fold = everything outside the fold
    std::vector<std::vector<std::size_t>> training(fold_members.size());
    for (std::size_t f = 0; f < fold_members.size(); ++f) {
        for (std::size_t g = 0; g < fold_members.size(); ++g) {
            if (g == f) continue;
            training[f].insert(training[f].end(), fold_members[g].begin(), fold_members[g].end());
        }
    }

    auto objective = [&](const ScoringConfig& cfg) {
        double sum = 0.0;
        for (const auto& members : training) sum += hit1_over(members, cfg);
        return sum / static_cast<double>(training.size());
    };

    ScoringConfig current;  // uniform start: w = 1 everywhere, theta = 0
    double best = objective(current);
    const double uniform_objective = best;

    constexpr int kMaxPasses = 3;
    for (int pass = 0; pass < kMaxPasses; ++pass) {
        bool moved = false;
        for (std::size_t t = 0; t < kFeatureTypeCount; ++t) {
            for (double w : kWeightGrid) {
                if (w == current.weights[t]) continue;
                ScoringConfig candidate = current;
                candidate.weights[t] = w;
                if (all_weights_zero(candidate)) continue;
                double score = objective(candidate);
                if (score > best) {
                    best = score;
                    current = candidate;
                    moved = true;
                }
            }
        }
        for (std::size_t t = 0; t < kFeatureTypeCount; ++t) {
            for (double th : kThresholdGrid) {
                if (th == current.thresholds[t]) continue;
                ScoringConfig candidate = current;
                candidate.thresholds[t] = th;
                double score = objective(candidate);
                if (score > best) {
                    best = score;
                    current = candidate;
                    moved = true;
                }
            }
        }
        if (!moved) break;
    }

    OptimizeResult out;
    out.config = current;
    out.training_hit1 = best;
    out.uniform_training_hit1 = uniform_objective;
    for (const auto& members : fold_members) out.fold_test_hit1.push_back(hit1_over(members, current));
    return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t intersection = 0;
    for (const auto& x : a)
        if (b.count(x)) ++intersection;
    const std::size_t uni = a.size() + b.size() - intersection;
    return static_cast<double>(intersection) / static_cast<double>(uni);
}

std::map<std::string, SimilarityStats> group_similarity_report(
    const std::vector<DeviceFeatures>& devices, const GroundTruth& truth) {
    std::map<std::pair<std::string, std::string>, std::vector<const DeviceFeatures*>> groups;
    for (const auto& device : devices) {
        auto it = truth.find(device.device_id);
        if (it == truth.end()) continue;
        groups[{it->second.vendor, it->second.function}].push_back(&device);
    }

    std::map<std::string, std::vector<double>> group_means;  // type -> mean per group
    bool any_group = false;
    for (const auto& [key, members] : groups) {
        if (members.size() < 2) continue;
        any_group = true;
        for (FeatureType t : kAllFeatureTypes) {
            std::vector<double> pair_sims;
            for (std::size_t i = 0; i < members.size(); ++i) {
                for (std::size_t j = i + 1; j < members.size(); ++j) {
                    std::set<std::string> a, b;
                    for (const auto& v : members[i]->of(t)) a.insert(v.text);
                    for (const auto& v : members[j]->of(t)) b.insert(v.text);
                    pair_sims.push_back(jaccard(a, b));
                }
            }
            double mean = 0.0;
            for (double s : pair_sims) mean += s;
            mean /= static_cast<double>(pair_sims.size());
            group_means[std::string(feature_type_name(t))].push_back(mean);
        }
    }
    if (!any_group)
        throw ValidationError("similarity report needs at least one group with two devices");

    std::map<std::string, SimilarityStats> out;
    for (const auto& [type, means] : group_means) {
        SimilarityStats stats;
        stats.groups = means.size();
        for (double m : means) stats.mean += m;
        stats.mean /= static_cast<double>(means.size());
        double var = 0.0;
        for (double m : means) var += (m - stats.mean) * (m - stats.mean);
        stats.stddev = std::sqrt(var / static_cast<double>(means.size()));
        out[type] = stats;
    }
    return out;
}

std::vector<std::string> select_unique_devices(const std::vector<std::string>& device_ids,
                                               const GroundTruth& truth, std::uint64_t seed) {
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> groups;
    for (const auto& id : device_ids) {
        auto it = truth.find(id);
        if (it == truth.end())
            throw ValidationError("device '" + id + "' missing from ground truth");
        groups[{it->second.vendor, it->second.function}].push_back(id);
    }
    std::mt19937_64 rng(seed);
    std::set<std::string> chosen;
    for (auto& [key, members] : groups) {  // std::map: deterministic group order
        std::sort(members.begin(), members.end());
        std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
        chosen.insert(members[pick(rng)]);
    }
    std::vector<std::string> out;
    for (const auto& id : device_ids)
        if (chosen.count(id)) out.push_back(id);
    return out;
}

}  // namespace iotl
