#include "iotl/function_labeling.hpp"

#include <algorithm>
#include <map>

#include "iotl/errors.hpp"

namespace iotl {

namespace {

std::string classified_text(const SearchResult& r) {
    if (r.title.empty()) return r.snippet;
    if (r.snippet.empty()) return r.title;
    return r.title + " " + r.snippet;
}

}  // namespace

LabelResult label_function(const EnrichedDevice& device,
                           const std::optional<std::string>& vendor, const Catalogs& catalogs,
                           const ScoringConfig& cfg, ClassifierBackend& backend, int top_k) {
    cfg.validate();
    if (catalogs.functions.size() == 0) throw ValidationError("function catalog is empty");
    if (!device.has_enriched_values()) return LabelResult::from_ranked({});

    const std::vector<std::string> candidates =
        candidate_functions(vendor, catalogs.types, catalogs.functions);

    struct Accumulator {
        double total = 0.0;
        std::vector<EvidenceItem> evidence;
    };
    std::map<std::string, Accumulator> scores;
    for (const auto& label : candidates) scores[label];

    for (FeatureType t : kAllFeatureTypes) {
        const auto& per_type = device.of(t);
        std::size_t n_results = 0;
        for (const auto& ef : per_type) n_results += ef.results.size();
        if (n_results == 0) continue;
        const double divisor = cfg.normalize_by_result_count ? static_cast<double>(n_results) : 1.0;
        const double w = cfg.weight(t);

        // Per-type sums accumulate in a fixed fold order (value, then rank),
        // so results are bit-identical regardless of backend call latency.
        std::map<std::string, double> type_sum;
        for (const auto& ef : per_type) {
            for (const auto& r : ef.results) {
                const std::string text = classified_text(r);
                auto per_result = classify_text(text, candidates, backend);
                for (const auto& score : per_result) {
                    if (score.confidence < cfg.threshold(t)) continue;
                    type_sum[score.label] += score.confidence;
                    if (score.confidence > 0.0 && w > 0.0) {
                        EvidenceItem item;
                        item.feature_type = t;
                        item.source_value = ef.source.text;
                        item.result_rank = r.rank;
                        item.excerpt = r.title.empty() ? r.snippet.substr(0, 160)
                                                       : r.title.substr(0, 160);
                        item.contribution = w * score.confidence / divisor;
                        scores[score.label].evidence.push_back(std::move(item));
                    }
                }
            }
        }
        for (auto& [label, sum] : type_sum) scores[label].total += w * (sum / divisor);
    }

    std::vector<RankedLabel> ranked;
    ranked.reserve(scores.size());
    for (auto& [label, acc] : scores) {
        std::stable_sort(acc.evidence.begin(), acc.evidence.end(),
                         [](const EvidenceItem& a, const EvidenceItem& b) {
                             return a.contribution > b.contribution;
                         });
        if (acc.evidence.size() > kMaxEvidenceItems) acc.evidence.resize(kMaxEvidenceItems);
        ranked.push_back(RankedLabel{label, acc.total, std::move(acc.evidence)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedLabel& a, const RankedLabel& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.label < b.label;
    });
    if (top_k >= 0 && ranked.size() > static_cast<std::size_t>(top_k))
        ranked.resize(static_cast<std::size_t>(top_k));
    return LabelResult::from_ranked(std::move(ranked));
}

TypeLabelOutcome label_type(const EnrichedDevice& device, const Catalogs& catalogs,
                            const ScoringConfig& function_cfg, const ScoringConfig& vendor_cfg,
                            ClassifierBackend& backend, int top_k) {
    TypeLabelOutcome out;
    out.vendor_result = label_vendor(device, catalogs.vendors, vendor_cfg, top_k);
    std::optional<std::string> vendor;
    if (const RankedLabel* top = out.vendor_result.top()) vendor = top->label;
    out.function_result = label_function(device, vendor, catalogs, function_cfg, backend, top_k);
    out.type.vendor = vendor;
    if (const RankedLabel* top = out.function_result.top()) out.type.function = top->label;
    return out;
}

}  // namespace iotl
