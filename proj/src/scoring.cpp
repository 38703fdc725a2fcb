#include "iotl/scoring.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "iotl/errors.hpp"
#include "iotl/text_match.hpp"

namespace iotl {

void ScoringConfig::validate() const {
    bool any_positive = false;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("weights must be finite and >= 0");
        if (w > 0.0) any_positive = true;
    }
    if (!any_positive) throw ValidationError("at least one feature-type weight must be positive");
    for (double th : thresholds) {
        if (!(th >= 0.0) || !std::isfinite(th))
            throw ValidationError("thresholds must be finite and >= 0");
    }
}

LabelResult LabelResult::from_ranked(std::vector<RankedLabel> ranked) {
    LabelResult out;
    out.ranked = std::move(ranked);
    out.abstained = out.ranked.empty();
    return out;
}

namespace {

void sort_and_trim_evidence(std::vector<EvidenceItem>& evidence) {
    std::stable_sort(evidence.begin(), evidence.end(),
                     [](const EvidenceItem& a, const EvidenceItem& b) {
                         return a.contribution > b.contribution;
                     });
    if (evidence.size() > kMaxEvidenceItems) evidence.resize(kMaxEvidenceItems);
}

}  // namespace

VendorScore score_vendor(const VendorEntry& vendor, const EnrichedDevice& device,
                         const ScoringConfig& cfg) {
    cfg.validate();
    std::vector<std::string> patterns;
    for (const auto& s : vendor.label_strings()) {
        std::string folded = fold_key(s);
        if (!folded.empty()) patterns.push_back(std::move(folded));
    }

    VendorScore out;
    for (FeatureType t : kAllFeatureTypes) {
        const auto& per_type = device.of(t);
        std::size_t n_results = 0;
        for (const auto& ef : per_type) n_results += ef.results.size();
        if (n_results == 0) continue;

        const double divisor = cfg.normalize_by_result_count ? static_cast<double>(n_results) : 1.0;
        const double w = cfg.weight(t);
        double type_sum = 0.0;
        for (const auto& ef : per_type) {
            for (const auto& r : ef.results) {
                // Title and snippet are matched separately so an excerpt is
                // always a substring of one field.
                std::vector<MatchSpan> title_spans, snippet_spans;
                int s = match_count(patterns, r.title, &title_spans) +
                        match_count(patterns, r.snippet, &snippet_spans);
                if (static_cast<double>(s) < cfg.threshold(t)) continue;
                type_sum += static_cast<double>(s);
                if (s > 0 && w > 0.0) {
                    const bool from_title = !title_spans.empty();
                    const std::string& field = from_title ? r.title : r.snippet;
                    const MatchSpan span = from_title ? title_spans.front() : snippet_spans.front();
                    EvidenceItem item;
                    item.feature_type = t;
                    item.source_value = ef.source.text;
                    item.result_rank = r.rank;
                    item.excerpt = excerpt_around(field, span);
                    item.contribution = w * static_cast<double>(s) / divisor;
                    out.evidence.push_back(std::move(item));
                }
            }
        }
        out.total += w * (type_sum / divisor);
    }
    sort_and_trim_evidence(out.evidence);
    return out;
}

LabelResult label_vendor(const EnrichedDevice& device, const VendorCatalog& vendors,
                         const ScoringConfig& cfg, int top_k) {
    if (vendors.size() == 0) throw ValidationError("vendor catalog is empty");
    std::vector<RankedLabel> ranked;
    for (const auto& entry : vendors.entries()) {
        VendorScore vs = score_vendor(entry, device, cfg);
        if (vs.total > 0.0)
            ranked.push_back(RankedLabel{entry.name, vs.total, std::move(vs.evidence)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedLabel& a, const RankedLabel& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.label < b.label;
    });
    if (top_k >= 0 && ranked.size() > static_cast<std::size_t>(top_k))
        ranked.resize(static_cast<std::size_t>(top_k));
    return LabelResult::from_ranked(std::move(ranked));
}

LabelResult oui_baseline(const DeviceFeatures& device, const OuiDatabase& db,
                         const VendorCatalog* vendors) {
    if (!device.mac) throw ValidationError("oui_baseline needs a device MAC");
    auto registrant = db.lookup(*device.mac);
    if (!registrant) return LabelResult::from_ranked({});

    std::string label = normalize_catalog_key(*registrant);
    if (vendors) {
        if (auto canonical = vendors->resolve_alias(*registrant)) label = *canonical;
    }
    RankedLabel top;
    top.label = std::move(label);
    top.score = 1.0;
    EvidenceItem item;
    item.feature_type = FeatureType::Oui;
    item.source_value = device.mac->to_string().substr(0, 8);  // the 24-bit prefix
    item.result_rank = 0;
    item.excerpt = *registrant;
    item.contribution = 1.0;
    top.evidence.push_back(std::move(item));
    return LabelResult::from_ranked({std::move(top)});
}

std::string scoring_config_to_json(const ScoringConfig& cfg) {
    nlohmann::json weights, thresholds;
    for (FeatureType t : kAllFeatureTypes) {
        weights[std::string(feature_type_name(t))] = cfg.weight(t);
        thresholds[std::string(feature_type_name(t))] = cfg.threshold(t);
    }
    nlohmann::json out{{"weights", weights},
                       {"thresholds", thresholds},
                       {"normalize", cfg.normalize_by_result_count}};
    return out.dump(2) + "\n";
}

ScoringConfig scoring_config_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ValidationError("scoring config is not a JSON object");
    ScoringConfig cfg;
    if (j.contains("weights")) {
        for (FeatureType t : kAllFeatureTypes) {
            const std::string key(feature_type_name(t));
            if (j["weights"].contains(key))
                cfg.weights[static_cast<std::size_t>(t)] = j["weights"][key].get<double>();
        }
    }
    if (j.contains("thresholds")) {
        for (FeatureType t : kAllFeatureTypes) {
            const std::string key(feature_type_name(t));
            if (j["thresholds"].contains(key))
                cfg.thresholds[static_cast<std::size_t>(t)] = j["thresholds"][key].get<double>();
        }
    }
    cfg.normalize_by_result_count = j.value("normalize", true);
    cfg.validate();
    return cfg;
}

}  // namespace iotl
