#include "iotl/maintenance.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "iotl/errors.hpp"

namespace iotl {

using nlohmann::json;

namespace {

std::optional<json> embedded_array(const std::string& text) {
    std::size_t start = text.find('[');
    while (start != std::string::npos) {
        int depth = 0;
        bool in_string = false, escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '[') ++depth;
            else if (c == ']' && --depth == 0) {
                json j = json::parse(text.substr(start, i - start + 1), nullptr, false);
                if (!j.is_discarded()) return j;
                break;
            }
        }
        start = text.find('[', start + 1);
    }
    return std::nullopt;
}

std::vector<std::string> device_enriched_texts(const EnrichedDevice& device) {
    std::vector<std::string> texts;
    for (const auto& per_type : device.enriched) {
        for (const auto& ef : per_type) {
            for (const auto& r : ef.results) {
                std::string text = r.title;
                if (!r.snippet.empty()) {
                    if (!text.empty()) text += ' ';
                    text += r.snippet;
                }
                if (!text.empty()) texts.push_back(std::move(text));
            }
        }
    }
    return texts;
}

}  // namespace

AcquiredCatalogs acquire_catalogs(const FunctionCatalog& seed_functions, ChatBackend& chat) {
    if (seed_functions.size() == 0)
        throw ValidationError("catalog acquisition needs a non-empty function catalog");

    AcquiredCatalogs out;
    std::vector<VendorEntry> vendors;
    std::set<std::string> seen_vendors;
    std::set<std::pair<std::string, std::string>> pairs;

    for (const auto& function : seed_functions.names()) {
        std::ostringstream user;
        user << kAcquireMarker << " [function:" << function << "]\n"
             << "List the top vendors that manufacture IoT " << function
             << " devices. Reply with a JSON array of vendor names and nothing else.\n";
        try {
            ChatExchange exchange =
                chat.send("You are an expert on the IoT device market.", user.str());
            auto arr = embedded_array(exchange.response);
            if (!arr || !arr->is_array())
                throw ContractError("acquisition reply did not contain a JSON array");
            for (const auto& v : *arr) {
                if (!v.is_string()) continue;
                std::string name = normalize_catalog_key(v.get<std::string>());
                if (name.empty()) continue;
                if (seen_vendors.insert(name).second) {
                    vendors.push_back(VendorEntry{name, {}});
                    out.provenance[name] = Provenance{"acquire:" + function};
                }
                pairs.emplace(name, function);
            }
        } catch (const Error&) {
            out.failed_functions.push_back(function);
        }
    }
    out.vendors = VendorCatalog(std::move(vendors));
    out.types = TypeCatalog(std::move(pairs));
    return out;
}

std::pair<VendorCatalog, VendorUpdateReport> update_vendor_catalog(
    const std::vector<EnrichedDevice>& devices, const VendorCatalog& vendors, ChatBackend& chat,
    std::size_t chunk_chars) {
    VendorUpdateReport report;
    report.before = vendors.size();

    // NER runs per device so every discovered entity keeps its provenance.
    std::map<std::string, std::vector<std::string>> entity_devices;
    for (const auto& device : devices) {
        auto texts = device_enriched_texts(device);
        if (texts.empty()) continue;
        for (const auto& entity : ner_extract(texts, chat, chunk_chars)) {
            auto& ids = entity_devices[entity];
            if (std::find(ids.begin(), ids.end(), device.device.device_id) == ids.end())
                ids.push_back(device.device.device_id);
        }
    }

    std::set<std::string> entities;
    for (const auto& [entity, _] : entity_devices) entities.insert(entity);

    if (!entities.empty()) report.filtered = filter_entities(entities, chat);

    VendorCatalog updated = vendors;
    for (const auto& entity : report.filtered) {
        if (vendors.resolve_alias(entity)) continue;  // already known
        updated = updated.with_vendor(entity);
        report.additions.push_back(normalize_catalog_key(entity));
        report.evidence[normalize_catalog_key(entity)] = entity_devices[entity];
    }
    report.after = updated.size();
    return {std::move(updated), std::move(report)};
}

std::optional<std::pair<std::string, std::string>> update_type_catalog(
    const EnrichedDevice& device, const std::string& vendor, const Catalogs& catalogs,
    const ScoringConfig& cfg, ClassifierBackend& backend, ChatBackend& chat) {
    LabelResult narrow = label_function(device, vendor, catalogs, cfg, backend);
    // Full-catalog pass: an unknown vendor falls back to all functions.
    LabelResult full = label_function(device, std::nullopt, catalogs, cfg, backend);

    const RankedLabel* narrow_top = narrow.top();
    const RankedLabel* full_top = full.top();
    if (!full_top || !narrow_top) return std::nullopt;
    if (full_top->label == narrow_top->label) return std::nullopt;
    if (!(full_top->score > narrow_top->score)) return std::nullopt;

    std::ostringstream user;
    user << kVerifyMarker << " [vendor:" << vendor << "] [function:" << full_top->label << "]\n"
         << "Does " << vendor << " manufacture " << full_top->label
         << " devices? Reply with JSON {\"confirmed\": true or false}.\n";
    try {
        ChatExchange exchange = chat.send("You verify IoT vendor capabilities.", user.str());
        json j = json::parse(exchange.response, nullptr, false);
        if (j.is_discarded()) {
            std::size_t brace = exchange.response.find('{');
            if (brace == std::string::npos) return std::nullopt;
            j = json::parse(exchange.response.substr(brace), nullptr, false);
            if (j.is_discarded()) return std::nullopt;
        }
        if (j.value("confirmed", false)) return std::make_pair(vendor, full_top->label);
    } catch (const TransportError&) {
        return std::nullopt;  // verification unreachable: no update, event logged by caller
    }
    return std::nullopt;
}

std::vector<RelabelRecommendation> recommend_relabels(
    const std::vector<EnrichedDevice>& devices, const std::vector<std::string>& new_vendors,
    const std::map<std::string, LabelResult>& stored, const ScoringConfig& cfg) {
    std::vector<RelabelRecommendation> out;
    if (new_vendors.empty()) return out;
    for (const auto& device : devices) {
        auto it = stored.find(device.device.device_id);
        if (it == stored.end()) continue;
        const RankedLabel* top = it->second.top();
        const double stored_score = top ? top->score : 0.0;
        for (const auto& vendor : new_vendors) {
            VendorEntry entry{vendor, {}};
            VendorScore score = score_vendor(entry, device, cfg);
            if (score.total > stored_score) {
                out.push_back({device.device.device_id, vendor, score.total,
                               top ? top->label : "", stored_score});
            }
        }
    }
    return out;
}

RevendorCheckResult periodic_revendor_check(const std::vector<EnrichedDevice>& devices,
                                            const VendorCatalog& vendors,
                                            const std::map<std::string, LabelResult>& stored,
                                            const ScoringConfig& cfg, ChatBackend& chat) {
    RevendorCheckResult out;
    auto [updated, report] = update_vendor_catalog(devices, vendors, chat);
    out.update = std::move(report);
    out.recommendations = recommend_relabels(devices, out.update.additions, stored, cfg);
    return out;
}

}  // namespace iotl
