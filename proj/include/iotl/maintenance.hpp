#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iotl/backends.hpp"
#include "iotl/catalogs.hpp"
#include "iotl/enrichment.hpp"
#include "iotl/function_labeling.hpp"
#include "iotl/scoring.hpp"

namespace iotl {

// Where a catalog entry came from: the device/exchange that produced it.
struct Provenance {
    std::string source;  // "acquire:<function>" or "ner:<device_id>"
};

struct AcquiredCatalogs {
    VendorCatalog vendors;
    TypeCatalog types;
    std::map<std::string, Provenance> provenance;        // vendor -> origin
    std::vector<std::string> failed_functions;           // queries that errored
};

// Bootstraps the vendor and type catalogs by asking the chat endpoint for the
// top vendors of every seed function. Per-function failures are recorded and
// acquisition continues.
AcquiredCatalogs acquire_catalogs(const FunctionCatalog& seed_functions, ChatBackend& chat);

struct VendorUpdateReport {
    std::size_t before = 0;
    std::size_t after = 0;
    std::vector<std::string> additions;                       // new canonical vendors
    std::map<std::string, std::vector<std::string>> evidence;  // vendor -> device ids
    std::set<std::string> filtered;                            // full filter-stage output
};

// Two-stage vendor-catalog update: NER extraction over each device's enriched
// text, then the entity filter. Filtered entities not already resolvable in
// the catalog are appended as new canonical vendors. The input catalog is a
// snapshot and stays unmodified; any stage failure propagates and no partial
// catalog is produced.
std::pair<VendorCatalog, VendorUpdateReport> update_vendor_catalog(
    const std::vector<EnrichedDevice>& devices, const VendorCatalog& vendors, ChatBackend& chat,
    std::size_t chunk_chars = 8000);

// Cross-references the vendor-restricted candidate set against the full
// function catalog. When the full catalog finds a strictly better function,
// the (vendor, function) pair is verified through the chat endpoint; a
// confirmed pair is returned for type-catalog insertion. Verification
// transport failures return nullopt.
std::optional<std::pair<std::string, std::string>> update_type_catalog(
    const EnrichedDevice& device, const std::string& vendor, const Catalogs& catalogs,
    const ScoringConfig& cfg, ClassifierBackend& backend, ChatBackend& chat);

struct RelabelRecommendation {
    std::string device_id;
    std::string new_vendor;
    double new_score = 0.0;
    std::string stored_label;
    double stored_score = 0.0;
};

// Pure comparison step of the periodic re-vendor check: scores each newly
// discovered vendor against each device and recommends a relabel whenever the
// new vendor beats the stored label's score.
std::vector<RelabelRecommendation> recommend_relabels(
    const std::vector<EnrichedDevice>& devices, const std::vector<std::string>& new_vendors,
    const std::map<std::string, LabelResult>& stored, const ScoringConfig& cfg);

struct RevendorCheckResult {
    VendorUpdateReport update;
    std::vector<RelabelRecommendation> recommendations;
};

// Full periodic check: discover new vendors via the two-stage update, then
// compare their scores against the stored labeling results.
RevendorCheckResult periodic_revendor_check(const std::vector<EnrichedDevice>& devices,
                                            const VendorCatalog& vendors,
                                            const std::map<std::string, LabelResult>& stored,
                                            const ScoringConfig& cfg, ChatBackend& chat);

}  // namespace iotl
