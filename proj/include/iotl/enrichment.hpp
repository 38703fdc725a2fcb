#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "iotl/features.hpp"

namespace iotl {

struct SearchResult {
    int rank = 0;  // 1-based, unique within one query's list
    std::string title;
    std::string snippet;
    std::string url;

    friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

// Up to k top search results attached to one feature value.
struct EnrichedFeature {
    FeatureValue source;
    std::vector<SearchResult> results;  // sorted by rank ascending

    friend bool operator==(const EnrichedFeature&, const EnrichedFeature&) = default;
};

struct EnrichedDevice {
    DeviceFeatures device;
    std::array<std::vector<EnrichedFeature>, kFeatureTypeCount> enriched;

    std::vector<EnrichedFeature>& of(FeatureType t) { return enriched[static_cast<std::size_t>(t)]; }
    const std::vector<EnrichedFeature>& of(FeatureType t) const {
        return enriched[static_cast<std::size_t>(t)];
    }

    std::size_t total_results() const;
    bool has_enriched_values() const;

    friend bool operator==(const EnrichedDevice&, const EnrichedDevice&) = default;
};

// Abstract search provider. Implementations must return results sorted by
// rank ascending; the full list is returned (truncation happens per call).
class SearchProvider {
  public:
    virtual ~SearchProvider() = default;
    virtual std::vector<SearchResult> search(const std::string& query, int k) = 0;
};

struct RetryPolicy {
    int max_attempts = 3;
    int backoff_base_ms = 200;
    int timeout_sec = 10;
};

// SerpAPI-compatible HTTP provider:
//   GET /search?q=<query>&num=<k>  ->  {"results":[{rank,title,snippet,url},...]}
// Transport failures are retried with exponential backoff; HTTP 429 raises
// QuotaError without retry.
class HttpSearchProvider : public SearchProvider {
  public:
    explicit HttpSearchProvider(std::string base_url, RetryPolicy policy = {});
    std::vector<SearchResult> search(const std::string& query, int k) override;

  private:
    std::string base_url_;
    RetryPolicy policy_;
};

// In-memory provider backed by a fixed table; used for fixtures and tests.
class FixtureSearchProvider : public SearchProvider {
  public:
    explicit FixtureSearchProvider(std::map<std::string, std::vector<SearchResult>> table)
        : table_(std::move(table)) {}
    std::vector<SearchResult> search(const std::string& query, int k) override;
    int calls() const { return calls_; }

  private:
    std::map<std::string, std::vector<SearchResult>> table_;
    int calls_ = 0;
};

// Persistent query -> results cache. One JSON document per query under a
// content-hash filename plus an index.json mapping query strings to files,
// so fixtures can be committed and replayed byte-for-byte.
class EnrichmentCache {
  public:
    explicit EnrichmentCache(std::filesystem::path dir);

    std::optional<std::vector<SearchResult>> get(const std::string& query) const;
    void put(const std::string& query, const std::vector<SearchResult>& results,
             std::int64_t fetched_at_unix = 0);

    bool contains(const std::string& query) const;
    std::size_t size() const;
    const std::filesystem::path& dir() const { return dir_; }

  private:
    void load_index();
    std::filesystem::path entry_path(const std::string& filename) const;

    std::filesystem::path dir_;
    mutable std::mutex mutex_;
    std::map<std::string, std::string> index_;  // query -> filename
};

struct EnrichmentStats {
    std::size_t values = 0;        // feature values processed
    std::size_t cache_hits = 0;
    std::size_t fetched = 0;       // provider queries that succeeded
    std::size_t offline_misses = 0;  // cache-only mode, no entry
    std::size_t failures = 0;      // provider errors after retries
    // distribution input: number of results returned per enriched value
    std::vector<int> result_counts;

    void merge(const EnrichmentStats& other);
};

// Enriches one feature value: cache hit returns the cached list truncated to
// k; a miss queries the provider (when given) and stores the full list; a
// miss with no provider yields an empty result list and counts as an offline
// miss. Provider errors after retries are recorded, not fatal.
EnrichedFeature enrich_value(const FeatureValue& value, SearchProvider* provider,
                             EnrichmentCache& cache, int k, EnrichmentStats* stats = nullptr);

// Enriches every feature value of every type exactly once. Provider queries
// run on up to `parallelism` worker threads; output order is independent of
// scheduling. Throws TransportError when the device had values and every
// single one failed with a provider error.
EnrichedDevice enrich_device(const DeviceFeatures& device, SearchProvider* provider,
                             EnrichmentCache& cache, int k, EnrichmentStats* stats = nullptr,
                             int parallelism = 4);

// Cumulative distribution of results-per-value counts: for each distinct
// count, the fraction of values with that many results or fewer. Fractions
// are nondecreasing and end at 1.0.
std::map<int, double> result_count_cdf(const std::vector<EnrichedDevice>& devices);

}  // namespace iotl
