#include "iotl/enrichment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "iotl/errors.hpp"

namespace iotl {

using nlohmann::json;

std::size_t EnrichedDevice::total_results() const {
    std::size_t n = 0;
    for (const auto& per_type : enriched)
        for (const auto& ef : per_type) n += ef.results.size();
    return n;
}

bool EnrichedDevice::has_enriched_values() const {
    for (const auto& per_type : enriched)
        for (const auto& ef : per_type)
            if (!ef.results.empty()) return true;
    return false;
}

void EnrichmentStats::merge(const EnrichmentStats& other) {
    values += other.values;
    cache_hits += other.cache_hits;
    fetched += other.fetched;
    offline_misses += other.offline_misses;
    failures += other.failures;
    result_counts.insert(result_counts.end(), other.result_counts.begin(),
                         other.result_counts.end());
}

namespace {

std::vector<SearchResult> parse_results_json(const json& j) {
    if (!j.is_object() || !j.contains("results") || !j["results"].is_array())
        throw ContractError("search response missing 'results' array");
    std::vector<SearchResult> out;
    for (const auto& r : j["results"]) {
        SearchResult sr;
        sr.rank = r.value("rank", static_cast<int>(out.size()) + 1);
        sr.title = r.value("title", "");
        sr.snippet = r.value("snippet", "");
        sr.url = r.value("url", "");
        if (sr.title.empty() && sr.snippet.empty()) continue;
        out.push_back(std::move(sr));
    }
    std::sort(out.begin(), out.end(),
              [](const SearchResult& a, const SearchResult& b) { return a.rank < b.rank; });
    return out;
}

// FNV-1a, stable across platforms so committed cache fixtures keep their names.
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string cache_filename(const std::string& query) {
    std::string slug;
    for (char c : query) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) slug.push_back(c);
        else if (!slug.empty() && slug.back() != '-') slug.push_back('-');
        if (slug.size() >= 24) break;
    }
    while (!slug.empty() && slug.back() == '-') slug.pop_back();
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(fnv1a(query)));
    return (slug.empty() ? std::string("q") : slug) + "-" + hex + ".json";
}

}  // namespace

HttpSearchProvider::HttpSearchProvider(std::string base_url, RetryPolicy policy)
    : base_url_(std::move(base_url)), policy_(policy) {}

std::vector<SearchResult> HttpSearchProvider::search(const std::string& query, int k) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(policy_.timeout_sec);
    client.set_read_timeout(policy_.timeout_sec);

    httplib::Params params{{"q", query}, {"num", std::to_string(k)}};
    std::string last_error;
    for (int attempt = 0; attempt < policy_.max_attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(policy_.backoff_base_ms * (1 << (attempt - 1))));
        }
        auto res = client.Get("/search", params, httplib::Headers{});
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429) throw QuotaError("search provider quota exceeded");
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        json j = json::parse(res->body, nullptr, false);
        if (j.is_discarded()) throw ContractError("search response is not valid JSON");
        return parse_results_json(j);
    }
    throw TransportError("search provider unreachable after " +
                         std::to_string(policy_.max_attempts) + " attempts: " + last_error);
}

std::vector<SearchResult> FixtureSearchProvider::search(const std::string& query, int /*k*/) {
    ++calls_;
    auto it = table_.find(query);
    if (it == table_.end()) return {};
    return it->second;
}

EnrichmentCache::EnrichmentCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    load_index();
}

void EnrichmentCache::load_index() {
    const auto index_path = dir_ / "index.json";
    if (!std::filesystem::exists(index_path)) return;
    std::ifstream in(index_path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ValidationError("corrupt cache index", index_path.string());
    for (auto& [query, filename] : j.items()) index_[query] = filename.get<std::string>();
}

std::filesystem::path EnrichmentCache::entry_path(const std::string& filename) const {
    return dir_ / filename;
}

bool EnrichmentCache::contains(const std::string& query) const {
    std::lock_guard lock(mutex_);
    return index_.count(query) > 0;
}

std::size_t EnrichmentCache::size() const {
    std::lock_guard lock(mutex_);
    return index_.size();
}

std::optional<std::vector<SearchResult>> EnrichmentCache::get(const std::string& query) const {
    std::string filename;
    {
        std::lock_guard lock(mutex_);
        auto it = index_.find(query);
        if (it == index_.end()) return std::nullopt;
        filename = it->second;
    }
    std::ifstream in(entry_path(filename));
    if (!in) return std::nullopt;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ValidationError("corrupt cache entry", filename);
    return parse_results_json(j);
}

void EnrichmentCache::put(const std::string& query, const std::vector<SearchResult>& results,
                          std::int64_t fetched_at_unix) {
    std::lock_guard lock(mutex_);
    std::string filename = cache_filename(query);
    json entry;
    entry["query"] = query;
    entry["fetched_at"] = fetched_at_unix;
    entry["results"] = json::array();
    for (const auto& r : results) {
        entry["results"].push_back(
            {{"rank", r.rank}, {"title", r.title}, {"snippet", r.snippet}, {"url", r.url}});
    }
    {
        std::ofstream out(entry_path(filename), std::ios::binary | std::ios::trunc);
        out << entry.dump(2) << "\n";
    }
    index_[query] = filename;
    json index_json(index_);
    std::ofstream out(dir_ / "index.json", std::ios::binary | std::ios::trunc);
    out << index_json.dump(2) << "\n";
}

EnrichedFeature enrich_value(const FeatureValue& value, SearchProvider* provider,
                             EnrichmentCache& cache, int k, EnrichmentStats* stats) {
    if (k < 1) throw ValidationError("k must be >= 1");
    EnrichmentStats local;
    local.values = 1;

    EnrichedFeature out;
    out.source = value;
    // Query string is the normalized feature value verbatim.
    const std::string& query = value.text;
    if (auto cached = cache.get(query)) {
        local.cache_hits = 1;
        out.results = std::move(*cached);
    } else if (provider) {
        auto results = provider->search(query, k);  // may throw after retries
        auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
        cache.put(query, results, now);
        local.fetched = 1;
        out.results = std::move(results);
    } else {
        local.offline_misses = 1;
    }
    if (static_cast<int>(out.results.size()) > k) out.results.resize(static_cast<std::size_t>(k));
    local.result_counts.push_back(static_cast<int>(out.results.size()));
    if (stats) stats->merge(local);
    return out;
}

EnrichedDevice enrich_device(const DeviceFeatures& device, SearchProvider* provider,
                             EnrichmentCache& cache, int k, EnrichmentStats* stats,
                             int parallelism) {
    EnrichedDevice out;
    out.device = device;

    struct Task {
        FeatureType type;
        std::size_t slot;
        const FeatureValue* value;
    };
    std::vector<Task> tasks;
    for (FeatureType t : kAllFeatureTypes) {
        const auto& seq = device.of(t);
        out.of(t).resize(seq.size());
        for (std::size_t i = 0; i < seq.size(); ++i) tasks.push_back({t, i, &seq[i]});
    }

    std::mutex stats_mutex;
    EnrichmentStats combined;
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> errors{0};

    auto worker = [&]() {
        for (;;) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= tasks.size()) return;
            const Task& task = tasks[idx];
            EnrichmentStats local;
            EnrichedFeature ef;
            try {
                ef = enrich_value(*task.value, provider, cache, k, &local);
            } catch (const Error&) {
                errors.fetch_add(1);
                local.values = 1;
                local.failures = 1;
                local.result_counts.push_back(0);
                ef.source = *task.value;
            }
            out.enriched[static_cast<std::size_t>(task.type)][task.slot] = std::move(ef);
            std::lock_guard lock(stats_mutex);
            combined.merge(local);
        }
    };

    int threads = std::max(1, std::min<int>(parallelism, static_cast<int>(tasks.size())));
    if (threads <= 1 || provider == nullptr) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (stats) stats->merge(combined);
    if (!tasks.empty() && errors.load() == tasks.size())
        throw TransportError("enrichment failed for every feature value of device " +
                             device.device_id);
    return out;
}

std::map<int, double> result_count_cdf(const std::vector<EnrichedDevice>& devices) {
    std::vector<int> counts;
    for (const auto& dev : devices) {
        for (const auto& per_type : dev.enriched)
            for (const auto& ef : per_type) counts.push_back(static_cast<int>(ef.results.size()));
    }
    if (counts.empty()) throw ValidationError("result_count_cdf needs at least one enriched value");
    std::sort(counts.begin(), counts.end());
    std::map<int, double> cdf;
    const double n = static_cast<double>(counts.size());
    std::size_t below = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i + 1 == counts.size() || counts[i + 1] != counts[i]) {
            below = i + 1;
            cdf[counts[i]] = static_cast<double>(below) / n;
        }
    }
    return cdf;
}

}  // namespace iotl
