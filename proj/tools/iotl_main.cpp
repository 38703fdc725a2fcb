// iotl - passive IoT device labeling pipeline.
//
// Subcommands: extract, enrich, label, evaluate, catalog.
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "iotl/backends.hpp"
#include "iotl/catalogs.hpp"
#include "iotl/dataset.hpp"
#include "iotl/enrichment.hpp"
#include "iotl/errors.hpp"
#include "iotl/evaluation.hpp"
#include "iotl/function_labeling.hpp"
#include "iotl/maintenance.hpp"
#include "iotl/oui.hpp"
#include "iotl/pcap_extract.hpp"
#include "iotl/reports.hpp"
#include "iotl/scoring.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace iotl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_file(const fs::path& path, const std::string& what) {
    if (!fs::exists(path)) throw IoError(what + " not found: " + path.string());
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
}

// Atomic replace: write beside the target, then rename over it.
void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    write_file(tmp, content);
    fs::rename(tmp, path);
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? v : fallback;
}

ScoringConfig load_config(const std::string& path) {
    if (path.empty()) return ScoringConfig{};
    require_file(path, "scoring config");
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return scoring_config_from_json(ss.str());
}

std::unique_ptr<ClassifierBackend> make_classifier(const std::string& backend,
                                                   const std::string& keywords,
                                                   AuditLog* audit) {
    if (backend == "oracle" || backend.empty()) {
        if (!keywords.empty()) {
            require_file(keywords, "keyword file");
            return std::make_unique<KeywordOracleBackend>(KeywordOracleBackend::from_file(keywords));
        }
        return std::make_unique<KeywordOracleBackend>();
    }
    return std::make_unique<RemoteZeroShotBackend>(backend, audit);
}

void echo_run_config(const fs::path& run_dir, const json& config) {
    write_file(run_dir / "config.json", config.dump(2) + "\n");
}

// ---------------- extract ----------------

struct ExtractArgs {
    std::string pcap, json_in, oui_db, out, psl_file;
    std::vector<std::string> device_filter;
};

int cmd_extract(const ExtractArgs& args) {
    require_file(args.oui_db, "OUI database");
    OuiDatabase oui = OuiDatabase::from_file(args.oui_db);
    PublicSuffixList psl = args.psl_file.empty() ? PublicSuffixList::bundled()
                                                 : PublicSuffixList::from_file(args.psl_file);

    std::vector<DeviceFeatures> devices;
    if (!args.pcap.empty()) {
        require_file(args.pcap, "capture file");
        std::set<MacAddress> filter;
        for (const auto& text : args.device_filter) {
            auto mac = MacAddress::parse(text);
            if (!mac) throw ValidationError("not a MAC address: " + text);
            filter.insert(*mac);
        }
        ExtractionStats stats;
        devices = extract_from_pcap_file(args.pcap, oui, filter.empty() ? nullptr : &filter,
                                         &stats, psl);
        std::cerr << "packets: " << stats.packets << ", skipped: " << stats.skipped_packets
                  << ", devices: " << devices.size() << "\n";
    } else {
        require_file(args.json_in, "dataset file");
        Dataset in = load_dataset(args.json_in, psl);
        for (const auto& d : in.devices) devices.push_back(d.enriched.device);
        std::cerr << "devices: " << devices.size() << "\n";
    }

    Dataset out = dataset_from_features(devices);
    // OUI values for JSON-imported devices that carry a MAC but no OUI yet
    for (auto& d : out.devices) {
        auto& feat = d.enriched.device;
        if (feat.mac && feat.of(FeatureType::Oui).empty()) {
            if (auto registrant = oui.lookup(*feat.mac))
                feat.add_value(FeatureType::Oui, *registrant, psl);
        }
    }
    if (args.out.empty()) std::cout << dataset_to_json(out);
    else write_file(args.out, dataset_to_json(out));
    return kExitOk;
}

// ---------------- enrich ----------------

struct EnrichArgs {
    std::string dataset, cache_dir, provider, out;
    bool offline = false;
    int k = 10;
    int parallel = 4;
};

int cmd_enrich(const EnrichArgs& args) {
    require_file(args.dataset, "dataset file");
    Dataset dataset = load_dataset(args.dataset);
    EnrichmentCache cache(args.cache_dir);

    std::unique_ptr<SearchProvider> provider;
    std::string provider_url = args.provider.empty() ? env_or("IOTL_SEARCH_URL", "") : args.provider;
    if (!args.offline && !provider_url.empty())
        provider = std::make_unique<HttpSearchProvider>(provider_url);

    EnrichmentStats stats;
    for (auto& d : dataset.devices) {
        d.enriched = enrich_device(d.enriched.device, provider.get(), cache, args.k, &stats,
                                   args.parallel);
    }
    std::cerr << "values: " << stats.values << ", cache hits: " << stats.cache_hits
              << ", fetched: " << stats.fetched << ", offline misses: " << stats.offline_misses
              << ", failures: " << stats.failures << "\n";
    if (args.out.empty()) std::cout << dataset_to_json(dataset);
    else write_file(args.out, dataset_to_json(dataset));
    return kExitOk;
}

// ---------------- label ----------------

struct LabelArgs {
    std::string dataset, catalogs_dir, backend = "oracle", keywords, config, vendor_config;
    std::string out, explain;
    int top_k = 5;
};

int cmd_label(const LabelArgs& args) {
    require_file(args.dataset, "dataset file");
    require_file(fs::path(args.catalogs_dir) / "vendors.json", "vendor catalog");
    Dataset dataset = load_dataset(args.dataset);
    Catalogs catalogs = load_catalogs(args.catalogs_dir);
    ScoringConfig function_cfg = load_config(args.config);
    ScoringConfig vendor_cfg = args.vendor_config.empty() ? function_cfg
                                                          : load_config(args.vendor_config);

    AuditLog audit(args.out.empty() ? fs::path{} : fs::path(args.out) / "audit.jsonl");
    auto backend = make_classifier(args.backend, args.keywords, &audit);

    std::vector<DeviceReport> reports;
    for (const auto& d : dataset.devices) {
        TypeLabelOutcome outcome =
            label_type(d.enriched, catalogs, function_cfg, vendor_cfg, *backend, args.top_k);
        DeviceReport report;
        report.device_id = d.enriched.device.device_id;
        report.vendor = std::move(outcome.vendor_result);
        report.function = std::move(outcome.function_result);
        report.type = std::move(outcome.type);
        reports.push_back(std::move(report));
    }

    if (!args.explain.empty()) {
        const DeviceReport* found = nullptr;
        for (const auto& r : reports)
            if (r.device_id == args.explain) found = &r;
        if (!found) throw ValidationError("unknown device id: " + args.explain);
        auto print_result = [](const char* task, const LabelResult& result) {
            std::cout << task << ":";
            if (result.abstained) {
                std::cout << " (abstained)\n";
                return;
            }
            std::cout << "\n";
            for (const auto& r : result.ranked) {
                std::cout << "  " << r.label << "  score=" << r.score << "\n";
                for (const auto& e : r.evidence) {
                    std::cout << "    [" << feature_type_name(e.feature_type) << " \""
                              << e.source_value << "\" #" << e.result_rank << "] \"" << e.excerpt
                              << "\"\n";
                }
            }
        };
        std::cout << "device " << found->device_id << "\n";
        print_result("vendor", found->vendor);
        print_result("function", found->function);
    }

    if (!args.out.empty()) {
        const fs::path run_dir(args.out);
        fs::create_directories(run_dir / "reports");
        for (const auto& r : reports)
            write_file(run_dir / "reports" / report_filename(r.device_id), report_to_json(r));
        write_file(run_dir / "reports" / "summary.json", reports_to_json(reports));
        echo_run_config(run_dir, json{{"command", "label"},
                                      {"dataset", args.dataset},
                                      {"catalogs", args.catalogs_dir},
                                      {"backend", args.backend},
                                      {"keywords", args.keywords},
                                      {"top_k", args.top_k},
                                      {"config", json::parse(scoring_config_to_json(function_cfg))},
                                      {"vendor_config",
                                       json::parse(scoring_config_to_json(vendor_cfg))}});
    }
    return kExitOk;
}

// ---------------- evaluate ----------------

struct EvaluateArgs {
    std::string dataset, catalogs_dir, backend = "oracle", keywords, config;
    std::string reports_dir, truth_dataset;
    std::string baseline_oui;  // manuf path
    std::string out;
    int folds = 5;
    bool optimize = false;
    bool unique_only = false;
    std::uint64_t seed = 0;
};

json eval_metrics_json(const std::map<std::string, LabelResult>& results,
                       const std::map<std::string, std::string>& truth) {
    json out;
    out["hit1"] = hit_at_k(results, truth, 1);
    out["hit2"] = hit_at_k(results, truth, 2);
    out["empty_ratio"] = empty_result_ratio(results);
    out["n_devices"] = results.size();
    return out;
}

std::string format_table_row(const std::string& method, const std::string& catalog,
                             const std::string& features, const std::string& hit1,
                             const std::string& hit2) {
    std::ostringstream row;
    row << method;
    row << std::string(method.size() < 22 ? 22 - method.size() : 1, ' ');
    row << catalog << std::string(catalog.size() < 9 ? 9 - catalog.size() : 1, ' ');
    row << features << std::string(features.size() < 52 ? 52 - features.size() : 1, ' ');
    row << hit1 << std::string(hit1.size() < 7 ? 7 - hit1.size() : 1, ' ');
    row << hit2 << "\n";
    return row.str();
}

std::string fixed3(double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

int cmd_evaluate(const EvaluateArgs& args) {
    const std::string enriched_features = "Domains+,Hostname+,TLS+,User-Agents+,OUI+";
    json eval_out;
    std::string table;
    table += format_table_row("Method", "Catalog", "Features", "HIT1", "HIT2");

    GroundTruth truth;
    std::map<std::string, std::string> vendor_truth, function_truth, type_truth;
    auto split_truth = [&](const GroundTruth& gt) {
        for (const auto& [id, label] : gt) {
            vendor_truth[id] = label.vendor;
            function_truth[id] = label.function;
            type_truth[id] = label.vendor + "|" + label.function;
        }
    };

    if (!args.reports_dir.empty()) {
        // reports mode: metrics over previously written label reports
        require_file(args.truth_dataset, "truth dataset");
        require_file(args.reports_dir, "reports directory");
        Dataset truth_data = load_dataset(args.truth_dataset);
        truth = truth_data.ground_truth();
        split_truth(truth);

        std::map<std::string, LabelResult> vendor_results, function_results, type_results;
        for (auto& report : load_reports_dir(args.reports_dir)) {
            if (!truth.count(report.device_id)) continue;
            std::vector<RankedLabel> type_ranked;
            for (std::size_t i = 0; i < report.vendor.ranked.size() && i < 2; ++i) {
                const auto& v = report.vendor.ranked[i];
                for (std::size_t j = 0; j < report.function.ranked.size() && j < 2; ++j) {
                    const auto& f = report.function.ranked[j];
                    type_ranked.push_back(
                        RankedLabel{v.label + "|" + f.label, v.score * (1.0 + f.score), {}});
                }
            }
            vendor_results[report.device_id] = std::move(report.vendor);
            function_results[report.device_id] = std::move(report.function);
            type_results[report.device_id] = LabelResult::from_ranked(std::move(type_ranked));
        }
        if (vendor_results.empty()) throw ValidationError("no reports matched the ground truth");
        eval_out["vendor"] = eval_metrics_json(vendor_results, vendor_truth);
        eval_out["function"] = eval_metrics_json(function_results, function_truth);
        eval_out["type"] = eval_metrics_json(type_results, type_truth);
        eval_out["n_devices"] = vendor_results.size();
        table += format_table_row("Vendor labeling", "Y", enriched_features,
                                  fixed3(eval_out["vendor"]["hit1"].get<double>()),
                                  fixed3(eval_out["vendor"]["hit2"].get<double>()));
        table += format_table_row("Function labeling", "V", enriched_features,
                                  fixed3(eval_out["function"]["hit1"].get<double>()),
                                  fixed3(eval_out["function"]["hit2"].get<double>()));
        table += format_table_row("Type labeling", "Y", enriched_features,
                                  fixed3(eval_out["type"]["hit1"].get<double>()),
                                  fixed3(eval_out["type"]["hit2"].get<double>()));
    } else {
        // pipeline mode: label and evaluate in one pass
        require_file(args.dataset, "dataset file");
        require_file(fs::path(args.catalogs_dir) / "vendors.json", "vendor catalog");
        Dataset dataset = load_dataset(args.dataset);
        Catalogs catalogs = load_catalogs(args.catalogs_dir);
        ScoringConfig cfg = load_config(args.config);
        AuditLog audit(args.out.empty() ? fs::path{} : fs::path(args.out) / "audit.jsonl");
        auto backend = make_classifier(args.backend, args.keywords, &audit);

        truth = dataset.ground_truth();
        std::vector<EnrichedDevice> devices;
        for (const auto& d : dataset.devices) {
            if (!truth.count(d.enriched.device.device_id))
                throw ValidationError("device '" + d.enriched.device.device_id +
                                      "' has no ground truth; evaluation needs labels");
            devices.push_back(d.enriched);
        }
        if (args.unique_only) {
            std::vector<std::string> ids;
            for (const auto& d : devices) ids.push_back(d.device.device_id);
            auto keep = select_unique_devices(ids, truth, args.seed);
            std::set<std::string> keep_set(keep.begin(), keep.end());
            std::vector<EnrichedDevice> filtered;
            for (auto& d : devices)
                if (keep_set.count(d.device.device_id)) filtered.push_back(std::move(d));
            devices = std::move(filtered);
            GroundTruth filtered_truth;
            for (const auto& id : keep) filtered_truth[id] = truth[id];
            truth = std::move(filtered_truth);
            eval_out["unique_only"] = {{"seed", args.seed}, {"selected", keep}};
        }
        split_truth(truth);

        Labeler vendor_labeler = [&](const EnrichedDevice& d, const ScoringConfig& c) {
            return label_vendor(d, catalogs.vendors, c);
        };
        // function per-feature runs keep the vendor fixed from the full-config pass
        std::map<std::string, std::optional<std::string>> vendor_of;
        for (const auto& d : devices) {
            LabelResult lv = label_vendor(d, catalogs.vendors, cfg);
            vendor_of[d.device.device_id] =
                lv.top() ? std::optional<std::string>(lv.top()->label) : std::nullopt;
        }
        Labeler function_labeler = [&](const EnrichedDevice& d, const ScoringConfig& c) {
            return label_function(d, vendor_of[d.device.device_id], catalogs, c, *backend);
        };

        ScoringConfig vendor_cfg = cfg, function_cfg = cfg;
        if (args.optimize) {
            OptimizeResult vendor_opt =
                optimize_config(devices, vendor_truth, vendor_labeler, args.seed, args.folds);
            OptimizeResult function_opt =
                optimize_config(devices, function_truth, function_labeler, args.seed, args.folds);
            vendor_cfg = vendor_opt.config;
            function_cfg = function_opt.config;
            auto opt_json = [](const OptimizeResult& r) {
                return json{{"config", json::parse(scoring_config_to_json(r.config))},
                            {"training_hit1", r.training_hit1},
                            {"uniform_training_hit1", r.uniform_training_hit1},
                            {"fold_test_hit1", r.fold_test_hit1}};
            };
            eval_out["optimize"] = {{"vendor", opt_json(vendor_opt)},
                                    {"function", opt_json(function_opt)},
                                    {"folds", args.folds},
                                    {"seed", args.seed}};
        }

        std::map<std::string, LabelResult> vendor_results, function_results, type_results;
        for (const auto& d : devices) {
            const std::string& id = d.device.device_id;
            LabelResult lv = label_vendor(d, catalogs.vendors, vendor_cfg);
            std::optional<std::string> vendor =
                lv.top() ? std::optional<std::string>(lv.top()->label) : std::nullopt;
            LabelResult lf = label_function(d, vendor, catalogs, function_cfg, *backend);
            std::vector<RankedLabel> type_ranked;
            for (std::size_t i = 0; i < lv.ranked.size() && i < 2; ++i) {
                for (std::size_t j = 0; j < lf.ranked.size() && j < 2; ++j) {
                    type_ranked.push_back(RankedLabel{lv.ranked[i].label + "|" + lf.ranked[j].label,
                                                      lv.ranked[i].score * (1.0 + lf.ranked[j].score),
                                                      {}});
                }
            }
            vendor_results[id] = std::move(lv);
            function_results[id] = std::move(lf);
            type_results[id] = LabelResult::from_ranked(std::move(type_ranked));
        }

        eval_out["vendor"] = eval_metrics_json(vendor_results, vendor_truth);
        eval_out["function"] = eval_metrics_json(function_results, function_truth);
        eval_out["type"] = eval_metrics_json(type_results, type_truth);
        eval_out["n_devices"] = devices.size();

        // per-feature accuracy and availability
        json per_feature_vendor, per_feature_function;
        for (FeatureType t : kAllFeatureTypes) {
            auto pv = per_feature_accuracy(devices, vendor_truth, vendor_labeler, t, cfg);
            per_feature_vendor[std::string(feature_type_name(t))] = {
                {"accuracy", pv.accuracy}, {"availability", pv.availability}};
            auto pf = per_feature_accuracy(devices, function_truth, function_labeler, t, cfg);
            per_feature_function[std::string(feature_type_name(t))] = {
                {"accuracy", pf.accuracy}, {"availability", pf.availability}};
        }
        eval_out["vendor"]["per_feature"] = per_feature_vendor;
        eval_out["function"]["per_feature"] = per_feature_function;

        // feature-overlap similarity within (vendor, function) groups
        std::vector<DeviceFeatures> feature_rows;
        for (const auto& d : devices) feature_rows.push_back(d.device);
        try {
            json similarity;
            for (const auto& [type, stats] : group_similarity_report(feature_rows, truth)) {
                similarity[type] = {{"mean", stats.mean},
                                    {"stddev", stats.stddev},
                                    {"groups", stats.groups}};
            }
            eval_out["similarity"] = similarity;
        } catch (const ValidationError&) {
            // no group with two devices; similarity section omitted
        }

        if (!args.baseline_oui.empty()) {
            require_file(args.baseline_oui, "OUI database");
            OuiDatabase oui = OuiDatabase::from_file(args.baseline_oui);
            std::map<std::string, LabelResult> baseline;
            for (const auto& d : devices) {
                if (!d.device.mac) continue;
                baseline[d.device.device_id] = oui_baseline(d.device, oui, &catalogs.vendors);
            }
            if (!baseline.empty()) {
                std::map<std::string, std::string> baseline_truth;
                for (const auto& [id, _] : baseline) baseline_truth[id] = vendor_truth[id];
                eval_out["baseline_oui"] = eval_metrics_json(baseline, baseline_truth);
                table += format_table_row(
                    "OUI", "N", "MAC", fixed3(eval_out["baseline_oui"]["hit1"].get<double>()), "-");
            }
        }

        table += format_table_row("Vendor labeling", "Y", enriched_features,
                                  fixed3(eval_out["vendor"]["hit1"].get<double>()),
                                  fixed3(eval_out["vendor"]["hit2"].get<double>()));
        table += format_table_row("Function labeling", "V", enriched_features,
                                  fixed3(eval_out["function"]["hit1"].get<double>()),
                                  fixed3(eval_out["function"]["hit2"].get<double>()));
        table += format_table_row("Type labeling", "Y", enriched_features,
                                  fixed3(eval_out["type"]["hit1"].get<double>()),
                                  fixed3(eval_out["type"]["hit2"].get<double>()));
    }

    std::cout << table;
    if (!args.out.empty()) {
        const fs::path run_dir(args.out);
        write_file(run_dir / "eval.json", eval_out.dump(2) + "\n");
        write_file(run_dir / "eval_table.txt", table);
        echo_run_config(run_dir, json{{"command", "evaluate"},
                                      {"dataset", args.dataset},
                                      {"reports", args.reports_dir},
                                      {"catalogs", args.catalogs_dir},
                                      {"backend", args.backend},
                                      {"folds", args.folds},
                                      {"seed", args.seed},
                                      {"optimize", args.optimize},
                                      {"unique_only", args.unique_only}});
    }
    return kExitOk;
}

// ---------------- catalog ----------------

struct CatalogArgs {
    std::string catalogs_dir, dataset, chat_url, backend = "oracle", keywords, config;
    std::string out_dir, report_out, audit;
};

int cmd_catalog_list(const CatalogArgs& args) {
    require_file(fs::path(args.catalogs_dir) / "vendors.json", "vendor catalog");
    Catalogs catalogs = load_catalogs(args.catalogs_dir);
    std::cout << "vendors: " << catalogs.vendors.size() << "\n"
              << "functions: " << catalogs.functions.size() << "\n"
              << "types: " << catalogs.types.size() << "\n";
    return kExitOk;
}

int cmd_catalog_acquire(const CatalogArgs& args) {
    require_file(fs::path(args.catalogs_dir) / "functions.json", "function catalog");
    Catalogs seed = load_catalogs(args.catalogs_dir);
    AuditLog audit(args.audit.empty() ? fs::path{} : fs::path(args.audit));
    auto chat = make_chat_backend(args.chat_url, &audit);

    AcquiredCatalogs acquired = acquire_catalogs(seed.functions, *chat);
    const fs::path out_dir = args.out_dir.empty() ? fs::path(args.catalogs_dir) : fs::path(args.out_dir);
    fs::create_directories(out_dir);
    write_file_atomic(out_dir / "vendors.json", vendors_to_json(acquired.vendors));
    write_file_atomic(out_dir / "types.json", types_to_json(acquired.types));
    write_file_atomic(out_dir / "functions.json", functions_to_json(seed.functions));

    json report{{"vendors", acquired.vendors.size()},
                {"types", acquired.types.size()},
                {"failed_functions", acquired.failed_functions}};
    json provenance = json::object();
    for (const auto& [vendor, p] : acquired.provenance) provenance[vendor] = p.source;
    report["provenance"] = provenance;
    std::cout << report.dump(2) << "\n";
    if (!args.report_out.empty()) write_file(args.report_out, report.dump(2) + "\n");
    return kExitOk;
}

int cmd_catalog_update_vendors(const CatalogArgs& args) {
    require_file(args.dataset, "dataset file");
    require_file(fs::path(args.catalogs_dir) / "vendors.json", "vendor catalog");
    Dataset dataset = load_dataset(args.dataset);
    Catalogs catalogs = load_catalogs(args.catalogs_dir);
    AuditLog audit(args.audit.empty() ? fs::path{} : fs::path(args.audit));
    auto chat = make_chat_backend(args.chat_url, &audit);

    std::vector<EnrichedDevice> devices;
    for (const auto& d : dataset.devices) devices.push_back(d.enriched);

    // Any stage failure throws before a single byte is written.
    auto [updated, update] = update_vendor_catalog(devices, catalogs.vendors, *chat);

    const fs::path out_dir = args.out_dir.empty() ? fs::path(args.catalogs_dir) : fs::path(args.out_dir);
    fs::create_directories(out_dir);
    write_file_atomic(out_dir / "vendors.json", vendors_to_json(updated));
    if (out_dir != fs::path(args.catalogs_dir)) {
        write_file_atomic(out_dir / "functions.json", functions_to_json(catalogs.functions));
        write_file_atomic(out_dir / "types.json", types_to_json(catalogs.types));
    }

    json evidence = json::object();
    for (const auto& [vendor, ids] : update.evidence) evidence[vendor] = ids;
    json report{{"before", update.before},
                {"after", update.after},
                {"additions", update.additions},
                {"evidence", evidence}};
    std::cout << report.dump(2) << "\n";
    if (!args.report_out.empty()) write_file(args.report_out, report.dump(2) + "\n");
    return kExitOk;
}

int cmd_catalog_update_types(const CatalogArgs& args) {
    require_file(args.dataset, "dataset file");
    require_file(fs::path(args.catalogs_dir) / "vendors.json", "vendor catalog");
    Dataset dataset = load_dataset(args.dataset);
    Catalogs catalogs = load_catalogs(args.catalogs_dir);
    AuditLog audit(args.audit.empty() ? fs::path{} : fs::path(args.audit));
    auto chat = make_chat_backend(args.chat_url, &audit);
    auto backend = make_classifier(args.backend, args.keywords, &audit);
    ScoringConfig cfg = load_config(args.config);

    TypeCatalog updated = catalogs.types;
    json additions = json::array();
    for (const auto& d : dataset.devices) {
        LabelResult lv = label_vendor(d.enriched, catalogs.vendors, cfg);
        if (!lv.top()) continue;
        auto pair = update_type_catalog(d.enriched, lv.top()->label, catalogs, cfg, *backend, *chat);
        if (pair && !updated.contains(pair->first, pair->second)) {
            updated = updated.with_pair(pair->first, pair->second);
            additions.push_back({pair->first, pair->second});
        }
    }

    const fs::path out_dir = args.out_dir.empty() ? fs::path(args.catalogs_dir) : fs::path(args.out_dir);
    fs::create_directories(out_dir);
    write_file_atomic(out_dir / "types.json", types_to_json(updated));
    if (out_dir != fs::path(args.catalogs_dir)) {
        write_file_atomic(out_dir / "vendors.json", vendors_to_json(catalogs.vendors));
        write_file_atomic(out_dir / "functions.json", functions_to_json(catalogs.functions));
    }

    json report{{"before", catalogs.types.size()},
                {"after", updated.size()},
                {"additions", additions}};
    std::cout << report.dump(2) << "\n";
    if (!args.report_out.empty()) write_file(args.report_out, report.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Passive IoT device labeling pipeline"};
    app.require_subcommand(1);

    ExtractArgs extract_args;
    auto* extract = app.add_subcommand("extract", "Extract per-device features from traffic");
    auto* pcap_opt = extract->add_option("--pcap", extract_args.pcap, "pcap/pcapng capture file");
    auto* json_opt = extract->add_option("--json", extract_args.json_in, "dataset JSON file");
    pcap_opt->excludes(json_opt);
    extract->add_option("--oui", extract_args.oui_db, "OUI database (manuf format)")->required();
    extract->add_option("--psl", extract_args.psl_file, "public suffix list file");
    extract->add_option("--device", extract_args.device_filter, "restrict to these MACs");
    extract->add_option("-o,--out", extract_args.out, "output dataset path (default stdout)");

    EnrichArgs enrich_args;
    auto* enrich = app.add_subcommand("enrich", "Attach top-k search results to feature values");
    enrich->add_option("dataset", enrich_args.dataset, "dataset JSON")->required();
    enrich->add_option("--cache", enrich_args.cache_dir, "cache directory")->required();
    enrich->add_option("--provider", enrich_args.provider,
                       "search provider base URL (default $IOTL_SEARCH_URL)");
    enrich->add_flag("--offline", enrich_args.offline, "cache-only, never query a provider");
    enrich->add_option("-k", enrich_args.k, "results per value (default 10)");
    enrich->add_option("--parallel", enrich_args.parallel, "max in-flight queries (default 4)");
    enrich->add_option("-o,--out", enrich_args.out, "output dataset path (default stdout)");

    LabelArgs label_args;
    auto* label = app.add_subcommand("label", "Label vendor and function per device");
    label->add_option("dataset", label_args.dataset, "enriched dataset JSON")->required();
    label->add_option("--catalogs", label_args.catalogs_dir, "catalog directory")->required();
    label->add_option("--backend", label_args.backend,
                      "'oracle' or zero-shot endpoint URL (default oracle, $IOTL_ZS_URL)");
    label->add_option("--keywords", label_args.keywords, "keyword file for the oracle backend");
    label->add_option("--config", label_args.config, "scoring config JSON");
    label->add_option("--vendor-config", label_args.vendor_config,
                      "scoring config for vendor labeling (default: --config)");
    label->add_option("--top-k", label_args.top_k, "ranked labels per device (default 5)");
    label->add_option("--explain", label_args.explain, "print evidence for one device id");
    label->add_option("-o,--out", label_args.out, "run directory");

    EvaluateArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "Compute HIT@k metrics and reports");
    evaluate->add_option("dataset", eval_args.dataset, "enriched dataset JSON with ground truth");
    evaluate->add_option("--catalogs", eval_args.catalogs_dir, "catalog directory");
    evaluate->add_option("--backend", eval_args.backend, "'oracle' or zero-shot endpoint URL");
    evaluate->add_option("--keywords", eval_args.keywords, "keyword file for the oracle backend");
    evaluate->add_option("--config", eval_args.config, "scoring config JSON");
    evaluate->add_option("--reports", eval_args.reports_dir, "evaluate existing label reports");
    evaluate->add_option("--truth", eval_args.truth_dataset, "dataset with ground truth (reports mode)");
    evaluate->add_option("--folds", eval_args.folds, "cross-validation folds (default 5)");
    evaluate->add_flag("--optimize", eval_args.optimize, "grid-search weights and thresholds");
    evaluate->add_flag("--unique-only", eval_args.unique_only, "one device per (vendor,function)");
    evaluate->add_option("--seed", eval_args.seed, "seed for folds and unique selection");
    evaluate->add_option("--baseline-oui", eval_args.baseline_oui, "also evaluate the OUI baseline");
    evaluate->add_option("-o,--out", eval_args.out, "run directory");

    CatalogArgs catalog_args;
    auto* catalog = app.add_subcommand("catalog", "Inspect and update the catalogs");
    catalog->require_subcommand(1);
    auto* cat_list = catalog->add_subcommand("list", "print catalog sizes");
    cat_list->add_option("--catalogs", catalog_args.catalogs_dir, "catalog directory")->required();
    auto* cat_acquire = catalog->add_subcommand("acquire", "bootstrap vendors and types");
    cat_acquire->add_option("--catalogs", catalog_args.catalogs_dir, "seed catalog directory")
        ->required();
    cat_acquire->add_option("--chat", catalog_args.chat_url, "chat endpoint or stub://file")
        ->required();
    cat_acquire->add_option("-o,--out", catalog_args.out_dir, "output catalog directory");
    cat_acquire->add_option("--report", catalog_args.report_out, "change report path");
    cat_acquire->add_option("--audit", catalog_args.audit, "audit log path");
    auto* cat_upv = catalog->add_subcommand("update-vendors", "NER + filter vendor update");
    cat_upv->add_option("dataset", catalog_args.dataset, "enriched dataset JSON")->required();
    cat_upv->add_option("--catalogs", catalog_args.catalogs_dir, "catalog directory")->required();
    cat_upv->add_option("--chat", catalog_args.chat_url, "chat endpoint or stub://file")->required();
    cat_upv->add_option("-o,--out", catalog_args.out_dir, "output catalog directory (default in place)");
    cat_upv->add_option("--report", catalog_args.report_out, "change report path");
    cat_upv->add_option("--audit", catalog_args.audit, "audit log path");
    auto* cat_upt = catalog->add_subcommand("update-types", "cross-reference type update");
    cat_upt->add_option("dataset", catalog_args.dataset, "enriched dataset JSON")->required();
    cat_upt->add_option("--catalogs", catalog_args.catalogs_dir, "catalog directory")->required();
    cat_upt->add_option("--chat", catalog_args.chat_url, "chat endpoint or stub://file")->required();
    cat_upt->add_option("--backend", catalog_args.backend, "'oracle' or zero-shot endpoint URL");
    cat_upt->add_option("--keywords", catalog_args.keywords, "keyword file for the oracle backend");
    cat_upt->add_option("--config", catalog_args.config, "scoring config JSON");
    cat_upt->add_option("-o,--out", catalog_args.out_dir, "output catalog directory (default in place)");
    cat_upt->add_option("--report", catalog_args.report_out, "change report path");
    cat_upt->add_option("--audit", catalog_args.audit, "audit log path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (app.got_subcommand(extract)) return cmd_extract(extract_args);
        if (app.got_subcommand(enrich)) return cmd_enrich(enrich_args);
        if (app.got_subcommand(label)) return cmd_label(label_args);
        if (app.got_subcommand(evaluate)) return cmd_evaluate(eval_args);
        if (app.got_subcommand(catalog)) {
            if (catalog->got_subcommand(cat_list)) return cmd_catalog_list(catalog_args);
            if (catalog->got_subcommand(cat_acquire)) return cmd_catalog_acquire(catalog_args);
            if (catalog->got_subcommand(cat_upv)) return cmd_catalog_update_vendors(catalog_args);
            if (catalog->got_subcommand(cat_upt)) return cmd_catalog_update_types(catalog_args);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
