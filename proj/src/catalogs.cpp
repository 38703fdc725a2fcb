#include "iotl/catalogs.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "iotl/errors.hpp"

namespace iotl {

using nlohmann::json;

namespace {

const std::set<std::string>& legal_suffixes() {
    static const std::set<std::string> kSuffixes = {
        "inc", "incorporated", "ltd", "limited", "llc", "corp", "corporation",
        "co",  "company",      "gmbh", "bv",     "sa",  "ag",   "srl"};
    return kSuffixes;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open catalog file", path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid JSON: ") + e.what(), path.string());
    }
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write catalog file", path.string());
    out << text;
}

}  // namespace

std::string normalize_catalog_key(std::string_view raw) {
    // lowercase + trim, mirroring feature normalization
    std::string s;
    s.reserve(raw.size());
    for (char c : raw) s.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    // tokenize on whitespace and separators, dropping trailing legal suffixes
    std::vector<std::string> tokens;
    std::string token;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == ',' || c == '.' || c == '\r' || c == '\n') {
            if (!token.empty()) tokens.push_back(std::move(token)), token.clear();
        } else {
            token.push_back(c);
        }
    }
    if (!token.empty()) tokens.push_back(std::move(token));
    // trailing legal suffixes, including dotted abbreviations left as single letters ("b.v.")
    while (tokens.size() > 1 &&
           (legal_suffixes().count(tokens.back()) || tokens.back().size() == 1))
        tokens.pop_back();
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

std::vector<std::string> VendorEntry::label_strings() const {
    std::vector<std::string> out;
    out.reserve(aliases.size() + 1);
    out.push_back(name);
    out.insert(out.end(), aliases.begin(), aliases.end());
    return out;
}

VendorCatalog::VendorCatalog(std::vector<VendorEntry> entries) : entries_(std::move(entries)) {
    rebuild_index();
}

void VendorCatalog::rebuild_index() {
    index_.clear();
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        auto [it, inserted] = index_.emplace(entries_[i].name, i);
        if (!inserted)
            throw ValidationError("duplicate canonical vendor '" + entries_[i].name + "'");
        for (const auto& alias : entries_[i].aliases) {
            auto [ait, ainserted] = index_.emplace(alias, i);
            if (!ainserted && entries_[ait->second].name != entries_[i].name)
                throw ValidationError("alias '" + alias + "' maps to more than one vendor");
        }
    }
}

std::optional<std::string> VendorCatalog::resolve_alias(std::string_view name) const {
    auto it = index_.find(normalize_catalog_key(name));
    if (it == index_.end()) return std::nullopt;
    return entries_[it->second].name;
}

bool VendorCatalog::contains(std::string_view canonical) const {
    auto it = index_.find(std::string(canonical));
    return it != index_.end() && entries_[it->second].name == canonical;
}

VendorCatalog VendorCatalog::with_vendor(std::string_view name) const {
    std::vector<VendorEntry> entries = entries_;
    entries.push_back(VendorEntry{normalize_catalog_key(name), {}});
    return VendorCatalog(std::move(entries));
}

FunctionCatalog::FunctionCatalog(std::vector<std::string> names) : names_(std::move(names)) {
    std::set<std::string> seen;
    for (const auto& n : names_) {
        if (!seen.insert(n).second)
            throw ValidationError("duplicate function '" + n + "'");
    }
}

bool FunctionCatalog::contains(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

TypeCatalog::TypeCatalog(std::set<std::pair<std::string, std::string>> pairs)
    : pairs_(std::move(pairs)) {}

bool TypeCatalog::contains(std::string_view vendor, std::string_view function) const {
    return pairs_.count({std::string(vendor), std::string(function)}) > 0;
}

TypeCatalog TypeCatalog::with_pair(std::string_view vendor, std::string_view function) const {
    auto pairs = pairs_;
    pairs.emplace(std::string(vendor), std::string(function));
    return TypeCatalog(std::move(pairs));
}

Catalogs load_catalogs(const std::filesystem::path& dir) {
    const auto vendors_path = dir / "vendors.json";
    const auto functions_path = dir / "functions.json";
    const auto types_path = dir / "types.json";

    json jv = read_json_file(vendors_path);
    if (!jv.is_array()) throw ValidationError("expected array", vendors_path.string());
    std::vector<VendorEntry> vendors;
    for (std::size_t i = 0; i < jv.size(); ++i) {
        const auto& e = jv[i];
        const std::string where = vendors_path.string() + " entry " + std::to_string(i);
        if (!e.is_object() || !e.contains("name") || !e["name"].is_string())
            throw ValidationError("vendor entry needs a string 'name'", where);
        VendorEntry entry;
        entry.name = normalize_catalog_key(e["name"].get<std::string>());
        if (entry.name.empty()) throw ValidationError("vendor name empty after normalization", where);
        if (e.contains("aliases")) {
            if (!e["aliases"].is_array())
                throw ValidationError("'aliases' must be an array", where);
            for (const auto& a : e["aliases"]) {
                if (!a.is_string()) throw ValidationError("alias must be a string", where);
                std::string alias = normalize_catalog_key(a.get<std::string>());
                if (!alias.empty() && alias != entry.name) entry.aliases.push_back(alias);
            }
        }
        vendors.push_back(std::move(entry));
    }

    json jf = read_json_file(functions_path);
    if (!jf.is_array()) throw ValidationError("expected array", functions_path.string());
    std::vector<std::string> functions;
    for (std::size_t i = 0; i < jf.size(); ++i) {
        if (!jf[i].is_string())
            throw ValidationError("function must be a string",
                                  functions_path.string() + " entry " + std::to_string(i));
        std::string name = normalize_catalog_key(jf[i].get<std::string>());
        if (!name.empty()) functions.push_back(std::move(name));
    }
    if (functions.empty())
        throw ValidationError("function catalog is empty; function labeling is impossible",
                              functions_path.string());

    json jt = read_json_file(types_path);
    if (!jt.is_array()) throw ValidationError("expected array", types_path.string());
    std::set<std::pair<std::string, std::string>> pairs;
    Catalogs catalogs;
    catalogs.vendors = VendorCatalog(std::move(vendors));
    catalogs.functions = FunctionCatalog(std::move(functions));
    for (std::size_t i = 0; i < jt.size(); ++i) {
        const auto& p = jt[i];
        const std::string where = types_path.string() + " pair " + std::to_string(i);
        if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
            throw ValidationError("type pair must be [vendor, function]", where);
        std::string vendor = normalize_catalog_key(p[0].get<std::string>());
        std::string function = normalize_catalog_key(p[1].get<std::string>());
        if (!catalogs.vendors.contains(vendor))
            throw ValidationError("pair (" + vendor + ", " + function + ") names a vendor not in the vendor catalog",
                                  where);
        if (!catalogs.functions.contains(function))
            throw ValidationError("pair (" + vendor + ", " + function + ") names a function not in the function catalog",
                                  where);
        pairs.emplace(std::move(vendor), std::move(function));
    }
    catalogs.types = TypeCatalog(std::move(pairs));
    return catalogs;
}

std::string vendors_to_json(const VendorCatalog& v) {
    std::vector<VendorEntry> sorted = v.entries();
    std::sort(sorted.begin(), sorted.end(),
              [](const VendorEntry& a, const VendorEntry& b) { return a.name < b.name; });
    json out = json::array();
    for (auto& e : sorted) {
        std::sort(e.aliases.begin(), e.aliases.end());
        out.push_back({{"name", e.name}, {"aliases", e.aliases}});
    }
    return out.dump(2) + "\n";
}

std::string functions_to_json(const FunctionCatalog& f) {
    std::vector<std::string> sorted = f.names();
    std::sort(sorted.begin(), sorted.end());
    return json(sorted).dump(2) + "\n";
}

std::string types_to_json(const TypeCatalog& t) {
    json out = json::array();
    for (const auto& [vendor, function] : t.pairs()) out.push_back({vendor, function});
    return out.dump(2) + "\n";
}

void save_catalogs(const Catalogs& catalogs, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_text_file(dir / "vendors.json", vendors_to_json(catalogs.vendors));
    write_text_file(dir / "functions.json", functions_to_json(catalogs.functions));
    write_text_file(dir / "types.json", types_to_json(catalogs.types));
}

std::vector<std::string> candidate_functions(const std::optional<std::string>& vendor,
                                             const TypeCatalog& types,
                                             const FunctionCatalog& functions) {
    std::vector<std::string> out;
    if (vendor) {
        for (const auto& [v, f] : types.pairs()) {
            if (v == *vendor) out.push_back(f);
        }
    }
    if (out.empty()) out = functions.names();
    return out;
}

FunctionCatalog function_catalog_from_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open CSV file", path.string());
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string name = normalize_catalog_key(line);
        if (name.empty() || name == "function") continue;
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    }
    return FunctionCatalog(std::move(names));
}

}  // namespace iotl
