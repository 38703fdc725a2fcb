#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace iotl {

// Catalog keys are lowercased, trimmed, and stripped of trailing legal
// suffixes ("inc", "ltd", ...), so "Belkin International, Inc." and
// "belkin international" resolve identically.
std::string normalize_catalog_key(std::string_view raw);

struct VendorEntry {
    std::string name;                  // canonical, already normalized
    std::vector<std::string> aliases;  // normalized, each maps to this vendor only

    // canonical name plus aliases, the strings the matcher looks for
    std::vector<std::string> label_strings() const;
};

class VendorCatalog {
  public:
    VendorCatalog() = default;
    explicit VendorCatalog(std::vector<VendorEntry> entries);

    // Exact normalized match on a canonical name or alias.
    std::optional<std::string> resolve_alias(std::string_view name) const;

    bool contains(std::string_view canonical) const;
    const std::vector<VendorEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    // Returns a new catalog with `name` appended as a canonical vendor with
    // no aliases; snapshot semantics, *this is untouched.
    VendorCatalog with_vendor(std::string_view name) const;

  private:
    void rebuild_index();
    std::vector<VendorEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;  // name/alias -> entry
};

class FunctionCatalog {
  public:
    FunctionCatalog() = default;
    explicit FunctionCatalog(std::vector<std::string> names);

    bool contains(std::string_view name) const;
    const std::vector<std::string>& names() const { return names_; }
    std::size_t size() const { return names_.size(); }

  private:
    std::vector<std::string> names_;
};

class TypeCatalog {
  public:
    TypeCatalog() = default;
    explicit TypeCatalog(std::set<std::pair<std::string, std::string>> pairs);

    bool contains(std::string_view vendor, std::string_view function) const;
    const std::set<std::pair<std::string, std::string>>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }

    TypeCatalog with_pair(std::string_view vendor, std::string_view function) const;

  private:
    std::set<std::pair<std::string, std::string>> pairs_;
};

struct Catalogs {
    VendorCatalog vendors;
    FunctionCatalog functions;
    TypeCatalog types;
};

// Loads vendors.json / functions.json / types.json from a directory and
// validates all invariants; violations name the offending entry.
Catalogs load_catalogs(const std::filesystem::path& dir);

// Writes the catalogs back in canonical form (sorted entries, two-space
// indent, trailing newline). save(load(x)) is byte-identical for canonical x.
void save_catalogs(const Catalogs& catalogs, const std::filesystem::path& dir);

std::string vendors_to_json(const VendorCatalog& v);
std::string functions_to_json(const FunctionCatalog& f);
std::string types_to_json(const TypeCatalog& t);

// Functions the vendor is known to make, or the full catalog when the vendor
// is unknown or has no type entries. Never empty for a non-empty catalog.
std::vector<std::string> candidate_functions(const std::optional<std::string>& vendor,
                                             const TypeCatalog& types,
                                             const FunctionCatalog& functions);

// CSV import for the function catalog: one function name per line (a header
// line named "function" is skipped).
FunctionCatalog function_catalog_from_csv(const std::filesystem::path& path);

}  // namespace iotl
