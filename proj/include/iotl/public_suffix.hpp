#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>

namespace iotl {

// Public-suffix rule list in the standard publicsuffix.org file format:
// one rule per line, "*." wildcards, "!" exceptions, "//" comments.
// Used to reduce DNS names to their registrable domain.
class PublicSuffixList {
  public:
    PublicSuffixList() = default;

    static PublicSuffixList from_file(const std::filesystem::path& path);
    static PublicSuffixList from_text(std::string_view text);

    // The built-in rule set bundled with the library (common ICANN suffixes).
    static const PublicSuffixList& bundled();

    void add_rule(std::string_view rule);
    std::size_t rule_count() const { return rules_.size(); }

    // Registrable domain = public suffix plus one label, per the standard
    // matching algorithm (longest rule wins, exceptions beat wildcards, and
    // an unlisted TLD matches the implicit "*" rule). Returns the input
    // lowercased when no registrable domain exists (the name IS a suffix).
    std::string registrable_domain(std::string_view host) const;

  private:
    enum class RuleKind { Normal, Wildcard, Exception };
    // keyed by the rule's label text without the "*." / "!" marker
    std::unordered_map<std::string, RuleKind> rules_;
};

}  // namespace iotl
