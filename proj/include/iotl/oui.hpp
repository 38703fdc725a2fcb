#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "iotl/features.hpp"

namespace iotl {

// MAC-prefix to registrant-organization database in the Wireshark "manuf"
// text format: `<prefix>\t<short name>\t<long name>`, '#' comment lines.
// Prefixes are either `AA:BB:CC` (24-bit) or `AA:BB:CC:DD:EE:FF/len`.
class OuiDatabase {
  public:
    OuiDatabase() = default;

    static OuiDatabase from_file(const std::filesystem::path& path);
    static OuiDatabase from_text(std::string_view text);

    // Longest-prefix match. Unknown prefixes return nullopt, never an error.
    std::optional<std::string> lookup(MacAddress mac) const;

    std::size_t size() const { return count_; }

    struct Entry {
        std::uint64_t prefix;  // masked value, upper bits significant
        int mask_len;
        std::string name;
    };
    // All entries, for linear-scan verification.
    std::vector<Entry> entries() const;

  private:
    // per mask length: masked prefix -> registrant name
    std::map<int, std::unordered_map<std::uint64_t, std::string>, std::greater<int>> by_len_;
    std::size_t count_ = 0;
};

}  // namespace iotl
