#include "iotl/oui.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "iotl/errors.hpp"

namespace iotl {

namespace {

struct ParsedPrefix {
    std::uint64_t value;
    int mask_len;
};

std::optional<ParsedPrefix> parse_prefix(std::string_view token) {
    int mask_len = -1;
    std::size_t slash = token.find('/');
    if (slash != std::string_view::npos) {
        mask_len = 0;
        for (char c : token.substr(slash + 1)) {
            if (c < '0' || c > '9') return std::nullopt;
            mask_len = mask_len * 10 + (c - '0');
        }
        token = token.substr(0, slash);
    }
    std::uint64_t bits = 0;
    int nibbles = 0;
    for (char c : token) {
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else if (c == ':' || c == '-' || c == '.') continue;
        else return std::nullopt;
        bits = (bits << 4) | static_cast<std::uint64_t>(v);
        if (++nibbles > 12) return std::nullopt;
    }
    if (nibbles == 0 || nibbles % 2 != 0) return std::nullopt;
    if (mask_len < 0) mask_len = nibbles * 4;  // bare AA:BB:CC form
    if (mask_len <= 0 || mask_len > 48) return std::nullopt;
    // left-align to 48 bits, then mask
    bits <<= (48 - nibbles * 4);
    std::uint64_t mask = mask_len == 0 ? 0 : (~0ULL << (48 - mask_len)) & 0xFFFFFFFFFFFFULL;
    return ParsedPrefix{bits & mask, mask_len};
}

}  // namespace

OuiDatabase OuiDatabase::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open OUI database", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

OuiDatabase OuiDatabase::from_text(std::string_view text) {
    OuiDatabase db;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line =
            eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty() && line.front() != '#') {
            // fields: prefix \t short \t long(optional)
            std::vector<std::string_view> fields;
            std::size_t f = 0;
            while (f <= line.size()) {
                std::size_t tab = line.find('\t', f);
                if (tab == std::string_view::npos) {
                    fields.push_back(line.substr(f));
                    break;
                }
                fields.push_back(line.substr(f, tab - f));
                f = tab + 1;
            }
            if (fields.size() >= 2) {
                if (auto prefix = parse_prefix(fields[0])) {
                    std::string_view name = fields.size() >= 3 && !fields[2].empty() ? fields[2]
                                                                                     : fields[1];
                    auto& bucket = db.by_len_[prefix->mask_len];
                    auto [it, inserted] = bucket.emplace(prefix->value, std::string(name));
                    (void)it;
                    if (inserted) ++db.count_;
                }
            }
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    return db;
}

std::optional<std::string> OuiDatabase::lookup(MacAddress mac) const {
    for (const auto& [len, bucket] : by_len_) {
        std::uint64_t mask = (~0ULL << (48 - len)) & 0xFFFFFFFFFFFFULL;
        auto it = bucket.find(mac.bits & mask);
        if (it != bucket.end()) return it->second;
    }
    return std::nullopt;
}

std::vector<OuiDatabase::Entry> OuiDatabase::entries() const {
    std::vector<Entry> out;
    out.reserve(count_);
    for (const auto& [len, bucket] : by_len_) {
        for (const auto& [prefix, name] : bucket) out.push_back({prefix, len, name});
    }
    return out;
}

}  // namespace iotl
