#include "iotl/features.hpp"

#include <algorithm>
#include <cstdio>

namespace iotl {

std::string_view feature_type_name(FeatureType t) {
    switch (t) {
        case FeatureType::Hostname: return "hostname";
        case FeatureType::Domains: return "domains";
        case FeatureType::TlsIssuer: return "tls_issuers";
        case FeatureType::Oui: return "oui";
        case FeatureType::UserAgent: return "user_agents";
    }
    return "unknown";
}

std::optional<FeatureType> feature_type_from_name(std::string_view name) {
    for (FeatureType t : kAllFeatureTypes) {
        if (feature_type_name(t) == name) return t;
    }
    return std::nullopt;
}

std::optional<MacAddress> MacAddress::parse(std::string_view text) {
    std::uint64_t bits = 0;
    int nibbles = 0;
    for (char c : text) {
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else if (c == ':' || c == '-' || c == '.') continue;
        else return std::nullopt;
        bits = (bits << 4) | static_cast<std::uint64_t>(v);
        if (++nibbles > 12) return std::nullopt;
    }
    if (nibbles != 12) return std::nullopt;
    return MacAddress{bits};
}

MacAddress MacAddress::from_bytes(const std::uint8_t bytes[6]) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 6; ++i) bits = (bits << 8) | bytes[i];
    return MacAddress{bits};
}

std::string MacAddress::to_string() const {
    char buf[18];
    std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x",
                  static_cast<unsigned>((bits >> 40) & 0xFF), static_cast<unsigned>((bits >> 32) & 0xFF),
                  static_cast<unsigned>((bits >> 24) & 0xFF), static_cast<unsigned>((bits >> 16) & 0xFF),
                  static_cast<unsigned>((bits >> 8) & 0xFF), static_cast<unsigned>(bits & 0xFF));
    return buf;
}

namespace {

std::string trim_lower(std::string_view raw) {
    std::size_t b = 0, e = raw.size();
    auto is_space = [](unsigned char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
    };
    while (b < e && is_space(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && is_space(static_cast<unsigned char>(raw[e - 1]))) --e;
    std::string out(raw.substr(b, e - b));
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

}  // namespace

std::optional<std::string> normalize_feature(std::string_view raw, FeatureType t,
                                             const PublicSuffixList& psl) {
    std::string s = trim_lower(utf8_sanitize(raw));
    if (s.empty()) return std::nullopt;
    if (t == FeatureType::Domains) {
        s = psl.registrable_domain(s);
        if (s.empty()) return std::nullopt;
    }
    return s;
}

bool DeviceFeatures::add_value(FeatureType t, std::string_view raw, const PublicSuffixList& psl) {
    auto normalized = normalize_feature(raw, t, psl);
    if (!normalized) return false;
    auto& seq = of(t);
    for (const auto& existing : seq) {
        if (existing.text == *normalized) return false;
    }
    seq.push_back(FeatureValue{std::move(*normalized), t});
    return true;
}

bool DeviceFeatures::has_any_values() const {
    return std::any_of(values.begin(), values.end(), [](const auto& v) { return !v.empty(); });
}

std::string utf8_sanitize(std::string_view bytes) {
    static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";  // U+FFFD
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    while (i < bytes.size()) {
        unsigned char c = static_cast<unsigned char>(bytes[i]);
        std::size_t len;
        if (c < 0x80) len = 1;
        else if ((c & 0xE0) == 0xC0 && c >= 0xC2) len = 2;
        else if ((c & 0xF0) == 0xE0) len = 3;
        else if ((c & 0xF8) == 0xF0 && c <= 0xF4) len = 4;
        else {
            out += kReplacement;
            ++i;
            continue;
        }
        if (i + len > bytes.size()) {
            out += kReplacement;
            ++i;
            continue;
        }
        bool valid = true;
        for (std::size_t j = 1; j < len; ++j) {
            if ((static_cast<unsigned char>(bytes[i + j]) & 0xC0) != 0x80) {
                valid = false;
                break;
            }
        }
        if (valid) {
            out.append(bytes.substr(i, len));
            i += len;
        } else {
            out += kReplacement;
            ++i;
        }
    }
    return out;
}

}  // namespace iotl
