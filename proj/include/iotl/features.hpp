#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iotl/public_suffix.hpp"

namespace iotl {

// The five textual signal kinds extracted from traffic. Closed set: nothing
// else is accepted anywhere in the pipeline.
enum class FeatureType : std::uint8_t { Hostname = 0, Domains, TlsIssuer, Oui, UserAgent };

inline constexpr std::size_t kFeatureTypeCount = 5;

inline constexpr std::array<FeatureType, kFeatureTypeCount> kAllFeatureTypes = {
    FeatureType::Hostname, FeatureType::Domains, FeatureType::TlsIssuer, FeatureType::Oui,
    FeatureType::UserAgent};

// Stable wire names, also used as JSON keys in the dataset schema.
std::string_view feature_type_name(FeatureType t);
std::optional<FeatureType> feature_type_from_name(std::string_view name);

struct FeatureValue {
    std::string text;  // normalized, never empty
    FeatureType source_type;

    friend bool operator==(const FeatureValue&, const FeatureValue&) = default;
};

// 48-bit MAC address.
struct MacAddress {
    std::uint64_t bits = 0;  // lower 48 bits

    static std::optional<MacAddress> parse(std::string_view text);
    static MacAddress from_bytes(const std::uint8_t bytes[6]);
    std::string to_string() const;  // "aa:bb:cc:dd:ee:ff"

    friend auto operator<=>(const MacAddress&, const MacAddress&) = default;
};

// All extracted feature values for one device. Every feature type is always
// present, possibly with an empty sequence.
struct DeviceFeatures {
    std::string device_id;  // MAC string when available, otherwise opaque
    std::optional<MacAddress> mac;
    std::array<std::vector<FeatureValue>, kFeatureTypeCount> values;

    std::vector<FeatureValue>& of(FeatureType t) { return values[static_cast<std::size_t>(t)]; }
    const std::vector<FeatureValue>& of(FeatureType t) const {
        return values[static_cast<std::size_t>(t)];
    }

    // Appends `raw` under `t` after normalization; drops empty and duplicate
    // values. Returns true when the value was added.
    bool add_value(FeatureType t, std::string_view raw,
                   const PublicSuffixList& psl = PublicSuffixList::bundled());

    bool has_any_values() const;

    friend bool operator==(const DeviceFeatures&, const DeviceFeatures&) = default;
};

// Lowercases and trims a raw feature string; Domains are further reduced to
// their registrable domain. Returns nullopt when the value normalizes to
// nothing and must be discarded.
std::optional<std::string> normalize_feature(std::string_view raw, FeatureType t,
                                             const PublicSuffixList& psl =
                                                 PublicSuffixList::bundled());

// Replaces invalid UTF-8 sequences with U+FFFD so arbitrary protocol bytes
// can travel through JSON.
std::string utf8_sanitize(std::string_view bytes);

}  // namespace iotl
