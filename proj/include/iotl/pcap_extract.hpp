#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "iotl/features.hpp"
#include "iotl/oui.hpp"

namespace iotl {

struct ExtractionStats {
    std::size_t packets = 0;
    std::size_t skipped_packets = 0;  // structurally broken, never fatal
};

// Extracts per-device textual features from a pcap or pcapng byte stream
// (Ethernet link layer). One DeviceFeatures per distinct unicast source MAC,
// sorted by MAC:
//   Domains    <- DNS query names (UDP/53, QR=0)
//   Hostname   <- DHCP option 12
//   TlsIssuer  <- Issuer CN/O of server certificates in cleartext handshakes
//   UserAgent  <- plaintext HTTP request headers
//   Oui        <- registrant of the device MAC in the OUI database
// A malformed stream raises ParseError with the byte offset; individually
// broken packets are skipped and counted.
std::vector<DeviceFeatures> extract_from_pcap(
    std::span<const std::uint8_t> capture, const OuiDatabase& oui,
    const std::set<MacAddress>* device_filter = nullptr, ExtractionStats* stats = nullptr,
    const PublicSuffixList& psl = PublicSuffixList::bundled());

std::vector<DeviceFeatures> extract_from_pcap_file(
    const std::filesystem::path& path, const OuiDatabase& oui,
    const std::set<MacAddress>* device_filter = nullptr, ExtractionStats* stats = nullptr,
    const PublicSuffixList& psl = PublicSuffixList::bundled());

// Issuer CN and O attributes of a DER-encoded X.509 certificate, joined by
// ", ". Empty when neither attribute is present or the blob is malformed.
std::string certificate_issuer_cn_o(std::span<const std::uint8_t> der);

}  // namespace iotl
