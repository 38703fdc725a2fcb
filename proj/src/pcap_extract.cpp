#include "iotl/pcap_extract.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>

#include "iotl/errors.hpp"

namespace iotl {

namespace {

using Bytes = std::span<const std::uint8_t>;

struct Reader {
    Bytes data;
    std::size_t pos = 0;
    bool little_endian = true;

    std::size_t remaining() const { return data.size() - pos; }
    bool need(std::size_t n) const { return remaining() >= n; }

    std::uint8_t u8() { return data[pos++]; }
    std::uint16_t u16() {
        std::uint16_t v = little_endian
                              ? static_cast<std::uint16_t>(data[pos] | (data[pos + 1] << 8))
                              : static_cast<std::uint16_t>((data[pos] << 8) | data[pos + 1]);
        pos += 2;
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t v;
        if (little_endian)
            v = static_cast<std::uint32_t>(data[pos]) | (static_cast<std::uint32_t>(data[pos + 1]) << 8) |
                (static_cast<std::uint32_t>(data[pos + 2]) << 16) |
                (static_cast<std::uint32_t>(data[pos + 3]) << 24);
        else
            v = (static_cast<std::uint32_t>(data[pos]) << 24) |
                (static_cast<std::uint32_t>(data[pos + 1]) << 16) |
                (static_cast<std::uint32_t>(data[pos + 2]) << 8) |
                static_cast<std::uint32_t>(data[pos + 3]);
        pos += 4;
        return v;
    }
    Bytes take(std::size_t n) {
        Bytes out = data.subspan(pos, n);
        pos += n;
        return out;
    }
};

inline std::uint16_t be16(Bytes b, std::size_t off) {
    return static_cast<std::uint16_t>((b[off] << 8) | b[off + 1]);
}
inline std::uint32_t be24(Bytes b, std::size_t off) {
    return (static_cast<std::uint32_t>(b[off]) << 16) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
           b[off + 2];
}
inline std::uint32_t be32(Bytes b, std::size_t off) {
    return (static_cast<std::uint32_t>(b[off]) << 24) | (static_cast<std::uint32_t>(b[off + 1]) << 16) |
           (static_cast<std::uint32_t>(b[off + 2]) << 8) | b[off + 3];
}

constexpr std::uint32_t kPcapMagicUs = 0xA1B2C3D4;
constexpr std::uint32_t kPcapMagicUsSwapped = 0xD4C3B2A1;
constexpr std::uint32_t kPcapMagicNs = 0xA1B23C4D;
constexpr std::uint32_t kPcapMagicNsSwapped = 0x4D3CB2A1;
constexpr std::uint32_t kPcapngShb = 0x0A0D0D0A;
constexpr std::uint32_t kLinktypeEthernet = 1;
constexpr std::size_t kMaxPacketLen = 1 << 26;

// -------- protocol payload handlers ---------------------------------------

struct FlowKey {
    MacAddress src_mac, dst_mac;
    std::string src_ip, dst_ip;
    std::uint16_t sport = 0, dport = 0;

    auto tie() const { return std::tie(src_mac, dst_mac, src_ip, dst_ip, sport, dport); }
    bool operator<(const FlowKey& o) const { return tie() < o.tie(); }
};

struct Flow {
    std::map<std::uint32_t, std::vector<std::uint8_t>> segments;  // seq -> payload
};

struct Extractor {
    const OuiDatabase& oui;
    const std::set<MacAddress>* filter;
    const PublicSuffixList& psl;
    ExtractionStats stats;

    std::map<MacAddress, DeviceFeatures> devices;
    std::map<FlowKey, Flow> flows;

    bool wants(MacAddress mac) const {
        if (mac.bits == 0) return false;
        if ((mac.bits >> 40) & 0x01) return false;  // multicast/broadcast
        return filter == nullptr || filter->count(mac) > 0;
    }

    DeviceFeatures& device(MacAddress mac) {
        auto it = devices.find(mac);
        if (it == devices.end()) {
            DeviceFeatures d;
            d.device_id = mac.to_string();
            d.mac = mac;
            it = devices.emplace(mac, std::move(d)).first;
        }
        return it->second;
    }

    void note_source(MacAddress src) {
        if (wants(src)) device(src);
    }

    void add_feature(MacAddress mac, FeatureType t, std::string_view raw) {
        if (!wants(mac)) return;
        device(mac).add_value(t, raw, psl);
    }

    // ---- DNS ----
    // Returns false when the name is malformed.
    bool dns_read_name(Bytes msg, std::size_t& pos, std::string& out, int depth = 0) {
        if (depth > 5) return false;
        while (true) {
            if (pos >= msg.size()) return false;
            std::uint8_t len = msg[pos];
            if (len == 0) {
                ++pos;
                return true;
            }
            if ((len & 0xC0) == 0xC0) {  // compression pointer
                if (pos + 1 >= msg.size()) return false;
                std::size_t target = static_cast<std::size_t>(len & 0x3F) << 8 | msg[pos + 1];
                pos += 2;
                return dns_read_name(msg, target, out, depth + 1);
            }
            if (len > 63 || pos + 1 + len > msg.size()) return false;
            if (!out.empty()) out += '.';
            out.append(reinterpret_cast<const char*>(msg.data()) + pos + 1, len);
            pos += 1 + static_cast<std::size_t>(len);
        }
    }

    void handle_dns(MacAddress src, Bytes payload) {
        if (payload.size() < 12) return;
        std::uint16_t flags = be16(payload, 2);
        if (flags & 0x8000) return;  // response; queries only
        std::uint16_t qdcount = be16(payload, 4);
        std::size_t pos = 12;
        for (std::uint16_t q = 0; q < qdcount; ++q) {
            std::string name;
            if (!dns_read_name(payload, pos, name)) return;
            if (pos + 4 > payload.size()) return;
            pos += 4;  // qtype + qclass
            if (!name.empty()) add_feature(src, FeatureType::Domains, name);
        }
    }

    // ---- DHCP ----
    void handle_dhcp(MacAddress src, Bytes payload) {
        // BOOTP fixed header (236) + magic cookie
        if (payload.size() < 240) return;
        if (be32(payload, 236) != 0x63825363) return;
        std::size_t pos = 240;
        while (pos < payload.size()) {
            std::uint8_t opt = payload[pos++];
            if (opt == 0) continue;   // pad
            if (opt == 255) break;    // end
            if (pos >= payload.size()) break;
            std::uint8_t len = payload[pos++];
            if (pos + len > payload.size()) break;
            if (opt == 12 && len > 0) {
                std::string hostname(reinterpret_cast<const char*>(payload.data()) + pos, len);
                add_feature(src, FeatureType::Hostname, hostname);
            }
            pos += len;
        }
    }

    // ---- TCP stream handlers, run after reassembly ----
    void scan_http(const FlowKey& key, const std::vector<std::uint8_t>& stream) {
        static constexpr const char* kMethods[] = {"GET ",    "POST ",  "PUT ",
                                                   "HEAD ",   "DELETE ", "OPTIONS ",
                                                   "PATCH "};
        std::string_view s(reinterpret_cast<const char*>(stream.data()), stream.size());
        std::size_t pos = 0;
        while (pos < s.size()) {
            // find a request line
            std::size_t req = std::string_view::npos;
            for (const char* m : kMethods) {
                std::size_t p = s.find(m, pos);
                if (p != std::string_view::npos && (req == std::string_view::npos || p < req)) {
                    std::size_t eol = s.find("\r\n", p);
                    if (eol != std::string_view::npos &&
                        s.substr(p, eol - p).find(" HTTP/1.") != std::string_view::npos)
                        req = p;
                }
            }
            if (req == std::string_view::npos) return;
            std::size_t headers_end = s.find("\r\n\r\n", req);
            std::string_view block =
                headers_end == std::string_view::npos ? s.substr(req) : s.substr(req, headers_end - req);
            // walk header lines
            std::size_t line_start = block.find("\r\n");
            while (line_start != std::string_view::npos && line_start + 2 < block.size()) {
                line_start += 2;
                std::size_t line_end = block.find("\r\n", line_start);
                std::string_view line = block.substr(
                    line_start, line_end == std::string_view::npos ? std::string_view::npos
                                                                   : line_end - line_start);
                constexpr std::string_view kHeader = "user-agent:";
                if (line.size() > kHeader.size()) {
                    std::string lowered(line.substr(0, kHeader.size()));
                    for (char& c : lowered)
                        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
                    if (lowered == kHeader) {
                        std::string_view value = line.substr(kHeader.size());
                        while (!value.empty() && (value.front() == ' ' || value.front() == '\t'))
                            value.remove_prefix(1);
                        if (!value.empty())
                            add_feature(key.src_mac, FeatureType::UserAgent, value);
                    }
                }
                line_start = line_end;
            }
            pos = headers_end == std::string_view::npos ? s.size() : headers_end + 4;
        }
    }

    void scan_tls(const FlowKey& key, const std::vector<std::uint8_t>& stream) {
        Bytes s(stream);
        std::vector<std::uint8_t> handshake;
        std::size_t pos = 0;
        while (pos + 5 <= s.size()) {
            std::uint8_t record_type = s[pos];
            if (record_type < 20 || record_type > 23 || s[pos + 1] != 3 || s[pos + 2] > 4) break;
            std::size_t len = be16(s, pos + 3);
            if (len == 0 || len > (1u << 14) + 2048) break;
            if (pos + 5 + len > s.size()) {
                // truncated final record: keep what we have of a handshake record
                if (record_type == 22) {
                    std::size_t avail = s.size() - pos - 5;
                    handshake.insert(handshake.end(), s.begin() + pos + 5, s.begin() + pos + 5 + avail);
                }
                break;
            }
            if (record_type == 22)
                handshake.insert(handshake.end(), s.begin() + pos + 5, s.begin() + pos + 5 + len);
            pos += 5 + len;
        }
        // walk handshake messages; stop at anything inconsistent (encrypted tail)
        Bytes h(handshake);
        std::size_t hp = 0;
        while (hp + 4 <= h.size()) {
            std::uint8_t msg_type = h[hp];
            std::size_t msg_len = be24(h, hp + 1);
            if (hp + 4 + msg_len > h.size()) break;
            if (msg_type == 11) {  // Certificate
                Bytes body = h.subspan(hp + 4, msg_len);
                if (body.size() >= 3) {
                    std::size_t certs_len = be24(body, 0);
                    std::size_t cp = 3;
                    std::size_t certs_end = std::min(body.size(), 3 + certs_len);
                    while (cp + 3 <= certs_end) {
                        std::size_t cert_len = be24(body, cp);
                        cp += 3;
                        if (cp + cert_len > certs_end) break;
                        std::string issuer = certificate_issuer_cn_o(body.subspan(cp, cert_len));
                        if (!issuer.empty()) {
                            // certificates travel server -> client; the device is the receiver
                            add_feature(key.dst_mac, FeatureType::TlsIssuer, issuer);
                        }
                        cp += cert_len;
                    }
                }
            }
            hp += 4 + msg_len;
        }
    }

    // ---- per-packet decode ----
    void handle_packet(Bytes frame) {
        ++stats.packets;
        if (frame.size() < 14) {
            ++stats.skipped_packets;
            return;
        }
        std::uint8_t dst_bytes[6], src_bytes[6];
        std::memcpy(dst_bytes, frame.data(), 6);
        std::memcpy(src_bytes, frame.data() + 6, 6);
        MacAddress dst = MacAddress::from_bytes(dst_bytes);
        MacAddress src = MacAddress::from_bytes(src_bytes);
        note_source(src);

        std::size_t off = 12;
        std::uint16_t ethertype = be16(frame, off);
        off += 2;
        for (int tags = 0; tags < 2 && (ethertype == 0x8100 || ethertype == 0x88A8); ++tags) {
            if (frame.size() < off + 4) {
                ++stats.skipped_packets;
                return;
            }
            ethertype = be16(frame, off + 2);
            off += 4;
        }

        std::string src_ip, dst_ip;
        std::uint8_t protocol = 0;
        Bytes l4;
        if (ethertype == 0x0800) {  // IPv4
            if (frame.size() < off + 20) {
                ++stats.skipped_packets;
                return;
            }
            Bytes ip = frame.subspan(off);
            std::uint8_t ihl = ip[0] & 0x0F;
            if ((ip[0] >> 4) != 4 || ihl < 5 || ip.size() < static_cast<std::size_t>(ihl) * 4) {
                ++stats.skipped_packets;
                return;
            }
            std::uint16_t frag = be16(ip, 6);
            if ((frag & 0x1FFF) != 0) return;  // non-first fragment, nothing to parse
            protocol = ip[9];
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", ip[12], ip[13], ip[14], ip[15]);
            src_ip = buf;
            std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", ip[16], ip[17], ip[18], ip[19]);
            dst_ip = buf;
            std::size_t total_len = be16(ip, 2);
            std::size_t end = std::min<std::size_t>(ip.size(), std::max<std::size_t>(total_len, ihl * 4u));
            l4 = ip.subspan(ihl * 4u, end - ihl * 4u);
        } else if (ethertype == 0x86DD) {  // IPv6
            if (frame.size() < off + 40) {
                ++stats.skipped_packets;
                return;
            }
            Bytes ip = frame.subspan(off);
            std::uint8_t next = ip[6];
            std::size_t hoff = 40;
            // skip common extension headers
            while (next == 0 || next == 43 || next == 60) {
                if (ip.size() < hoff + 8) {
                    ++stats.skipped_packets;
                    return;
                }
                std::uint8_t hdr_next = ip[hoff];
                std::size_t hdr_len = (static_cast<std::size_t>(ip[hoff + 1]) + 1) * 8;
                next = hdr_next;
                hoff += hdr_len;
            }
            protocol = next;
            char buf[40];
            auto hex_ip = [&](std::size_t base) {
                std::string out;
                for (int g = 0; g < 8; ++g) {
                    std::snprintf(buf, sizeof(buf), "%x", be16(ip, base + g * 2));
                    if (g) out += ':';
                    out += buf;
                }
                return out;
            };
            src_ip = hex_ip(8);
            dst_ip = hex_ip(24);
            if (ip.size() < hoff) {
                ++stats.skipped_packets;
                return;
            }
            l4 = ip.subspan(hoff);
        } else {
            return;  // ARP and friends carry no textual features
        }

        if (protocol == 17) {  // UDP
            if (l4.size() < 8) {
                ++stats.skipped_packets;
                return;
            }
            std::uint16_t sport = be16(l4, 0), dport = be16(l4, 2);
            std::size_t udp_len = be16(l4, 4);
            std::size_t payload_len = std::min(l4.size(), std::max<std::size_t>(udp_len, 8)) - 8;
            Bytes payload = l4.subspan(8, payload_len);
            if (dport == 53) handle_dns(src, payload);
            else if (dport == 67 && sport == 68) handle_dhcp(src, payload);
        } else if (protocol == 6) {  // TCP
            if (l4.size() < 20) {
                ++stats.skipped_packets;
                return;
            }
            std::uint16_t sport = be16(l4, 0), dport = be16(l4, 2);
            std::uint32_t seq = be32(l4, 4);
            std::size_t data_off = static_cast<std::size_t>(l4[12] >> 4) * 4;
            if (data_off < 20 || l4.size() < data_off) {
                ++stats.skipped_packets;
                return;
            }
            Bytes payload = l4.subspan(data_off);
            if (payload.empty()) return;
            FlowKey key{src, dst, src_ip, dst_ip, sport, dport};
            auto& segs = flows[key].segments;
            segs.emplace(seq, std::vector<std::uint8_t>(payload.begin(), payload.end()));
        }
    }

    // Called once all packets are in: reassemble flows and scan payloads.
    void finish() {
        for (auto& [key, flow] : flows) {
            std::vector<std::uint8_t> stream;
            bool first = true;
            std::uint32_t expect = 0;
            for (auto& [seq, payload] : flow.segments) {
                if (first) {
                    expect = seq;
                    first = false;
                }
                if (seq > expect) break;  // gap: stop at the contiguous prefix
                std::size_t skip = expect - seq;  // retransmission overlap
                if (skip >= payload.size()) continue;
                stream.insert(stream.end(), payload.begin() + static_cast<std::ptrdiff_t>(skip),
                              payload.end());
                expect = seq + static_cast<std::uint32_t>(payload.size());
            }
            if (stream.empty()) continue;
            scan_http(key, stream);
            scan_tls(key, stream);
        }
        // OUI lookup for every device record
        for (auto& [mac, dev] : devices) {
            if (auto registrant = oui.lookup(mac)) dev.add_value(FeatureType::Oui, *registrant, psl);
        }
    }

    std::vector<DeviceFeatures> results() {
        std::vector<DeviceFeatures> out;
        out.reserve(devices.size());
        for (auto& [mac, dev] : devices) out.push_back(std::move(dev));
        return out;
    }
};

void parse_pcap_classic(Reader& r, Extractor& ex) {
    // global header: magic(4) version(4) thiszone(4) sigfigs(4) snaplen(4) network(4)
    if (!r.need(24)) throw ParseError("truncated pcap global header", 0);
    r.pos = 20;
    std::uint32_t linktype = r.u32() & 0x0FFFFFFF;  // mask FCS bits
    if (linktype != kLinktypeEthernet)
        throw ParseError("unsupported link type " + std::to_string(linktype), 20);
    while (r.remaining() > 0) {
        std::size_t record_off = r.pos;
        if (!r.need(16)) throw ParseError("truncated pcap record header", record_off);
        r.pos += 8;  // timestamps
        std::uint32_t incl_len = r.u32();
        r.u32();  // orig_len
        if (incl_len > kMaxPacketLen)
            throw ParseError("implausible packet length " + std::to_string(incl_len), record_off);
        if (!r.need(incl_len)) throw ParseError("truncated packet data", record_off);
        ex.handle_packet(r.take(incl_len));
    }
}

void parse_pcapng(Reader& r, Extractor& ex) {
    std::vector<std::uint32_t> interface_linktypes;
    bool have_section = false;
    while (r.remaining() > 0) {
        std::size_t block_off = r.pos;
        if (!r.need(12)) throw ParseError("truncated pcapng block header", block_off);
        std::uint32_t block_type = r.u32();
        if (block_type == kPcapngShb) {
            // byte-order magic decides endianness for the section
            if (!r.need(8)) throw ParseError("truncated section header", block_off);
            std::size_t save = r.pos;
            r.pos += 4;
            std::uint32_t bom = r.u32();
            if (bom == 0x3C4D2B1A) r.little_endian = !r.little_endian;
            else if (bom != 0x1A2B3C4D)
                throw ParseError("bad pcapng byte-order magic", block_off + 8);
            r.pos = save;
            interface_linktypes.clear();
            have_section = true;
        } else if (!have_section) {
            throw ParseError("pcapng block before section header", block_off);
        }
        std::uint32_t total_len = r.u32();
        if (total_len < 12 || total_len % 4 != 0)
            throw ParseError("bad pcapng block length " + std::to_string(total_len), block_off + 4);
        if (r.data.size() - block_off < total_len)
            throw ParseError("truncated pcapng block", block_off);
        Bytes body = r.data.subspan(block_off + 8, total_len - 12);
        Reader br{r.data.subspan(block_off + 8, total_len - 12), 0, r.little_endian};

        switch (block_type) {
            case kPcapngShb:
                break;
            case 1: {  // Interface Description Block
                if (!br.need(4)) throw ParseError("truncated interface block", block_off);
                std::uint32_t linktype = br.u16();
                if (linktype != kLinktypeEthernet)
                    throw ParseError("unsupported link type " + std::to_string(linktype), block_off);
                interface_linktypes.push_back(linktype);
                break;
            }
            case 6: {  // Enhanced Packet Block
                if (!br.need(20)) throw ParseError("truncated packet block", block_off);
                std::uint32_t iface = br.u32();
                if (iface >= interface_linktypes.size())
                    throw ParseError("packet references unknown interface", block_off);
                br.pos += 8;  // timestamp
                std::uint32_t capt_len = br.u32();
                br.u32();  // orig_len
                if (!br.need(capt_len)) throw ParseError("truncated packet data", block_off);
                ex.handle_packet(br.take(capt_len));
                break;
            }
            case 3: {  // Simple Packet Block
                if (interface_linktypes.empty())
                    throw ParseError("simple packet block without interface", block_off);
                if (!br.need(4)) throw ParseError("truncated packet block", block_off);
                std::uint32_t orig_len = br.u32();
                std::size_t capt = std::min<std::size_t>(orig_len, body.size() - 4);
                ex.handle_packet(br.take(capt));
                break;
            }
            case 2: {  // obsolete Packet Block
                if (!br.need(20)) throw ParseError("truncated packet block", block_off);
                br.pos += 12;  // iface, drops, timestamp
                std::uint32_t capt_len = br.u32();
                br.u32();
                if (!br.need(capt_len)) throw ParseError("truncated packet data", block_off);
                ex.handle_packet(br.take(capt_len));
                break;
            }
            default:
                break;  // statistics, name resolution, custom blocks
        }
        r.pos = block_off + total_len;
    }
}

}  // namespace

std::vector<DeviceFeatures> extract_from_pcap(Bytes capture, const OuiDatabase& oui,
                                              const std::set<MacAddress>* device_filter,
                                              ExtractionStats* stats,
                                              const PublicSuffixList& psl) {
    Extractor ex{oui, device_filter, psl, {}, {}, {}};
    Reader r{capture, 0, true};
    if (!r.need(4)) throw ParseError("capture shorter than any known magic", 0);
    std::uint32_t magic = r.u32();
    r.pos = 0;
    switch (magic) {
        case kPcapMagicUs:
        case kPcapMagicNs:
            parse_pcap_classic(r, ex);
            break;
        case kPcapMagicUsSwapped:
        case kPcapMagicNsSwapped:
            r.little_endian = false;
            parse_pcap_classic(r, ex);
            break;
        case kPcapngShb:
            parse_pcapng(r, ex);
            break;
        default:
            throw ParseError("unrecognized capture magic", 0);
    }
    ex.finish();
    if (stats) *stats = ex.stats;
    return ex.results();
}

std::vector<DeviceFeatures> extract_from_pcap_file(const std::filesystem::path& path,
                                                   const OuiDatabase& oui,
                                                   const std::set<MacAddress>* device_filter,
                                                   ExtractionStats* stats,
                                                   const PublicSuffixList& psl) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open capture file", path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return extract_from_pcap(bytes, oui, device_filter, stats, psl);
}

// ---- minimal DER walker for X.509 issuer extraction -----------------------

namespace {

struct DerTlv {
    std::uint32_t tag = 0;
    Bytes value;
    std::size_t total = 0;  // header + value length
};

std::optional<DerTlv> der_read(Bytes data, std::size_t pos) {
    if (pos + 2 > data.size()) return std::nullopt;
    DerTlv out;
    out.tag = data[pos];
    std::size_t len_pos = pos + 1;
    std::size_t len = data[len_pos];
    std::size_t header = 2;
    if (len & 0x80) {
        std::size_t n = len & 0x7F;
        if (n == 0 || n > 4 || len_pos + 1 + n > data.size()) return std::nullopt;
        len = 0;
        for (std::size_t i = 0; i < n; ++i) len = (len << 8) | data[len_pos + 1 + i];
        header = 2 + n;
    }
    if (pos + header + len > data.size()) return std::nullopt;
    out.value = data.subspan(pos + header, len);
    out.total = header + len;
    return out;
}

std::string der_string(const DerTlv& tlv) {
    switch (tlv.tag) {
        case 0x0C:  // UTF8String
        case 0x13:  // PrintableString
        case 0x16:  // IA5String
        case 0x14:  // TeletexString
            return std::string(reinterpret_cast<const char*>(tlv.value.data()), tlv.value.size());
        case 0x1E: {  // BMPString, UTF-16BE
            std::string out;
            for (std::size_t i = 0; i + 1 < tlv.value.size(); i += 2) {
                if (tlv.value[i] == 0) out.push_back(static_cast<char>(tlv.value[i + 1]));
            }
            return out;
        }
        default:
            return {};
    }
}

}  // namespace

std::string certificate_issuer_cn_o(Bytes der) {
    constexpr std::uint8_t kOidCn[] = {0x55, 0x04, 0x03};
    constexpr std::uint8_t kOidO[] = {0x55, 0x04, 0x0A};

    auto cert = der_read(der, 0);
    if (!cert || cert->tag != 0x30) return {};
    auto tbs = der_read(cert->value, 0);
    if (!tbs || tbs->tag != 0x30) return {};

    Bytes t = tbs->value;
    std::size_t pos = 0;
    auto next = [&]() -> std::optional<DerTlv> {
        auto tlv = der_read(t, pos);
        if (tlv) pos += tlv->total;
        return tlv;
    };
    auto field = next();          // [0] version (optional) or serial
    if (field && field->tag == 0xA0) field = next();  // skip explicit version
    if (!field) return {};        // serial consumed
    if (!next()) return {};       // signature algorithm
    auto issuer = next();         // issuer RDNSequence
    if (!issuer || issuer->tag != 0x30) return {};

    std::string cn, o;
    std::size_t rp = 0;
    while (auto rdn_set = der_read(issuer->value, rp)) {
        rp += rdn_set->total;
        if (rdn_set->tag != 0x31) continue;
        std::size_t ap = 0;
        while (auto atv = der_read(rdn_set->value, ap)) {
            ap += atv->total;
            if (atv->tag != 0x30) continue;
            auto oid = der_read(atv->value, 0);
            if (!oid || oid->tag != 0x06) continue;
            auto value = der_read(atv->value, oid->total);
            if (!value) continue;
            if (oid->value.size() == 3 && std::memcmp(oid->value.data(), kOidCn, 3) == 0)
                cn = der_string(*value);
            else if (oid->value.size() == 3 && std::memcmp(oid->value.data(), kOidO, 3) == 0)
                o = der_string(*value);
        }
    }
    if (cn.empty()) return o;
    if (o.empty()) return cn;
    return cn + ", " + o;
}

}  // namespace iotl
