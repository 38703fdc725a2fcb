#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iotl {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input document or catalog failed validation. `where` is a JSON path or
// file location when one is known.
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg, std::string where = {})
        : Error(where.empty() ? msg : where + ": " + msg), location(std::move(where)) {}
    std::string location;
};

// Malformed binary input (pcap stream, DER blob). Carries the byte offset
// at which parsing failed.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " (at byte offset " + std::to_string(offset) + ")"), byte_offset(offset) {}
    std::size_t byte_offset;
};

// Remote endpoint could not be reached or timed out. Retryable.
struct TransportError : Error {
    using Error::Error;
};

// Remote endpoint rejected the request for quota reasons (HTTP 429).
struct QuotaError : Error {
    using Error::Error;
};

// Remote endpoint answered, but the reply violates the wire contract
// (malformed JSON, unknown labels, missing fields).
struct ContractError : Error {
    using Error::Error;
};

}  // namespace iotl
