#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iotl/catalogs.hpp"
#include "iotl/features.hpp"
#include "iotl/scoring.hpp"

namespace iotl {

struct ClassifierScore {
    std::string label;
    double confidence = 0.0;  // in [0,1]; multi-label, need not sum to 1
};

// Zero-shot text classifier contract: exactly one score per candidate label,
// in candidate order.
class ClassifierBackend {
  public:
    virtual ~ClassifierBackend() = default;
    virtual std::vector<ClassifierScore> classify(const std::string& text,
                                                  const std::vector<std::string>& candidates) = 0;
};

// classify_text enforces the contract on top of any backend: candidates must
// be non-empty and the backend must return one score per candidate.
std::vector<ClassifierScore> classify_text(const std::string& text,
                                           const std::vector<std::string>& candidates,
                                           ClassifierBackend& backend);

// Deterministic test oracle standing in for a hosted NLI model. Confidence
// for a label = (distinct keywords of that label found in the text) divided
// by the label's keyword-list length, capped at 1.
class KeywordOracleBackend : public ClassifierBackend {
  public:
    KeywordOracleBackend() = default;
    explicit KeywordOracleBackend(std::map<std::string, std::vector<std::string>> keywords);

    // Loads a {"function": ["keyword", ...]} JSON document.
    static KeywordOracleBackend from_file(const std::filesystem::path& path);

    // Every candidate is guaranteed at least one keyword: its own name.
    std::vector<ClassifierScore> classify(const std::string& text,
                                          const std::vector<std::string>& candidates) override;

  private:
    std::map<std::string, std::vector<std::string>> keywords_;
};

// JSON-lines audit trail of every remote exchange, for human verification.
class AuditLog {
  public:
    AuditLog() = default;  // disabled
    explicit AuditLog(std::filesystem::path path);

    void record(const std::string& endpoint, const std::string& request,
                const std::string& response);
    bool enabled() const { return !path_.empty(); }

  private:
    std::filesystem::path path_;
    std::mutex mutex_;
};

struct RemoteBackendOptions {
    int max_attempts = 3;
    int backoff_base_ms = 200;
    int timeout_sec = 30;
    // NLI hypothesis template forwarded to zero-shot providers that want one.
    std::string hypothesis_template = "This text is about a {label} device.";
};

// HTTP zero-shot endpoint:
//   POST /classify {"text":str,"labels":[str]} -> {"scores":[{"label":str,"confidence":float}]}
class RemoteZeroShotBackend : public ClassifierBackend {
  public:
    RemoteZeroShotBackend(std::string base_url, AuditLog* audit = nullptr,
                          RemoteBackendOptions options = {});
    std::vector<ClassifierScore> classify(const std::string& text,
                                          const std::vector<std::string>& candidates) override;

  private:
    std::string base_url_;
    AuditLog* audit_;
    RemoteBackendOptions options_;
};

// One chat round trip, raw response always retained for audit.
struct ChatExchange {
    std::string system;
    std::string user;
    std::string response;
};

class ChatBackend {
  public:
    virtual ~ChatBackend() = default;
    virtual ChatExchange send(const std::string& system, const std::string& user) = 0;
};

// HTTP chat endpoint: POST /chat {"system":str,"user":str} -> {"text":str}
class HttpChatBackend : public ChatBackend {
  public:
    HttpChatBackend(std::string base_url, AuditLog* audit = nullptr,
                    RemoteBackendOptions options = {});
    ChatExchange send(const std::string& system, const std::string& user) override;

  private:
    std::string base_url_;
    AuditLog* audit_;
    RemoteBackendOptions options_;
};

// Scripted chat backend for offline tests and the stub:// CLI scheme. Replies
// are keyed by the request marker each library prompt embeds; see the
// stub-replies JSON format in the repository fixtures.
class StubChatBackend : public ChatBackend {
  public:
    explicit StubChatBackend(std::filesystem::path replies_file, AuditLog* audit = nullptr);
    ChatExchange send(const std::string& system, const std::string& user) override;

  private:
    std::string replies_raw_;
    AuditLog* audit_;
};

// Builds a chat backend from a URL: "stub://<path>" loads a scripted stub,
// anything else is treated as an HTTP base URL.
std::unique_ptr<ChatBackend> make_chat_backend(const std::string& url, AuditLog* audit = nullptr);

// Markers embedded in library prompts; scripted stubs key on them.
inline constexpr std::string_view kNerMarker = "[task:ner]";
inline constexpr std::string_view kFilterMarker = "[task:filter]";
inline constexpr std::string_view kAcquireMarker = "[task:acquire]";
inline constexpr std::string_view kVerifyMarker = "[task:verify]";
inline constexpr std::string_view kLabelMarker = "[task:label]";

struct ChatLabelOutcome {
    LabelResult vendor;
    LabelResult function;
    std::string justification;  // <= 50 words requested from the model
    std::string raw_response;   // retained even when parsing fails
};

// LLM labeling baseline: asks the chat endpoint for vendor (and function,
// when catalogs are given), a confidence, and a short justification.
// Unparseable replies abstain; the raw text is kept.
ChatLabelOutcome chat_label(const DeviceFeatures& features, const Catalogs* catalogs,
                            ChatBackend& chat, std::size_t chunk_chars = 8000);

// Named-entity extraction over enriched text, chunked to respect the token
// budget; returns the normalized, deduplicated entity union.
std::set<std::string> ner_extract(const std::vector<std::string>& texts, ChatBackend& chat,
                                  std::size_t chunk_chars = 8000);

// Filters NER output down to IoT/network-device manufacturers. The reply must
// flag every requested entity True or False; unparsed lines are an error.
std::set<std::string> filter_entities(const std::set<std::string>& entities, ChatBackend& chat);

}  // namespace iotl
