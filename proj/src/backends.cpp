#include "iotl/backends.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "iotl/errors.hpp"
#include "iotl/text_match.hpp"

namespace iotl {

using nlohmann::json;

namespace {

// Extracts the first balanced JSON object or array embedded in free text.
std::optional<json> embedded_json(const std::string& text, char open, char close) {
    std::size_t start = text.find(open);
    while (start != std::string::npos) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == open) ++depth;
            else if (c == close) {
                if (--depth == 0) {
                    json j = json::parse(text.substr(start, i - start + 1), nullptr, false);
                    if (!j.is_discarded()) return j;
                    break;
                }
            }
        }
        start = text.find(open, start + 1);
    }
    return std::nullopt;
}

std::string now_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

template <typename Fn>
auto with_retries(int max_attempts, int backoff_base_ms, Fn&& fn) {
    std::string last_error;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(backoff_base_ms * (1 << (attempt - 1))));
        }
        try {
            return fn();
        } catch (const TransportError& e) {
            last_error = e.what();
        }
    }
    throw TransportError("endpoint unreachable after " + std::to_string(max_attempts) +
                         " attempts: " + last_error);
}

}  // namespace

std::vector<ClassifierScore> classify_text(const std::string& text,
                                           const std::vector<std::string>& candidates,
                                           ClassifierBackend& backend) {
    if (candidates.empty()) throw ValidationError("classify_text needs at least one candidate");
    auto scores = backend.classify(text, candidates);
    if (scores.size() != candidates.size())
        throw ContractError("classifier returned " + std::to_string(scores.size()) +
                            " scores for " + std::to_string(candidates.size()) + " candidates");
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (scores[i].label != candidates[i])
            throw ContractError("classifier returned unknown label '" + scores[i].label + "'");
        if (!(scores[i].confidence >= 0.0 && scores[i].confidence <= 1.0))
            throw ContractError("confidence for '" + scores[i].label + "' outside [0,1]");
    }
    return scores;
}

KeywordOracleBackend::KeywordOracleBackend(std::map<std::string, std::vector<std::string>> keywords)
    : keywords_(std::move(keywords)) {}

KeywordOracleBackend KeywordOracleBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open keyword file", path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ValidationError("keyword file must be a JSON object", path.string());
    std::map<std::string, std::vector<std::string>> keywords;
    for (auto& [label, list] : j.items()) {
        if (!list.is_array())
            throw ValidationError("keywords for '" + label + "' must be an array", path.string());
        std::vector<std::string> kws;
        for (const auto& kw : list) kws.push_back(kw.get<std::string>());
        keywords[normalize_catalog_key(label)] = std::move(kws);
    }
    return KeywordOracleBackend(std::move(keywords));
}

std::vector<ClassifierScore> KeywordOracleBackend::classify(
    const std::string& text, const std::vector<std::string>& candidates) {
    std::vector<ClassifierScore> out;
    out.reserve(candidates.size());
    for (const auto& candidate : candidates) {
        auto it = keywords_.find(candidate);
        // a label with no configured keywords falls back to its own name
        const std::vector<std::string> fallback{candidate};
        const std::vector<std::string>& kws =
            (it != keywords_.end() && !it->second.empty()) ? it->second : fallback;
        int matched = 0;
        for (const auto& kw : kws) {
            if (matches_any({fold_key(kw)}, text)) ++matched;
        }
        double confidence = std::min(1.0, static_cast<double>(matched) /
                                              static_cast<double>(kws.size()));
        out.push_back({candidate, confidence});
    }
    return out;
}

AuditLog::AuditLog(std::filesystem::path path) : path_(std::move(path)) {
    if (!path_.empty() && path_.has_parent_path())
        std::filesystem::create_directories(path_.parent_path());
}

void AuditLog::record(const std::string& endpoint, const std::string& request,
                      const std::string& response) {
    if (path_.empty()) return;
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::app);
    json line{{"time", now_iso8601()},
              {"endpoint", endpoint},
              {"request", request},
              {"response", response}};
    out << line.dump() << "\n";
}

RemoteZeroShotBackend::RemoteZeroShotBackend(std::string base_url, AuditLog* audit,
                                             RemoteBackendOptions options)
    : base_url_(std::move(base_url)), audit_(audit), options_(options) {}

std::vector<ClassifierScore> RemoteZeroShotBackend::classify(
    const std::string& text, const std::vector<std::string>& candidates) {
    json request{{"text", text},
                 {"labels", candidates},
                 {"hypothesis_template", options_.hypothesis_template}};
    const std::string body = request.dump();

    std::string response_body = with_retries(options_.max_attempts, options_.backoff_base_ms, [&] {
        httplib::Client client(base_url_);
        client.set_connection_timeout(options_.timeout_sec);
        client.set_read_timeout(options_.timeout_sec);
        auto res = client.Post("/classify", body, "application/json");
        if (!res) throw TransportError(httplib::to_string(res.error()));
        if (res->status == 429) throw QuotaError("zero-shot endpoint quota exceeded");
        if (res->status != 200) throw TransportError("HTTP " + std::to_string(res->status));
        return res->body;
    });
    if (audit_) audit_->record(base_url_ + "/classify", body, response_body);

    json j = json::parse(response_body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("scores") || !j["scores"].is_array())
        throw ContractError("zero-shot response missing 'scores' array");
    std::map<std::string, double> by_label;
    for (const auto& s : j["scores"]) {
        if (!s.is_object() || !s.contains("label") || !s.contains("confidence"))
            throw ContractError("malformed score entry in zero-shot response");
        by_label[s["label"].get<std::string>()] = s["confidence"].get<double>();
    }
    std::vector<ClassifierScore> out;
    out.reserve(candidates.size());
    for (const auto& candidate : candidates) {
        auto it = by_label.find(candidate);
        if (it == by_label.end())
            throw ContractError("zero-shot response missing label '" + candidate + "'");
        out.push_back({candidate, it->second});
        by_label.erase(it);
    }
    if (!by_label.empty())
        throw ContractError("zero-shot response returned unknown label '" +
                            by_label.begin()->first + "'");
    return out;
}

HttpChatBackend::HttpChatBackend(std::string base_url, AuditLog* audit,
                                 RemoteBackendOptions options)
    : base_url_(std::move(base_url)), audit_(audit), options_(options) {}

ChatExchange HttpChatBackend::send(const std::string& system, const std::string& user) {
    json request{{"system", system}, {"user", user}};
    const std::string body = request.dump();
    std::string response_body = with_retries(options_.max_attempts, options_.backoff_base_ms, [&] {
        httplib::Client client(base_url_);
        client.set_connection_timeout(options_.timeout_sec);
        client.set_read_timeout(options_.timeout_sec);
        auto res = client.Post("/chat", body, "application/json");
        if (!res) throw TransportError(httplib::to_string(res.error()));
        if (res->status == 429) throw QuotaError("chat endpoint quota exceeded");
        if (res->status != 200) throw TransportError("HTTP " + std::to_string(res->status));
        return res->body;
    });
    if (audit_) audit_->record(base_url_ + "/chat", body, response_body);

    json j = json::parse(response_body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("text") || !j["text"].is_string())
        throw ContractError("chat response missing 'text' field");
    return ChatExchange{system, user, j["text"].get<std::string>()};
}

StubChatBackend::StubChatBackend(std::filesystem::path replies_file, AuditLog* audit)
    : audit_(audit) {
    std::ifstream in(replies_file);
    if (!in) throw ValidationError("cannot open stub replies file", replies_file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    replies_raw_ = ss.str();
}

ChatExchange StubChatBackend::send(const std::string& system, const std::string& user) {
    json replies = json::parse(replies_raw_, nullptr, false);
    if (replies.is_discarded() || !replies.is_object())
        throw ValidationError("stub replies file must be a JSON object");

    auto task_of = [&](std::string_view marker) { return user.find(marker) != std::string::npos; };
    std::string task;
    if (task_of(kNerMarker)) task = "ner";
    else if (task_of(kFilterMarker)) task = "filter";
    else if (task_of(kAcquireMarker)) task = "acquire";
    else if (task_of(kVerifyMarker)) task = "verify";
    else if (task_of(kLabelMarker)) task = "label";
    else throw ContractError("stub chat backend received a prompt without a task marker");

    if (replies.contains("fail") && replies["fail"].is_array()) {
        for (const auto& f : replies["fail"]) {
            if (f.get<std::string>() == task)
                throw TransportError("stub injected failure for stage '" + task + "'");
        }
    }

    std::string text;
    if (task == "ner") {
        text = replies.value("ner", json::array()).dump();
    } else if (task == "filter") {
        // flag every entity listed in the prompt after the "---" separator
        json flags = replies.value("filter", json::object());
        std::istringstream lines(user.substr(user.find("---") + 3));
        std::string line;
        std::ostringstream reply;
        while (std::getline(lines, line)) {
            if (line.empty() || line == "\r") continue;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            bool flag = flags.value(line, false);
            reply << line << ": " << (flag ? "True" : "False") << "\n";
        }
        text = reply.str();
    } else if (task == "acquire") {
        json table = replies.value("acquire", json::object());
        std::string function;
        auto pos = user.find("[function:");
        if (pos != std::string::npos) {
            auto end = user.find(']', pos);
            function = user.substr(pos + 10, end - pos - 10);
        }
        text = table.value(function, json::array()).dump();
    } else if (task == "verify") {
        json table = replies.value("verify", json::object());
        std::string vendor, function;
        auto vpos = user.find("[vendor:");
        if (vpos != std::string::npos) vendor = user.substr(vpos + 8, user.find(']', vpos) - vpos - 8);
        auto fpos = user.find("[function:");
        if (fpos != std::string::npos)
            function = user.substr(fpos + 10, user.find(']', fpos) - fpos - 10);
        bool confirmed = table.value(vendor + "|" + function, false);
        text = json{{"confirmed", confirmed}}.dump();
    } else {  // label
        text = replies.value("label", json::object()).dump();
    }

    if (audit_) audit_->record("stub://chat", user, text);
    return ChatExchange{system, user, text};
}

std::unique_ptr<ChatBackend> make_chat_backend(const std::string& url, AuditLog* audit) {
    constexpr std::string_view kStubScheme = "stub://";
    if (url.rfind(kStubScheme, 0) == 0)
        return std::make_unique<StubChatBackend>(url.substr(kStubScheme.size()), audit);
    return std::make_unique<HttpChatBackend>(url, audit);
}

namespace {

std::vector<std::string> chunk_texts(const std::vector<std::string>& texts,
                                     std::size_t chunk_chars) {
    std::vector<std::string> chunks;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) chunks.push_back(std::move(current)), current.clear();
    };
    for (const auto& text : texts) {
        if (text.empty()) continue;
        if (text.size() >= chunk_chars) {
            flush();
            for (std::size_t off = 0; off < text.size(); off += chunk_chars)
                chunks.push_back(text.substr(off, chunk_chars));
            continue;
        }
        if (!current.empty() && current.size() + text.size() + 1 > chunk_chars) flush();
        if (!current.empty()) current += '\n';
        current += text;
    }
    flush();
    return chunks;
}

}  // namespace

ChatLabelOutcome chat_label(const DeviceFeatures& features, const Catalogs* catalogs,
                            ChatBackend& chat, std::size_t chunk_chars) {
    json feat;
    for (FeatureType t : kAllFeatureTypes) {
        json arr = json::array();
        for (const auto& v : features.of(t)) arr.push_back(v.text);
        feat[std::string(feature_type_name(t))] = arr;
    }
    std::string serialized = feat.dump();
    if (serialized.size() > chunk_chars) serialized.resize(chunk_chars);

    std::ostringstream user;
    user << kLabelMarker << "\n"
         << "Label the IoT device whose extracted traffic features follow. "
         << "Identify the device vendor";
    if (catalogs) {
        user << " and its function, choosing the function from this list: ";
        const auto& names = catalogs->functions.names();
        for (std::size_t i = 0; i < names.size(); ++i) user << (i ? ", " : "") << names[i];
    }
    user << ".\nReply with a single JSON object: "
         << R"({"vendor": string, "function": string or null, "confidence": number between 0 and 1, )"
         << R"("justification": string of at most 50 words}.)"
         << "\nFeatures:\n" << serialized << "\n";

    const std::string system =
        "You are an expert network analyst who labels IoT devices from their "
        "passive traffic features. Answer with strict JSON only.";
    ChatExchange exchange = chat.send(system, user.str());

    ChatLabelOutcome out;
    out.raw_response = exchange.response;
    auto parsed = embedded_json(exchange.response, '{', '}');
    if (!parsed || !parsed->is_object()) {
        out.vendor = LabelResult::from_ranked({});
        out.function = LabelResult::from_ranked({});
        return out;
    }
    double confidence = 0.0;
    if (parsed->contains("confidence") && (*parsed)["confidence"].is_number())
        confidence = (*parsed)["confidence"].get<double>();
    out.justification = parsed->value("justification", "");

    auto ranked_from = [&](const char* key) {
        std::vector<RankedLabel> ranked;
        if (parsed->contains(key) && (*parsed)[key].is_string()) {
            std::string label = normalize_catalog_key((*parsed)[key].get<std::string>());
            if (!label.empty()) ranked.push_back(RankedLabel{label, confidence, {}});
        }
        return LabelResult::from_ranked(std::move(ranked));
    };
    out.vendor = ranked_from("vendor");
    out.function = ranked_from("function");
    return out;
}

std::set<std::string> ner_extract(const std::vector<std::string>& texts, ChatBackend& chat,
                                  std::size_t chunk_chars) {
    std::set<std::string> entities;
    for (const auto& chunk : chunk_texts(texts, chunk_chars)) {
        std::ostringstream user;
        user << kNerMarker << "\n"
             << "Extract the named entities from the following text that could be "
             << "organizations, manufacturers, or product brands. Reply with a JSON "
             << "array of strings and nothing else.\n---\n"
             << chunk << "\n";
        ChatExchange exchange = chat.send("You are a named-entity recognition system.", user.str());
        auto parsed = embedded_json(exchange.response, '[', ']');
        if (!parsed || !parsed->is_array())
            throw ContractError("NER reply did not contain a JSON array");
        for (const auto& e : *parsed) {
            if (!e.is_string()) continue;
            std::string normalized = normalize_catalog_key(e.get<std::string>());
            if (!normalized.empty()) entities.insert(std::move(normalized));
        }
    }
    return entities;
}

std::set<std::string> filter_entities(const std::set<std::string>& entities, ChatBackend& chat) {
    if (entities.empty()) throw ValidationError("filter_entities needs a non-empty entity set");

    std::ostringstream user;
    user << kFilterMarker << "\n"
         << "I will provide you a list of elements, extracted by a NER system. For each "
         << "one of them check if they represent a name of an IoT manufacturer or another "
         << "manufacture of Network devices and output it as a list of the elements and "
         << "True/False flag\n---\n";
    for (const auto& e : entities) user << e << "\n";
    ChatExchange exchange = chat.send("You validate entity lists.", user.str());

    // normalized name -> requested entity, for case-insensitive echo matching
    std::map<std::string, std::string> requested;
    for (const auto& e : entities) requested[normalize_catalog_key(e)] = e;

    std::set<std::string> kept;
    std::vector<std::string> unparsed;
    auto take = [&](const std::string& name, bool flag) {
        auto it = requested.find(normalize_catalog_key(name));
        if (it == requested.end()) {
            unparsed.push_back(name);
            return;
        }
        if (flag) kept.insert(it->second);
    };

    if (auto arr = embedded_json(exchange.response, '[', ']'); arr && arr->is_array()) {
        for (const auto& item : *arr) {
            if (item.is_array() && item.size() == 2 && item[0].is_string())
                take(item[0].get<std::string>(), item[1].is_boolean() ? item[1].get<bool>() : false);
            else if (item.is_object() && item.contains("element"))
                take(item["element"].get<std::string>(), item.value("flag", false));
            else
                unparsed.push_back(item.dump());
        }
    } else {
        std::istringstream lines(exchange.response);
        std::string line;
        while (std::getline(lines, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            // accept "<entity>: True", "<entity>, False", "<entity> - true"
            std::size_t sep = line.find_last_of(":,-");
            if (sep == std::string::npos) {
                unparsed.push_back(line);
                continue;
            }
            std::string name = line.substr(0, sep);
            std::string flag_text = line.substr(sep + 1);
            while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) name.pop_back();
            std::string flag_lower;
            for (char c : flag_text)
                if (c != ' ' && c != '\t') flag_lower.push_back(static_cast<char>(std::tolower(c)));
            if (flag_lower == "true") take(name, true);
            else if (flag_lower == "false") take(name, false);
            else unparsed.push_back(line);
        }
    }
    if (!unparsed.empty()) {
        std::string msg = "filter reply contained unparsable lines:";
        for (const auto& u : unparsed) msg += " '" + u + "'";
        throw ContractError(msg);
    }
    return kept;
}

}  // namespace iotl
