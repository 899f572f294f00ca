#pragma once

#include "vizlink/error.hpp"
#include "vizlink/util.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vizlink {

enum class AgentRole { DescriptorVision, Linker, VisGenerator };

std::string_view to_string(AgentRole role);
std::optional<AgentRole> agent_role_from_string(std::string_view s);

struct AgentRequest {
    AgentRole role = AgentRole::VisGenerator;
    std::string prompt;
    std::optional<std::string> image; // raw PNG bytes, DescriptorVision only
    std::string modelId;

    // Throws InvalidRequest when the image/role pairing is violated.
    void validate() const;
};

// sha256 over role, model, whitespace-normalized prompt and image hash.
std::string request_fingerprint(const AgentRequest& request);

// Network-level failure; the only kind of failure that is retried.
class TransportError : public Error {
public:
    using Error::Error;
};

class RateLimitedError : public Error {
public:
    RateLimitedError(const std::string& message, std::optional<int> retry_after_secs)
        : Error(ErrorCode::RateLimited, message,
                retry_after_secs ? "retry-after=" + std::to_string(*retry_after_secs) : std::string{}),
          retryAfterSecs(retry_after_secs) {}
    std::optional<int> retryAfterSecs;
};

class AgentBackend {
public:
    virtual ~AgentBackend() = default;
    virtual std::string complete(const AgentRequest& request) = 0;
    // "scripted" or "live:<url>"
    virtual std::string identity() const = 0;
};

// Deterministic fixture lookup keyed by request fingerprint. Fixtures come from
// an in-memory table or from files named <fingerprint>.txt in a directory.
class ScriptedBackend : public AgentBackend {
public:
    ScriptedBackend() = default;
    explicit ScriptedBackend(std::filesystem::path fixture_dir);

    void add(const AgentRequest& request, std::string response);
    void add_fingerprint(std::string fingerprint, std::string response);
    // Writes every in-memory fixture as <dir>/<fingerprint>.txt.
    void save(const std::filesystem::path& dir) const;
    std::size_t size() const;

    std::string complete(const AgentRequest& request) override;
    std::string identity() const override { return "scripted"; }

private:
    std::optional<std::filesystem::path> dir_;
    mutable std::mutex mutex_;
    std::map<std::string, std::string> fixtures_;
};

struct HttpBackendConfig {
    std::string url;
    std::string apiKey;
    std::chrono::seconds timeout{120};

    // AGENT_API_URL, AGENT_API_KEY, AGENT_TIMEOUT_SECS
    static HttpBackendConfig from_env();
};

// Chat-completions style JSON over HTTP(S).
class HttpBackend : public AgentBackend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    std::string complete(const AgentRequest& request) override;
    std::string identity() const override { return "live:" + config_.url; }

    static Json build_body(const AgentRequest& request);
    // Throws AgentMalformedResponse when no message content is present.
    static std::string parse_body(std::string_view body);

private:
    HttpBackendConfig config_;
};

struct AgentLogEntry {
    std::uint64_t sequence = 0;
    int turnIndex = -1;
    AgentRole role = AgentRole::VisGenerator;
    std::string modelId;
    std::string fingerprint;
    std::string prompt;
    std::optional<std::string> imageBase64;
    std::optional<std::string> response;
    std::optional<std::string> error;
    int attempts = 0;
    std::string sampling;

    Json to_json() const;
    static AgentLogEntry from_json(const Json& j);
    bool operator==(const AgentLogEntry&) const = default;
};

using AgentLog = std::vector<AgentLogEntry>;

inline constexpr std::string_view kSamplingSetting = "temperature=0";

// Issues requests for one turn: stamps the model id, retries one transport
// failure, and appends every request/response pair to the log.
class AgentClient {
public:
    AgentClient(AgentBackend& backend, std::string model_id, AgentLog* log = nullptr, int turn_index = -1);

    std::string complete(AgentRole role, std::string prompt, std::optional<std::string> image = std::nullopt);
    int calls() const { return calls_; }
    const std::string& model_id() const { return modelId_; }

private:
    AgentBackend& backend_;
    std::string modelId_;
    AgentLog* log_;
    int turnIndex_;
    int calls_ = 0;
};

struct ModelRegistry {
    std::vector<std::string> models;
    std::string defaultModel;

    bool contains(std::string_view id) const;
};

struct ModelConfig {
    std::string modelId;
    bool operator==(const ModelConfig&) const = default;
};

// Throws UnknownModel when the id is not registered.
ModelConfig switch_model(const ModelConfig& current, const ModelRegistry& registry, const std::string& model_id);

} // namespace vizlink
