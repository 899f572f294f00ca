#include "vizlink/agents.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace vizlink {

std::string_view to_string(AgentRole role) {
    switch (role) {
    case AgentRole::DescriptorVision: return "descriptor_vision";
    case AgentRole::Linker: return "linker";
    case AgentRole::VisGenerator: return "vis_generator";
    }
    return "vis_generator";
}

std::optional<AgentRole> agent_role_from_string(std::string_view s) {
    if (s == "descriptor_vision") return AgentRole::DescriptorVision;
    if (s == "linker") return AgentRole::Linker;
    if (s == "vis_generator") return AgentRole::VisGenerator;
    return std::nullopt;
}

void AgentRequest::validate() const {
    bool vision = role == AgentRole::DescriptorVision;
    if (vision != image.has_value())
        throw Error(ErrorCode::InvalidRequest, vision ? "vision request without an image"
                                                      : "only descriptor_vision requests may carry an image");
}

std::string request_fingerprint(const AgentRequest& request) {
    std::string key;
    key.append(to_string(request.role)).push_back('\n');
    key.append(request.modelId).push_back('\n');
    key.append(normalize_whitespace(request.prompt)).push_back('\n');
    if (request.image) key.append(sha256_hex(*request.image));
    return sha256_hex(key);
}

// ---------------------------------------------------------------------------

ScriptedBackend::ScriptedBackend(std::filesystem::path fixture_dir) : dir_(std::move(fixture_dir)) {}

void ScriptedBackend::add(const AgentRequest& request, std::string response) {
    add_fingerprint(request_fingerprint(request), std::move(response));
}

void ScriptedBackend::add_fingerprint(std::string fingerprint, std::string response) {
    std::lock_guard lock(mutex_);
    fixtures_[std::move(fingerprint)] = std::move(response);
}

void ScriptedBackend::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    std::lock_guard lock(mutex_);
    for (const auto& [fp, text] : fixtures_) {
        std::ofstream out(dir / (fp + ".txt"), std::ios::binary);
        out << text;
    }
}

std::size_t ScriptedBackend::size() const {
    std::lock_guard lock(mutex_);
    return fixtures_.size();
}

std::string ScriptedBackend::complete(const AgentRequest& request) {
    request.validate();
    const std::string fp = request_fingerprint(request);
    {
        std::lock_guard lock(mutex_);
        if (auto it = fixtures_.find(fp); it != fixtures_.end()) return it->second;
    }
    if (dir_) {
        std::ifstream in(*dir_ / (fp + ".txt"), std::ios::binary);
        if (in) {
            std::ostringstream buf;
            buf << in.rdbuf();
            return buf.str();
        }
    }
    throw Error(ErrorCode::AgentUnavailable,
                "no scripted fixture for " + std::string(to_string(request.role)) + " request " + fp, fp);
}

// ---------------------------------------------------------------------------

HttpBackendConfig HttpBackendConfig::from_env() {
    HttpBackendConfig c;
    if (const char* v = std::getenv("AGENT_API_URL")) c.url = v;
    if (const char* v = std::getenv("AGENT_API_KEY")) c.apiKey = v;
    if (const char* v = std::getenv("AGENT_TIMEOUT_SECS")) {
        if (auto secs = parse_number(v); secs && *secs > 0) c.timeout = std::chrono::seconds(static_cast<long>(*secs));
    }
    return c;
}

Json HttpBackend::build_body(const AgentRequest& request) {
    Json content;
    if (request.image) {
        content = Json::array();
        content.push_back({{"type", "text"}, {"text", request.prompt}});
        content.push_back({{"type", "image_url"},
                           {"image_url", {{"url", "data:image/png;base64," + base64_encode(*request.image)}}}});
    } else {
        content = request.prompt;
    }
    return {{"model", request.modelId},
            {"temperature", 0},
            {"messages", Json::array({{{"role", "user"}, {"content", content}}})}};
}

std::string HttpBackend::parse_body(std::string_view body) {
    try {
        Json doc = Json::parse(body);
        const Json& content = doc.at("choices").at(0).at("message").at("content");
        if (content.is_string()) return content.get<std::string>();
        if (content.is_array()) {
            std::string out;
            for (const auto& part : content)
                if (part.contains("text")) out += part["text"].get<std::string>();
            return out;
        }
    } catch (const Json::exception&) {
    }
    throw Error(ErrorCode::AgentMalformedResponse, "agent response has no message content");
}

// ---------------------------------------------------------------------------

AgentLogEntry AgentLogEntry::from_json(const Json& j) {
    AgentLogEntry e;
    e.sequence = j.at("sequence").get<std::uint64_t>();
    e.turnIndex = j.at("turnIndex").get<int>();
    auto role = agent_role_from_string(j.at("role").get<std::string>());
    if (!role) throw Error(ErrorCode::CorruptArchive, "unknown agent role in log");
    e.role = *role;
    e.modelId = j.at("modelId").get<std::string>();
    e.fingerprint = j.at("fingerprint").get<std::string>();
    e.prompt = j.at("prompt").get<std::string>();
    if (j.contains("imageBase64") && !j["imageBase64"].is_null()) e.imageBase64 = j["imageBase64"].get<std::string>();
    if (j.contains("response") && !j["response"].is_null()) e.response = j["response"].get<std::string>();
    if (j.contains("error") && !j["error"].is_null()) e.error = j["error"].get<std::string>();
    e.attempts = j.at("attempts").get<int>();
    e.sampling = j.at("sampling").get<std::string>();
    return e;
}

Json AgentLogEntry::to_json() const {
    Json j = {{"sequence", sequence},
              {"turnIndex", turnIndex},
              {"role", std::string(to_string(role))},
              {"modelId", modelId},
              {"fingerprint", fingerprint},
              {"prompt", prompt}};
    j["imageBase64"] = imageBase64 ? Json(*imageBase64) : Json(nullptr);
    j["response"] = response ? Json(*response) : Json(nullptr);
    j["error"] = error ? Json(*error) : Json(nullptr);
    j["attempts"] = attempts;
    j["sampling"] = sampling;
    return j;
}

AgentClient::AgentClient(AgentBackend& backend, std::string model_id, AgentLog* log, int turn_index)
    : backend_(backend), modelId_(std::move(model_id)), log_(log), turnIndex_(turn_index) {}

std::string AgentClient::complete(AgentRole role, std::string prompt, std::optional<std::string> image) {
    AgentRequest req{role, std::move(prompt), std::move(image), modelId_};
    req.validate();
    ++calls_;

    AgentLogEntry entry;
    entry.turnIndex = turnIndex_;
    entry.role = role;
    entry.modelId = modelId_;
    entry.fingerprint = request_fingerprint(req);
    entry.prompt = req.prompt;
    if (req.image) entry.imageBase64 = base64_encode(*req.image);
    entry.sampling = std::string(kSamplingSetting);
    auto record = [&] {
        if (!log_) return;
        entry.sequence = log_->size();
        log_->push_back(entry);
    };

    for (int attempt = 1;; ++attempt) {
        entry.attempts = attempt;
        try {
            std::string text = backend_.complete(req);
            entry.response = text;
            record();
            return text;
        } catch (const TransportError& e) {
            if (attempt < 2) continue;
            entry.error = std::string(to_string(e.code())) + ": " + e.what();
            record();
            throw;
        } catch (const Error& e) {
            entry.error = std::string(to_string(e.code())) + ": " + e.what();
            record();
            throw;
        }
    }
}

bool ModelRegistry::contains(std::string_view id) const {
    return std::find(models.begin(), models.end(), id) != models.end();
}

ModelConfig switch_model(const ModelConfig& current, const ModelRegistry& registry, const std::string& model_id) {
    if (!registry.contains(model_id)) throw Error(ErrorCode::UnknownModel, "model '" + model_id + "' is not registered");
    ModelConfig next = current;
    next.modelId = model_id;
    return next;
}

} // namespace vizlink
