#pragma once

#include "vizlink/agents.hpp"
#include "vizlink/dataset.hpp"
#include "vizlink/session.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace vizlink {

inline constexpr std::size_t kDefaultPageSize = 100;

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    ModelRegistry models{{"gpt-4o"}, "gpt-4o"};
    std::string backend = "scripted"; // "scripted" or "live"
    std::optional<std::filesystem::path> fixtureDir;
    std::string corsOrigin = "*";
    HttpBackendConfig live = HttpBackendConfig::from_env();

    // Keys: host, port, models, defaultModel, backend, fixtureDir, corsOrigin, agentUrl, agentTimeoutSecs.
    static ServerConfig from_json(const Json& j);
    static ServerConfig load(const std::filesystem::path& file);
};

std::unique_ptr<AgentBackend> make_backend(const ServerConfig& config);

struct Route {
    std::string method;
    std::string path;
};

// Declared endpoints in registration order.
const std::vector<Route>& route_table();

// {"code", "message", "detail"} body for an error.
Json api_error_body(const Error& e);

// Endpoint logic, independent of the HTTP transport. Every method throws Error.
class Api {
public:
    Api(ServerConfig config, std::shared_ptr<AgentBackend> backend, Clock clock = utc_now_iso);

    Json upload_dataset(std::string_view csv, std::string name, std::optional<std::string> description,
                        const InferOptions& options = {});
    Json get_dataset(const std::string& id, std::size_t offset, std::size_t limit) const;
    Json create_session(const Json& body);
    Json append_turn(const std::string& session_id, const Json& body);
    Json edit_turn(const std::string& session_id, int index, const Json& body);
    Json update_code(const std::string& session_id, int index, const Json& body);
    Json attach_thumbnail(const std::string& session_id, int index, const Json& body);
    Json get_session(const std::string& session_id) const;
    std::string export_session(const std::string& session_id) const;
    Json import_session(std::string_view archive);
    Json switch_model(const std::string& session_id, const Json& body);
    Json health() const;
    Json models() const;

    const ServerConfig& config() const { return config_; }

private:
    struct Slot {
        mutable std::mutex mutex; // one writer per session
        Session session;
    };

    std::shared_ptr<Slot> slot(const std::string& session_id) const;
    std::shared_ptr<const Dataset> dataset(const std::string& id) const;
    std::string fresh_session_id();

    ServerConfig config_;
    std::shared_ptr<AgentBackend> backend_;
    Clock clock_;
    mutable std::shared_mutex storeMutex_;
    std::map<std::string, std::shared_ptr<const Dataset>> datasets_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    std::uint64_t idCounter_ = 0;
};

// Installs every route of route_table() plus CORS handling on an httplib server.
void install_routes(httplib::Server& server, Api& api);

} // namespace vizlink
