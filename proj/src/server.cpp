#include "vizlink/server.hpp"

#include "vizlink/assets.hpp"
#include "vizlink/error.hpp"

#include <httplib.h>

#include <fstream>
#include <random>
#include <sstream>

namespace vizlink {

ServerConfig ServerConfig::from_json(const Json& j) {
    ServerConfig c;
    try {
        c.host = j.value("host", c.host);
        c.port = j.value("port", c.port);
        if (j.contains("models")) c.models.models = j["models"].get<std::vector<std::string>>();
        c.models.defaultModel = j.value("defaultModel", c.models.models.empty() ? "" : c.models.models.front());
        c.backend = j.value("backend", c.backend);
        if (j.contains("fixtureDir")) c.fixtureDir = j["fixtureDir"].get<std::string>();
        c.corsOrigin = j.value("corsOrigin", c.corsOrigin);
        if (j.contains("agentUrl")) c.live.url = j["agentUrl"].get<std::string>();
        if (j.contains("agentTimeoutSecs")) c.live.timeout = std::chrono::seconds(j["agentTimeoutSecs"].get<int>());
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidRequest, "invalid server configuration", e.what());
    }
    if (c.backend != "scripted" && c.backend != "live")
        throw Error(ErrorCode::InvalidRequest, "backend must be \"scripted\" or \"live\"");
    if (!c.models.contains(c.models.defaultModel))
        throw Error(ErrorCode::UnknownModel, "default model '" + c.models.defaultModel + "' is not registered");
    return c;
}

ServerConfig ServerConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open config file " + file.string());
    try {
        return from_json(Json::parse(in));
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::InvalidRequest, "config file is not valid JSON", e.what());
    }
}

std::unique_ptr<AgentBackend> make_backend(const ServerConfig& config) {
    if (config.backend == "live") {
        if (config.live.url.empty()) throw Error(ErrorCode::AgentUnavailable, "live backend needs an agent URL");
        return std::make_unique<HttpBackend>(config.live);
    }
    if (config.fixtureDir) return std::make_unique<ScriptedBackend>(*config.fixtureDir);
    return std::make_unique<ScriptedBackend>();
}

const std::vector<Route>& route_table() {
    static const std::vector<Route> routes = {
        {"POST", "/datasets"},
        {"GET", "/datasets/{id}"},
        {"POST", "/sessions"},
        {"POST", "/sessions/import"},
        {"GET", "/sessions/{id}"},
        {"GET", "/sessions/{id}/export"},
        {"POST", "/sessions/{id}/turns"},
        {"PUT", "/sessions/{id}/turns/{k}"},
        {"PUT", "/sessions/{id}/turns/{k}/code"},
        {"POST", "/sessions/{id}/turns/{k}/thumbnail"},
        {"PUT", "/sessions/{id}/model"},
        {"GET", "/health"},
        {"GET", "/models"},
    };
    return routes;
}

Json api_error_body(const Error& e) {
    return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"detail", e.detail()}};
}

// ---------------------------------------------------------------------------

namespace {

const Json& field(const Json& body, const char* key) {
    if (!body.is_object() || !body.contains(key))
        throw Error(ErrorCode::InvalidRequest, std::string("missing field '") + key + "'");
    return body[key];
}

std::string string_field(const Json& body, const char* key) {
    const Json& v = field(body, key);
    if (!v.is_string()) throw Error(ErrorCode::InvalidRequest, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<DirectManipulation> interactions_of(const Json& v) {
    if (!v.is_array()) throw Error(ErrorCode::InvalidRequest, "interactions must be an array");
    std::vector<DirectManipulation> out;
    for (const auto& item : v) out.push_back(DirectManipulation::from_json(item));
    return out;
}

} // namespace

Api::Api(ServerConfig config, std::shared_ptr<AgentBackend> backend, Clock clock)
    : config_(std::move(config)), backend_(std::move(backend)), clock_(std::move(clock)) {
    if (!backend_) throw Error(ErrorCode::Internal, "api needs an agent backend");
}

std::shared_ptr<Api::Slot> Api::slot(const std::string& session_id) const {
    std::shared_lock lock(storeMutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "unknown session '" + session_id + "'");
    return it->second;
}

std::shared_ptr<const Dataset> Api::dataset(const std::string& id) const {
    std::shared_lock lock(storeMutex_);
    auto it = datasets_.find(id);
    if (it == datasets_.end()) throw Error(ErrorCode::NotFound, "unknown dataset '" + id + "'");
    return it->second;
}

std::string Api::fresh_session_id() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    std::ostringstream out;
    out << "s-" << std::hex << rng() << "-" << ++idCounter_;
    return out.str();
}

Json Api::upload_dataset(std::string_view csv, std::string name, std::optional<std::string> description,
                         const InferOptions& options) {
    if (name.empty()) name = "dataset";
    Dataset d = build_dataset(name, parse_csv(csv), options);
    if (description && !trim(*description).empty()) {
        d.sourceDescription = trim(*description);
        d.assign_id();
    }
    auto shared = std::make_shared<const Dataset>(std::move(d));
    {
        std::unique_lock lock(storeMutex_);
        datasets_[shared->id] = shared;
    }
    return {{"datasetId", shared->id},
            {"name", shared->name},
            {"rowCount", shared->rows.size()},
            {"schema", shared->schema_json()},
            {"description", describe_dataset(*shared)}};
}

Json Api::get_dataset(const std::string& id, std::size_t offset, std::size_t limit) const {
    auto d = dataset(id);
    return {{"datasetId", d->id},
            {"name", d->name},
            {"rowCount", d->rows.size()},
            {"schema", d->schema_json()},
            {"offset", offset},
            {"limit", limit},
            {"rows", d->rows_json(offset, limit)}};
}

Json Api::create_session(const Json& body) {
    auto d = dataset(string_field(body, "datasetId"));
    std::string model = config_.models.defaultModel;
    if (body.contains("modelId")) model = vizlink::switch_model({model}, config_.models, string_field(body, "modelId")).modelId;
    auto s = std::make_shared<Slot>();
    std::unique_lock lock(storeMutex_);
    std::string id = fresh_session_id();
    s->session = new_session(id, std::move(d), {model});
    sessions_[id] = s;
    return {{"sessionId", id}};
}

Json Api::append_turn(const std::string& session_id, const Json& body) {
    auto s = slot(session_id);
    std::string nl = string_field(body, "nl");
    auto manipulations = body.contains("interactions") ? interactions_of(body["interactions"])
                                                       : std::vector<DirectManipulation>{};
    std::lock_guard lock(s->mutex);
    return vizlink::append_entry(s->session, *backend_, nl, manipulations, clock_).to_json();
}

Json Api::edit_turn(const std::string& session_id, int index, const Json& body) {
    auto s = slot(session_id);
    if (!body.is_object()) throw Error(ErrorCode::InvalidRequest, "body must be a JSON object");
    std::optional<std::vector<DirectManipulation>> manipulations;
    if (body.contains("interactions")) manipulations = interactions_of(body["interactions"]);
    std::optional<std::string> nl;
    if (body.contains("nl")) nl = string_field(body, "nl");
    std::lock_guard lock(s->mutex);
    if (index < 0 || static_cast<std::size_t>(index) >= s->session.entries.size())
        throw Error(ErrorCode::NotFound, "no entry " + std::to_string(index) + " in session " + session_id);
    const SessionEntry& old = s->session.entries[static_cast<std::size_t>(index)];
    std::string new_nl = nl ? *nl : old.nlInput;
    auto new_manipulations = manipulations ? *manipulations : old.manipulations;
    return vizlink::edit_entry(s->session, *backend_, index, new_nl, new_manipulations, clock_).to_json();
}

Json Api::update_code(const std::string& session_id, int index, const Json& body) {
    auto s = slot(session_id);
    std::string code = string_field(body, "code");
    std::lock_guard lock(s->mutex);
    return revise_code(s->session, index, code).to_json();
}

Json Api::attach_thumbnail(const std::string& session_id, int index, const Json& body) {
    auto s = slot(session_id);
    std::string png = base64_decode(string_field(body, "pngBase64"));
    std::lock_guard lock(s->mutex);
    vizlink::attach_thumbnail(s->session, index, std::move(png));
    return {{"ok", true}};
}

Json Api::get_session(const std::string& session_id) const {
    auto s = slot(session_id);
    std::lock_guard lock(s->mutex);
    return s->session.to_json();
}

std::string Api::export_session(const std::string& session_id) const {
    auto s = slot(session_id);
    std::lock_guard lock(s->mutex);
    return save_session(s->session);
}

Json Api::import_session(std::string_view archive) {
    Session loaded = load_session(archive);
    if (!loaded.dataset) throw Error(ErrorCode::CorruptArchive, "archive has no embedded dataset");
    auto s = std::make_shared<Slot>();
    std::string id = loaded.id;
    std::unique_lock lock(storeMutex_);
    auto known = datasets_.find(loaded.dataset->id);
    if (known != datasets_.end() && *known->second == *loaded.dataset) loaded.dataset = known->second;
    else datasets_[loaded.dataset->id] = loaded.dataset;
    s->session = std::move(loaded);
    sessions_[id] = s;
    return {{"sessionId", id}};
}

Json Api::switch_model(const std::string& session_id, const Json& body) {
    auto s = slot(session_id);
    std::string model = string_field(body, "modelId");
    std::lock_guard lock(s->mutex);
    s->session.model = vizlink::switch_model(s->session.model, config_.models, model);
    return {{"ok", true}, {"modelId", s->session.model.modelId}};
}

Json Api::health() const {
    return {{"status", "ok"}, {"templateVersion", assets::kTemplateVersion}, {"backend", backend_->identity()}};
}

Json Api::models() const { return {{"models", config_.models.models}, {"defaultModel", config_.models.defaultModel}}; }

// ---------------------------------------------------------------------------
// HTTP transport

namespace {

Json parse_json_body(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    try {
        return Json::parse(req.body);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::InvalidRequest, "request body is not valid JSON", e.what());
    }
}

int index_param(const httplib::Request& req, std::size_t group) {
    const std::string s = req.matches[group];
    try {
        return std::stoi(s);
    } catch (const std::exception&) {
        throw Error(ErrorCode::NotFound, "no entry '" + s + "'");
    }
}

std::size_t size_param(const httplib::Request& req, const char* key, std::size_t fallback) {
    if (!req.has_param(key)) return fallback;
    auto v = parse_number(req.get_param_value(key));
    if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v)))
        throw Error(ErrorCode::InvalidRequest, std::string("query parameter '") + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(*v);
}

void send_json(httplib::Response& res, const Json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <typename F> httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const Error& e) {
            send_json(res, api_error_body(e), http_status(e.code()));
        } catch (const Json::exception& e) {
            send_json(res, api_error_body(Error(ErrorCode::InvalidRequest, "request does not match the schema", e.what())),
                      422);
        } catch (const std::exception& e) {
            send_json(res, api_error_body(Error(ErrorCode::Internal, "internal error", e.what())), 500);
        }
    };
}

InferOptions ordinal_hints(const std::string& text) {
    InferOptions options;
    if (trim(text).empty()) return options;
    try {
        options.ordinalLevels = Json::parse(text).get<std::map<std::string, std::vector<std::string>>>();
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidRequest, "ordinal must map attribute names to level lists", e.what());
    }
    return options;
}

} // namespace

void install_routes(httplib::Server& server, Api& api) {
    const std::string origin = api.config().corsOrigin;
    server.set_default_headers({{"Access-Control-Allow-Origin", origin},
                                {"Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Post("/datasets", guarded([&api](const httplib::Request& req, httplib::Response& res) {
                    std::string csv, name, description, ordinal;
                    if (req.is_multipart_form_data()) {
                        if (!req.has_file("file")) throw Error(ErrorCode::InvalidRequest, "multipart field 'file' is required");
                        auto file = req.get_file_value("file");
                        csv = file.content;
                        name = req.has_file("name") ? req.get_file_value("name").content : file.filename;
                        if (req.has_file("description")) description = req.get_file_value("description").content;
                        if (req.has_file("ordinal")) ordinal = req.get_file_value("ordinal").content;
                    } else {
                        csv = req.body;
                        name = req.get_param_value("name");
                        description = req.get_param_value("description");
                        ordinal = req.get_param_value("ordinal");
                    }
                    std::optional<std::string> desc;
                    if (!description.empty()) desc = description;
                    send_json(res, api.upload_dataset(csv, name, desc, ordinal_hints(ordinal)));
                }));
    server.Get(R"(/datasets/([^/]+))", guarded([&api](const httplib::Request& req, httplib::Response& res) {
                   send_json(res, api.get_dataset(req.matches[1], size_param(req, "offset", 0),
                                                  size_param(req, "limit", kDefaultPageSize)));
               }));
    server.Post("/sessions", guarded([&api](const httplib::Request& req, httplib::Response& res) {
                    send_json(res, api.create_session(parse_json_body(req)));
                }));
    server.Post("/sessions/import", guarded([&api](const httplib::Request& req, httplib::Response& res) {
                    send_json(res, api.import_session(req.body));
                }));
    server.Get(R"(/sessions/([^/]+))", guarded([&api](const httplib::Request& req, httplib::Response& res) {
                   send_json(res, api.get_session(req.matches[1]));
               }));
    server.Get(R"(/sessions/([^/]+)/export)", guarded([&api](const httplib::Request& req, httplib::Response& res) {
                   std::string id = req.matches[1];
                   res.set_content(api.export_session(id), "application/json");
                   res.set_header("Content-Disposition", "attachment; filename=\"" + id + ".json\"");
               }));
    server.Post(R"(/sessions/([^/]+)/turns)", guarded([&api](const httplib::Request& req, httplib::Response& res) {
                    send_json(res, api.append_turn(req.matches[1], parse_json_body(req)));
                }));
    server.Put(R"(/sessions/([^/]+)/turns/([^/]+))", guarded([&api](const httplib::Request& req, httplib::Response& res) {
                   send_json(res, api.edit_turn(req.matches[1], index_param(req, 2), parse_json_body(req)));
               }));
    server.Put(R"(/sessions/([^/]+)/turns/([^/]+)/code)",
               guarded([&api](const httplib::Request& req, httplib::Response& res) {
                   send_json(res, api.update_code(req.matches[1], index_param(req, 2), parse_json_body(req)));
               }));
    server.Post(R"(/sessions/([^/]+)/turns/([^/]+)/thumbnail)",
                guarded([&api](const httplib::Request& req, httplib::Response& res) {
                    send_json(res, api.attach_thumbnail(req.matches[1], index_param(req, 2), parse_json_body(req)));
                }));
    server.Put(R"(/sessions/([^/]+)/model)", guarded([&api](const httplib::Request& req, httplib::Response& res) {
                   send_json(res, api.switch_model(req.matches[1], parse_json_body(req)));
               }));
    server.Get("/health", guarded([&api](const httplib::Request&, httplib::Response& res) { send_json(res, api.health()); }));
    server.Get("/models", guarded([&api](const httplib::Request&, httplib::Response& res) { send_json(res, api.models()); }));

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        Error e(res.status == 404 ? ErrorCode::NotFound : ErrorCode::InvalidRequest, "no such endpoint");
        res.set_content(api_error_body(e).dump(), "application/json");
    });
}

} // namespace vizlink
