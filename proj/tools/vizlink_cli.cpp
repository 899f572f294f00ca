#include "vizlink/agents.hpp"
#include "vizlink/dataset.hpp"
#include "vizlink/error.hpp"
#include "vizlink/postprocess.hpp"
#include "vizlink/server.hpp"
#include "vizlink/session.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw vizlink::Error(vizlink::ErrorCode::NotFound, "cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

int serve(const std::string& config_path, int port_override) {
    vizlink::ServerConfig config =
        config_path.empty() ? vizlink::ServerConfig{} : vizlink::ServerConfig::load(config_path);
    if (port_override > 0) config.port = port_override;
    std::shared_ptr<vizlink::AgentBackend> backend = vizlink::make_backend(config);
    vizlink::Api api(config, backend);
    httplib::Server server;
    vizlink::install_routes(server, api);
    std::cerr << "listening on " << config.host << ":" << config.port << " (" << backend->identity() << ")\n";
    if (!server.listen(config.host, config.port)) {
        std::cerr << "cannot bind " << config.host << ":" << config.port << "\n";
        return 1;
    }
    return 0;
}

int replay_archive(const std::string& archive_path, const std::string& fixtures) {
    vizlink::Session saved = vizlink::load_session(read_file(archive_path));
    vizlink::ScriptedBackend backend(fixtures);
    vizlink::Session again = vizlink::replay(saved, backend);
    int mismatches = 0;
    for (std::size_t i = 0; i < saved.entries.size(); ++i) {
        const auto& a = saved.entries[i];
        const auto& b = again.entries[i];
        auto dump = [](const auto& e) { return e.artifact ? e.artifact->to_json().dump() : std::string("null"); };
        bool same = dump(a) == dump(b) && a.promptDocument == b.promptDocument;
        std::cout << "entry " << i << ": " << (same ? "identical" : "DIFFERENT") << "\n";
        mismatches += same ? 0 : 1;
    }
    return mismatches == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vizlink: multimodal chart authoring engine"};
    app.require_subcommand(1);

    std::string config_path;
    int port = 0;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
    serve_cmd->add_option("-c,--config", config_path, "JSON config file");
    serve_cmd->add_option("-p,--port", port, "Port override");

    std::string csv_path, dataset_name, description;
    auto* describe_cmd = app.add_subcommand("describe", "Infer a CSV schema and print the dataset description");
    describe_cmd->add_option("csv", csv_path)->required();
    describe_cmd->add_option("-n,--name", dataset_name);
    describe_cmd->add_option("-d,--description", description);

    std::string response_path;
    auto* process_cmd = app.add_subcommand("process", "Post-process a raw generator response into an artifact");
    process_cmd->add_option("response", response_path)->required();

    std::string role = "vis_generator", model = "gpt-4o", prompt_path, image_path;
    auto* fp_cmd = app.add_subcommand("fingerprint", "Print the fixture key of an agent request");
    fp_cmd->add_option("-r,--role", role);
    fp_cmd->add_option("-m,--model", model);
    fp_cmd->add_option("prompt", prompt_path)->required();
    fp_cmd->add_option("-i,--image", image_path);

    std::string archive_path, fixture_dir;
    auto* replay_cmd = app.add_subcommand("replay", "Replay a saved session against fixtures and compare artifacts");
    replay_cmd->add_option("archive", archive_path)->required();
    replay_cmd->add_option("-f,--fixtures", fixture_dir)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve_cmd) return serve(config_path, port);
        if (*describe_cmd) {
            std::string name = dataset_name.empty() ? std::filesystem::path(csv_path).stem().string() : dataset_name;
            vizlink::Dataset d = vizlink::ingest_csv(read_file(csv_path), name);
            if (!description.empty()) d.sourceDescription = description;
            std::cout << vizlink::describe_dataset(d) << "\n";
            return 0;
        }
        if (*process_cmd) {
            auto artifact = vizlink::process(read_file(response_path));
            std::cout << artifact.to_json().dump(2) << "\n";
            return artifact.failure ? 2 : 0;
        }
        if (*fp_cmd) {
            auto parsed = vizlink::agent_role_from_string(role);
            if (!parsed) throw vizlink::Error(vizlink::ErrorCode::InvalidRequest, "unknown role " + role);
            vizlink::AgentRequest request{*parsed, read_file(prompt_path), std::nullopt, model};
            if (!image_path.empty()) request.image = read_file(image_path);
            std::cout << vizlink::request_fingerprint(request) << "\n";
            return 0;
        }
        if (*replay_cmd) return replay_archive(archive_path, fixture_dir);
    } catch (const vizlink::Error& e) {
        std::cerr << vizlink::to_string(e.code()) << ": " << e.what();
        if (!e.detail().empty()) std::cerr << " (" << e.detail() << ")";
        std::cerr << "\n";
        return 1;
    }
    return 0;
}
