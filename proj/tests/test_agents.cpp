#include "vizlink/agents.hpp"
#include "vizlink/error.hpp"

#include "support/test_support.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <thread>

using namespace vizlink;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

class FlakyBackend : public AgentBackend {
public:
    explicit FlakyBackend(int failures, bool transport = true) : failures_(failures), transport_(transport) {}
    std::string complete(const AgentRequest&) override {
        ++calls;
        if (failures_-- > 0) {
            if (transport_) throw TransportError(ErrorCode::AgentUnavailable, "connection reset");
            throw Error(ErrorCode::AgentMalformedResponse, "garbage");
        }
        return "ok";
    }
    std::string identity() const override { return "flaky"; }
    int calls = 0;

private:
    int failures_;
    bool transport_;
};

// Local chat-completions endpoint driven by a per-test handler.
class FakeProvider {
public:
    explicit FakeProvider(httplib::Server::Handler handler) {
        server_.Post("/v1/chat/completions", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeProvider() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

std::string chat_reply(const std::string& text) {
    return Json{{"choices", Json::array({{{"message", {{"role", "assistant"}, {"content", text}}}}})}}.dump();
}

} // namespace

TEST(Fingerprint, Sensitivity) {
    AgentRequest a{AgentRole::VisGenerator, "draw  a\nchart ", std::nullopt, "gpt-4o"};
    AgentRequest b{AgentRole::VisGenerator, "draw a chart", std::nullopt, "gpt-4o"};
    EXPECT_EQ(request_fingerprint(a), request_fingerprint(b));
    AgentRequest other_model = b;
    other_model.modelId = "model-b";
    EXPECT_NE(request_fingerprint(b), request_fingerprint(other_model));
    AgentRequest other_role = b;
    other_role.role = AgentRole::Linker;
    EXPECT_NE(request_fingerprint(b), request_fingerprint(other_role));
    AgentRequest v1{AgentRole::DescriptorVision, "p", std::string("img1"), "gpt-4o"};
    AgentRequest v2{AgentRole::DescriptorVision, "p", std::string("img2"), "gpt-4o"};
    EXPECT_NE(request_fingerprint(v1), request_fingerprint(v2));
    EXPECT_EQ(request_fingerprint(b).size(), 64u);
}

TEST(Scripted, LookupAndMiss) {
    ScriptedBackend backend;
    AgentRequest req{AgentRole::VisGenerator, "draw a chart", std::nullopt, "gpt-4o"};
    backend.add(req, "<D3>x</D3>");
    EXPECT_EQ(backend.complete(req), "<D3>x</D3>");
    AgentRequest miss{AgentRole::VisGenerator, "something else", std::nullopt, "gpt-4o"};
    try {
        backend.complete(miss);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AgentUnavailable);
        EXPECT_NE(std::string(e.what()).find(request_fingerprint(miss)), std::string::npos);
    }
}

TEST(Scripted, DirectoryFixtures) {
    auto dir = testing_support::scratch_dir("scripted");
    ScriptedBackend authoring;
    AgentRequest req{AgentRole::Linker, "{\"nl\":1}", std::nullopt, "gpt-4o"};
    authoring.add(req, "{\"triggers\":[]}");
    authoring.save(dir);
    EXPECT_TRUE(std::filesystem::exists(dir / (request_fingerprint(req) + ".txt")));
    ScriptedBackend replay(dir);
    EXPECT_EQ(replay.complete(req), "{\"triggers\":[]}");
    EXPECT_EQ(replay.identity(), "scripted");
}

TEST(Request, ImageOnlyForVision) {
    EXPECT_EQ(code_of([] { AgentRequest{AgentRole::Linker, "p", std::string("img"), "m"}.validate(); }),
              ErrorCode::InvalidRequest);
    EXPECT_EQ(code_of([] { AgentRequest{AgentRole::DescriptorVision, "p", std::nullopt, "m"}.validate(); }),
              ErrorCode::InvalidRequest);
    ScriptedBackend backend;
    EXPECT_EQ(code_of([&] { backend.complete({AgentRole::VisGenerator, "p", std::string("i"), "m"}); }),
              ErrorCode::InvalidRequest);
}

TEST(Client, RetriesTransportOnce) {
    FlakyBackend once(1);
    AgentLog log;
    AgentClient client(once, "gpt-4o", &log, 3);
    EXPECT_EQ(client.complete(AgentRole::VisGenerator, "p"), "ok");
    EXPECT_EQ(once.calls, 2);
    ASSERT_EQ(log.size(), 1u);
    EXPECT_EQ(log[0].attempts, 2);
    EXPECT_EQ(log[0].turnIndex, 3);
    EXPECT_EQ(log[0].sampling, "temperature=0");

    FlakyBackend twice(2);
    AgentClient failing(twice, "gpt-4o", &log);
    EXPECT_EQ(code_of([&] { failing.complete(AgentRole::VisGenerator, "p"); }), ErrorCode::AgentUnavailable);
    EXPECT_EQ(twice.calls, 2);
    ASSERT_EQ(log.size(), 2u);
    EXPECT_TRUE(log[1].error);
    EXPECT_FALSE(log[1].response);
}

TEST(Client, NoRetryOnMalformedContent) {
    FlakyBackend bad(1, false);
    AgentClient client(bad, "gpt-4o");
    EXPECT_EQ(code_of([&] { client.complete(AgentRole::VisGenerator, "p"); }), ErrorCode::AgentMalformedResponse);
    EXPECT_EQ(bad.calls, 1);
}

TEST(Client, LogReconstructsRequests) {
    testing_support::ResponderBackend backend;
    backend.push(AgentRole::DescriptorVision, "an arrow");
    backend.push(AgentRole::VisGenerator, "<D3></D3>");
    AgentLog log;
    AgentClient client(backend, "gpt-4o", &log, 0);
    client.complete(AgentRole::DescriptorVision, "look", std::string("\x89PNG-bytes"));
    client.complete(AgentRole::VisGenerator, "draw");
    ASSERT_EQ(log.size(), 2u);
    EXPECT_EQ(log[0].sequence + 1, log[1].sequence);
    for (std::size_t i = 0; i < log.size(); ++i) {
        const auto& req = backend.requests[i];
        EXPECT_EQ(log[i].prompt, req.prompt);
        EXPECT_EQ(log[i].modelId, req.modelId);
        EXPECT_EQ(log[i].fingerprint, request_fingerprint(req));
        if (req.image) EXPECT_EQ(base64_decode(*log[i].imageBase64), *req.image);
        else EXPECT_FALSE(log[i].imageBase64);
        EXPECT_EQ(AgentLogEntry::from_json(log[i].to_json()), log[i]);
    }
}

TEST(Models, Switch) {
    ModelRegistry registry{{"gpt-4o", "model-b"}, "gpt-4o"};
    ModelConfig current{"gpt-4o"};
    ModelConfig next = switch_model(current, registry, "model-b");
    EXPECT_EQ(next.modelId, "model-b");
    testing_support::ResponderBackend backend;
    backend.push(AgentRole::VisGenerator, "x");
    AgentClient client(backend, next.modelId);
    client.complete(AgentRole::VisGenerator, "p");
    EXPECT_EQ(backend.requests.at(0).modelId, "model-b");
    EXPECT_EQ(code_of([&] { switch_model(current, registry, "nope"); }), ErrorCode::UnknownModel);
}

TEST(Http, BodyShape) {
    Json body = HttpBackend::build_body({AgentRole::DescriptorVision, "what is drawn", std::string("PNG"), "gpt-4o"});
    EXPECT_EQ(body["model"], "gpt-4o");
    EXPECT_EQ(body["temperature"], 0);
    const Json& content = body["messages"][0]["content"];
    EXPECT_EQ(content[0]["text"], "what is drawn");
    EXPECT_EQ(content[1]["image_url"]["url"], "data:image/png;base64," + base64_encode("PNG"));
    Json plain = HttpBackend::build_body({AgentRole::VisGenerator, "draw", std::nullopt, "m"});
    EXPECT_EQ(plain["messages"][0]["content"], "draw");
    EXPECT_EQ(HttpBackend::parse_body(chat_reply("hello")), "hello");
    EXPECT_EQ(code_of([] { HttpBackend::parse_body("{\"choices\":[]}"); }), ErrorCode::AgentMalformedResponse);
}

TEST(Http, LiveRoundTrip) {
    std::string seen_auth, seen_body;
    FakeProvider provider([&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        seen_body = req.body;
        res.set_content(chat_reply("generated text"), "application/json");
    });
    HttpBackend backend({provider.url(), "secret", std::chrono::seconds(5)});
    EXPECT_EQ(backend.complete({AgentRole::VisGenerator, "draw", std::nullopt, "gpt-4o"}), "generated text");
    EXPECT_EQ(seen_auth, "Bearer secret");
    EXPECT_EQ(Json::parse(seen_body)["model"], "gpt-4o");
    EXPECT_EQ(backend.identity(), "live:" + provider.url());
}

TEST(Http, ErrorMapping) {
    std::atomic<int> status{429};
    FakeProvider provider([&](const httplib::Request&, httplib::Response& res) {
        res.status = status;
        if (status == 429) res.set_header("Retry-After", "17");
        res.set_content("{}", "application/json");
    });
    HttpBackend backend({provider.url(), "", std::chrono::seconds(5)});
    AgentRequest req{AgentRole::VisGenerator, "draw", std::nullopt, "m"};
    try {
        backend.complete(req);
        FAIL();
    } catch (const RateLimitedError& e) {
        EXPECT_EQ(e.code(), ErrorCode::RateLimited);
        ASSERT_TRUE(e.retryAfterSecs);
        EXPECT_EQ(*e.retryAfterSecs, 17);
    }
    status = 401;
    EXPECT_EQ(code_of([&] { backend.complete(req); }), ErrorCode::AgentUnavailable);
    status = 503;
    EXPECT_THROW(backend.complete(req), TransportError);
    status = 200;
    EXPECT_EQ(code_of([&] { backend.complete(req); }), ErrorCode::AgentMalformedResponse);
}

TEST(Http, TimeoutAndUnreachable) {
    FakeProvider provider([](const httplib::Request&, httplib::Response& res) {
        std::this_thread::sleep_for(std::chrono::milliseconds(2500));
        res.set_content(chat_reply("late"), "application/json");
    });
    HttpBackend slow({provider.url(), "", std::chrono::seconds(1)});
    EXPECT_EQ(code_of([&] { slow.complete({AgentRole::VisGenerator, "p", std::nullopt, "m"}); }), ErrorCode::Timeout);

    HttpBackend nowhere({"http://127.0.0.1:1/v1/chat/completions", "", std::chrono::seconds(1)});
    EXPECT_EQ(code_of([&] { nowhere.complete({AgentRole::VisGenerator, "p", std::nullopt, "m"}); }),
              ErrorCode::AgentUnavailable);
    HttpBackend unset({"", "", std::chrono::seconds(1)});
    EXPECT_EQ(code_of([&] { unset.complete({AgentRole::VisGenerator, "p", std::nullopt, "m"}); }),
              ErrorCode::AgentUnavailable);
}
