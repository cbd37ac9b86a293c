#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "coleforge/compositor/png_io.hpp"
#include "coleforge/core/digest.hpp"
#include "coleforge/pipeline/backends.hpp"
#include "coleforge/schema/design_plan.hpp"

namespace testing {

// httplib server on a free local port, served from a background thread.
class StubServer {
public:
    StubServer() = default;
    StubServer(const StubServer&) = delete;
    StubServer& operator=(const StubServer&) = delete;
    ~StubServer() { stop(); }

    httplib::Server& server() { return server_; }

    void start() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        while (!server_.is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    void stop() {
        if (thread_.joinable()) {
            server_.stop();
            thread_.join();
        }
    }
    int port() const noexcept { return port_; }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

inline std::string png_b64(const coleforge::compositor::Raster& r) {
    return coleforge::base64_encode(coleforge::compositor::encode_png(r));
}

inline coleforge::compositor::Raster png_from_b64(const std::string& s) {
    return coleforge::compositor::decode_png(coleforge::base64_decode(s));
}

// Answers the remote wire protocol by delegating to an in-process suite.
// `plan_override`, when set, replaces the planner's answer.
inline void serve_suite(httplib::Server& srv, const coleforge::pipeline::BackendSuite& suite,
                        std::function<nlohmann::ordered_json(const nlohmann::ordered_json&)> plan_override = {}) {
    using nlohmann::ordered_json;
    using namespace coleforge;
    auto ctx_of = [](const ordered_json& req) {
        pipeline::StageContext ctx;
        ctx.seed = req.value("seed", std::uint64_t{0});
        ctx.canvas = {req.at("canvas").at("width").get<int>(), req.at("canvas").at("height").get<int>()};
        return ctx;
    };
    auto json_handler = [](auto fn) {
        return [fn](const httplib::Request& req, httplib::Response& res) {
            const auto body = ordered_json::parse(req.body);
            res.set_content(fn(body).dump(), "application/json");
        };
    };
    srv.set_exception_handler([](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "unknown";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(nlohmann::ordered_json{{"error", what}, {"path", req.path}}.dump(), "application/json");
    });
    srv.Get("/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"status\":\"ok\"}", "application/json");
    });
    srv.Post("/v1/plan", json_handler([=](const ordered_json& req) {
                 if (plan_override) return ordered_json{{"plan", plan_override(req)}};
                 const auto intent = schema::intent_from_json(req.at("intent"));
                 return ordered_json{{"plan", schema::plan_to_json(suite.planner->plan(intent, ctx_of(req)))}};
             }));
    srv.Post("/v1/background", json_handler([=](const ordered_json& req) {
                 const auto plan = schema::plan_from_json(req.at("plan"));
                 return ordered_json{{"image", png_b64(suite.background_gen->generate(plan, ctx_of(req)))}};
             }));
    srv.Post("/v1/object", json_handler([=](const ordered_json& req) {
                 const auto plan = schema::plan_from_json(req.at("plan"));
                 const auto bg = png_from_b64(req.at("background").get<std::string>());
                 const auto frame = suite.object_gen->generate(plan, bg, ctx_of(req));
                 return ordered_json{{"frame", base64_encode(compositor::frame_to_raw(frame))}};
             }));
    srv.Post("/v1/typography", json_handler([=](const ordered_json& req) {
                 const auto plan = schema::plan_from_json(req.at("plan"));
                 const auto img = png_from_b64(req.at("image").get<std::string>());
                 return ordered_json{{"blocks", codec::typography_to_json(suite.typographer->typeset(plan, img, ctx_of(req)))}};
             }));
}

}  // namespace testing
