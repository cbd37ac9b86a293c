#include "coleforge/editor/service.hpp"

#include <httplib.h>

#include "coleforge/codec/typography_codec.hpp"

namespace coleforge::editor {

namespace {

Json findings_json(const Findings& f) {
    Json a = Json::array();
    for (const auto& x : f) a.push_back({{"field", x.field}, {"message", x.message}});
    return a;
}

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& message,
                Json extra = Json::object()) {
    Json j = Json::object();
    j["error"] = kind;
    j["message"] = message;
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    send_json(res, status, j);
}

Json versioned(const VersionedBundle& v) {
    Json j = Json::object();
    j["api_version"] = kApiVersion;
    j["id"] = v.id;
    j["version"] = v.version;
    j["bundle"] = pipeline::bundle_to_json(v.bundle);
    return j;
}

std::optional<Json> parse_body(const httplib::Request& req, httplib::Response& res) {
    try {
        Json j = Json::parse(req.body);
        if (!j.is_object()) {
            send_error(res, 400, "bad_request", "request body must be a JSON object");
            return std::nullopt;
        }
        return j;
    } catch (const Json::parse_error& e) {
        send_error(res, 400, "bad_request", std::string("request body is not JSON: ") + e.what());
        return std::nullopt;
    }
}

// Runs a handler, mapping library errors to HTTP statuses.
template <typename F>
void guarded(httplib::Response& res, F&& f) {
    try {
        f();
    } catch (const NotFound& e) {
        send_error(res, 404, "not_found", e.what());
    } catch (const Conflict& e) {
        send_error(res, 409, "conflict", e.what(), Json{{"current_version", e.current_version()}});
    } catch (const InvalidEdit& e) {
        send_error(res, 422, "invalid_edit", e.what(), Json{{"findings", findings_json(e.findings())}});
    } catch (const pipeline::StageFailure& e) {
        send_error(res, 502, "stage_failure", e.what(),
                   Json{{"stage", e.stage()}, {"cause", e.cause()}, {"findings", findings_json(e.findings())}});
    } catch (const schema::InvalidIntent& e) {
        send_error(res, 422, "invalid_intent", e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
    }
}

}  // namespace

EditorService::EditorService(DesignStore& store, pipeline::BackendSuite suite, ServiceConfig cfg)
    : store_(store), suite_(std::move(suite)), cfg_(std::move(cfg)) {}

void EditorService::bind(httplib::Server& server) {
    server.set_default_headers({{"Access-Control-Allow-Origin", cfg_.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, Json{{"status", "ok"}, {"api_version", kApiVersion}});
    });

    server.Get("/codec", [](const httplib::Request&, httplib::Response& res) {
        Json j = codec::codec_table_to_json(codec::standard_codec_table());
        send_json(res, 200, Json{{"api_version", kApiVersion}, {"table", j}, {"fonts", codec::font_vocabulary()}});
    });

    server.Get("/designs", [this](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] {
            Json list = Json::array();
            for (const auto& s : store_.list()) {
                list.push_back({{"id", s.id},
                                {"category", s.category},
                                {"intention", s.intention},
                                {"version", s.version},
                                {"text_blocks", s.text_blocks},
                                {"has_object", s.has_object}});
            }
            send_json(res, 200, Json{{"api_version", kApiVersion}, {"designs", std::move(list)}});
        });
    });

    server.Post("/designs", [this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req, res);
        if (!body) return;
        guarded(res, [&] {
            const auto cat = body->find("category");
            const auto txt = body->find("intention");
            if (cat == body->end() || !cat->is_string() || txt == body->end() || !txt->is_string()) {
                send_error(res, 400, "bad_request", "'category' and 'intention' strings are required");
                return;
            }
            const auto category = schema::parse_category(cat->get<std::string>());
            if (!category) {
                send_error(res, 400, "bad_request", "unknown category '" + cat->get<std::string>() + "'");
                return;
            }
            pipeline::PipelineConfig pc = cfg_.pipeline;
            if (auto s = body->find("seed"); s != body->end()) {
                if (!s->is_number_unsigned()) {
                    send_error(res, 400, "bad_request", "'seed' must be a non-negative integer");
                    return;
                }
                pc.seed = s->get<std::uint64_t>();
            }
            const auto intent = schema::make_intent(txt->get<std::string>(), *category);
            auto bundle = pipeline::run_pipeline(intent, suite_, pc);
            if (cfg_.reflect_iters > 0 && suite_.reflector && suite_.quality_judge) {
                bundle = pipeline::run_reflect(bundle, suite_, {cfg_.reflect_iters, nullptr});
            }
            const std::string id = store_.add(bundle);
            send_json(res, 201, versioned(store_.get(id)));
        });
    });

    server.Get(R"(/designs/([0-9a-z]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { send_json(res, 200, versioned(store_.get(req.matches[1]))); });
    });

    server.Post(R"(/designs/([0-9a-z]+)/edits)", [this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req, res);
        if (!body) return;
        guarded(res, [&] {
            const auto v = body->find("version");
            if (v == body->end() || !v->is_number_unsigned()) {
                send_error(res, 400, "bad_request", "'version' (non-negative integer) is required");
                return;
            }
            const auto op = body->find("op");
            if (op == body->end()) {
                send_error(res, 400, "bad_request", "'op' is required");
                return;
            }
            const EditOp edit = edit_from_json(*op);
            send_json(res, 200, versioned(store_.apply_edit(req.matches[1], v->get<std::uint64_t>(), edit)));
        });
    });

    server.Get(R"(/designs/([0-9a-z]+)/export)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const std::string format = req.has_param("format") ? req.get_param_value("format") : "svg";
            if (format == "svg") {
                res.set_content(store_.export_svg(req.matches[1]), "image/svg+xml");
            } else if (format == "png") {
                const auto png = store_.export_png(req.matches[1]);
                res.set_content(std::string(png.begin(), png.end()), "image/png");
            } else {
                send_error(res, 400, "bad_request", "format must be svg or png");
            }
        });
    });
}

}  // namespace coleforge::editor
