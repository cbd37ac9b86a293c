#include "coleforge/pipeline/remote_backend.hpp"

#include <httplib.h>

#include <cctype>
#include <thread>

#include "coleforge/compositor/png_io.hpp"
#include "coleforge/core/digest.hpp"

namespace coleforge::pipeline {

namespace {

bool word_byte(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

Json b64_png(const Raster& r) { return base64_encode(compositor::encode_png(r)); }

Raster png_field(const Json& resp, const char* key, int channels) {
    auto it = resp.find(key);
    if (it == resp.end() || !it->is_string()) throw BadResponse(std::string("response lacks string field '") + key + "'");
    Raster r;
    try {
        r = compositor::decode_png(base64_decode(it->get<std::string>()));
    } catch (const Error& e) {
        throw BadResponse(std::string("field '") + key + "' is not a base64 PNG: " + e.what());
    }
    if (r.channels() != channels) {
        throw BadResponse(std::string("field '") + key + "' has " + std::to_string(r.channels()) + " channels, expected " +
                          std::to_string(channels));
    }
    return r;
}

const Json& field(const Json& resp, const char* key) {
    auto it = resp.find(key);
    if (it == resp.end()) throw BadResponse(std::string("response lacks field '") + key + "'");
    return *it;
}

Json canvas_json(const Canvas& c) { return Json{{"width", c.width}, {"height", c.height}}; }

// Copy of `j` with long strings (embedded images) replaced by their digest.
Json loggable(const Json& j, std::size_t limit) {
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s.size() > limit) return "<sha256:" + sha256_hex(s) + " bytes:" + std::to_string(s.size()) + ">";
        return j;
    }
    if (j.is_object()) {
        Json out = Json::object();
        for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = loggable(it.value(), limit);
        return out;
    }
    if (j.is_array()) {
        Json out = Json::array();
        for (const auto& v : j) out.push_back(loggable(v, limit));
        return out;
    }
    return j;
}

class RemoteAdapter {
protected:
    RemoteAdapter(const RemoteConfig& cfg, std::string id) : client_(cfg), id_(std::move(id)) {}
    RemoteClient client_;
    std::string id_;
};

class RemotePlanner final : public Planner, RemoteAdapter {
public:
    explicit RemotePlanner(const RemoteConfig& cfg) : RemoteAdapter(cfg, "remote-planner") {}
    std::string id() const override { return id_; }
    BackendKind kind() const override { return BackendKind::kRemote; }
    Health health() const override { return client_.health(); }

    DesignPlan plan(const DesignIntent& intent, const StageContext& ctx) const override {
        Json req = Json::object();
        req["intent"] = schema::intent_to_json(intent);
        req["seed"] = ctx.seed;
        req["canvas"] = canvas_json(ctx.canvas);
        const Json resp = client_.post("plan", req, id_, ctx.log);
        return schema::plan_from_json(field(resp, "plan"));
    }
};

class RemoteBackground final : public BackgroundGenerator, RemoteAdapter {
public:
    explicit RemoteBackground(const RemoteConfig& cfg) : RemoteAdapter(cfg, "remote-background") {}
    std::string id() const override { return id_; }
    BackendKind kind() const override { return BackendKind::kRemote; }
    Health health() const override { return client_.health(); }

    Raster generate(const DesignPlan& plan, const StageContext& ctx) const override {
        const auto& c = client_.config();
        Json req = Json::object();
        req["prompt"] = fit_prompt(plan.background_caption, c.token_budget, c.oversize);
        req["plan"] = schema::plan_to_json(plan);
        req["seed"] = ctx.seed;
        req["canvas"] = canvas_json(ctx.canvas);
        return png_field(client_.post("background", req, id_, ctx.log), "image", 3);
    }
};

class RemoteObject final : public ObjectGenerator, RemoteAdapter {
public:
    explicit RemoteObject(const RemoteConfig& cfg) : RemoteAdapter(cfg, "remote-object") {}
    std::string id() const override { return id_; }
    BackendKind kind() const override { return BackendKind::kRemote; }
    Health health() const override { return client_.health(); }

    SevenChannelFrame generate(const DesignPlan& plan, const Raster& background, const StageContext& ctx) const override {
        const auto& c = client_.config();
        Json req = Json::object();
        req["prompt"] = fit_prompt(plan.object_caption, c.token_budget, c.oversize);
        req["plan"] = schema::plan_to_json(plan);
        req["background"] = b64_png(background);
        req["seed"] = ctx.seed;
        req["canvas"] = canvas_json(ctx.canvas);
        const Json resp = client_.post("object", req, id_, ctx.log);
        try {
            if (auto f = resp.find("frame"); f != resp.end() && f->is_string()) {
                return compositor::frame_from_raw(base64_decode(f->get<std::string>()));
            }
            return compositor::assemble_frame(png_field(resp, "object", 3), png_field(resp, "alpha", 1),
                                              png_field(resp, "composed", 3));
        } catch (const BadResponse&) {
            throw;
        } catch (const Error& e) {
            throw BadResponse(std::string("unusable object frame: ") + e.what());
        }
    }
};

class RemoteTypographer final : public Typographer, RemoteAdapter {
public:
    explicit RemoteTypographer(const RemoteConfig& cfg) : RemoteAdapter(cfg, "remote-typographer") {}
    std::string id() const override { return id_; }
    BackendKind kind() const override { return BackendKind::kRemote; }
    Health health() const override { return client_.health(); }

    std::vector<TypographySpec> typeset(const DesignPlan& plan, const Raster& image, const StageContext& ctx) const override {
        Json req = Json::object();
        req["plan"] = schema::plan_to_json(plan);
        req["image"] = b64_png(image);
        req["seed"] = ctx.seed;
        req["canvas"] = canvas_json(ctx.canvas);
        return codec::typography_from_json(field(client_.post("typography", req, id_, ctx.log), "blocks"));
    }
};

class RemoteJudge final : public QualityJudge, RemoteAdapter {
public:
    explicit RemoteJudge(const RemoteConfig& cfg) : RemoteAdapter(cfg, "remote-judge") {}
    std::string id() const override { return id_; }
    BackendKind kind() const override { return BackendKind::kRemote; }
    Health health() const override { return client_.health(); }

    QualityReport judge(const JudgeRequest& r, const StageContext& ctx) const override {
        Json req = Json::object();
        req["prompt"] = metrics::render_quality_prompt();
        req["intent"] = schema::intent_to_json(r.intent);
        req["plan"] = schema::plan_to_json(r.plan);
        req["blocks"] = codec::typography_to_json(r.blocks);
        req["image"] = b64_png(r.preview);
        req["seed"] = ctx.seed;
        const Json resp = client_.post("judge", req, id_, ctx.log);
        if (auto s = resp.find("scores"); s != resp.end()) return metrics::parse_judge(s->dump());
        const Json& text = field(resp, "response");
        if (!text.is_string()) throw BadResponse("judge 'response' must be a string");
        return metrics::parse_judge(text.get<std::string>());
    }
};

class RemoteReflector final : public Reflector, RemoteAdapter {
public:
    explicit RemoteReflector(const RemoteConfig& cfg) : RemoteAdapter(cfg, "remote-reflector") {}
    std::string id() const override { return id_; }
    BackendKind kind() const override { return BackendKind::kRemote; }
    Health health() const override { return client_.health(); }

    std::vector<TypographyDelta> propose(const DesignPlan& plan, const std::vector<TypographySpec>& blocks,
                                         const Raster& preview, const QualityReport& report,
                                         const StageContext& ctx) const override {
        Json req = Json::object();
        req["plan"] = schema::plan_to_json(plan);
        req["blocks"] = codec::typography_to_json(blocks);
        req["image"] = b64_png(preview);
        req["scores"] = metrics::quality_report_to_json(report);
        req["seed"] = ctx.seed;
        const Json& arr = field(client_.post("reflect", req, id_, ctx.log), "deltas");
        if (!arr.is_array()) throw BadResponse("'deltas' must be an array");
        std::vector<TypographyDelta> out;
        try {
            for (const auto& d : arr) out.push_back(delta_from_json(d));
        } catch (const Error& e) {
            throw BadResponse(e.what());
        }
        return out;
    }
};

}  // namespace

std::vector<std::string_view> prompt_tokens(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
        } else if (word_byte(c)) {
            std::size_t j = i;
            while (j < text.size() && word_byte(static_cast<unsigned char>(text[j]))) ++j;
            out.push_back(text.substr(i, j - i));
            i = j;
        } else {
            out.push_back(text.substr(i, 1));
            ++i;
        }
    }
    return out;
}

std::size_t count_prompt_tokens(std::string_view text) { return prompt_tokens(text).size(); }

std::string fit_prompt(std::string_view text, std::size_t budget, OversizePolicy policy) {
    const auto toks = prompt_tokens(text);
    if (toks.size() <= budget) return std::string(text);
    if (policy == OversizePolicy::kReject) {
        throw PromptTooLong("prompt has " + std::to_string(toks.size()) + " tokens, budget is " + std::to_string(budget));
    }
    if (budget == 0) return {};
    const auto& last = toks[budget - 1];
    return std::string(text.substr(0, static_cast<std::size_t>(last.data() - text.data()) + last.size()));
}

RemoteClient::RemoteClient(RemoteConfig cfg) : cfg_(std::move(cfg)) {
    const auto scheme = cfg_.base_url.find("://");
    if (scheme == std::string::npos || cfg_.base_url.compare(0, scheme, "http") != 0) {
        throw Error("remote base_url must start with http://, got '" + cfg_.base_url + "'");
    }
    const auto slash = cfg_.base_url.find('/', scheme + 3);
    host_ = cfg_.base_url.substr(0, slash);
    prefix_ = slash == std::string::npos ? std::string() : cfg_.base_url.substr(slash);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    if (cfg_.max_attempts < 1) throw Error("remote max_attempts must be at least 1");
}

Json RemoteClient::post(std::string_view stage, const Json& body, const std::string& backend_id, PayloadLog* log) const {
    const std::string path = prefix_ + "/v1/" + std::string(stage);
    const std::string payload = body.dump();
    if (log) log->record(stage, backend_id, "request", loggable(body, cfg_.log_inline_limit));

    std::string last_error;
    auto delay = cfg_.backoff;
    for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(delay);
            delay = std::min(delay * 2, cfg_.max_backoff);
        }
        httplib::Client cli(host_);
        cli.set_connection_timeout(cfg_.connect_timeout);
        cli.set_read_timeout(cfg_.read_timeout);
        cli.set_write_timeout(cfg_.read_timeout);
        const auto t0 = std::chrono::steady_clock::now();
        auto res = cli.Post(path, payload, "application/json");
        if (!res) {
            const auto err = res.error();
            const auto waited = std::chrono::steady_clock::now() - t0;
            if (err == httplib::Error::Read && waited >= cfg_.read_timeout * 9 / 10) {
                throw Timeout(std::string(stage) + ": no response within " + std::to_string(cfg_.read_timeout.count()) + " ms");
            }
            last_error = httplib::to_string(err);
            continue;
        }
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status) + (res->body.empty() ? "" : ": " + res->body.substr(0, 200));
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            throw BadResponse(std::string(stage) + ": HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
        }
        Json out;
        try {
            out = Json::parse(res->body);
        } catch (const Json::parse_error& e) {
            throw BadResponse(std::string(stage) + ": response is not JSON: " + e.what());
        }
        if (!out.is_object()) throw BadResponse(std::string(stage) + ": response is not a JSON object");
        if (log) log->record(stage, backend_id, "response", loggable(out, cfg_.log_inline_limit));
        return out;
    }
    throw Unreachable(std::string(stage) + ": " + host_ + " unreachable after " + std::to_string(cfg_.max_attempts) +
                      " attempts (" + last_error + ")");
}

Health RemoteClient::health() const {
    httplib::Client cli(host_);
    cli.set_connection_timeout(cfg_.connect_timeout);
    cli.set_read_timeout(cfg_.read_timeout);
    auto res = cli.Get(prefix_ + "/health");
    if (!res) return {false, host_ + ": " + httplib::to_string(res.error())};
    if (res->status != 200) return {false, host_ + ": health returned HTTP " + std::to_string(res->status)};
    return {true, "ok"};
}

std::shared_ptr<const Planner> remote_planner(const RemoteConfig& cfg) { return std::make_shared<RemotePlanner>(cfg); }
std::shared_ptr<const BackgroundGenerator> remote_background(const RemoteConfig& cfg) {
    return std::make_shared<RemoteBackground>(cfg);
}
std::shared_ptr<const ObjectGenerator> remote_object(const RemoteConfig& cfg) { return std::make_shared<RemoteObject>(cfg); }
std::shared_ptr<const Typographer> remote_typographer(const RemoteConfig& cfg) {
    return std::make_shared<RemoteTypographer>(cfg);
}
std::shared_ptr<const Reflector> remote_reflector(const RemoteConfig& cfg) { return std::make_shared<RemoteReflector>(cfg); }
std::shared_ptr<const QualityJudge> remote_judge(const RemoteConfig& cfg) { return std::make_shared<RemoteJudge>(cfg); }

BackendSuite remote_suite(const RemoteConfig& cfg) {
    BackendSuite s;
    s.planner = remote_planner(cfg);
    s.background_gen = remote_background(cfg);
    s.object_gen = remote_object(cfg);
    s.typographer = remote_typographer(cfg);
    s.reflector = remote_reflector(cfg);
    s.quality_judge = remote_judge(cfg);
    return s;
}

}  // namespace coleforge::pipeline
