#include "coleforge/pipeline/backends.hpp"

namespace coleforge::pipeline {

std::string_view backend_kind_name(BackendKind k) noexcept { return k == BackendKind::kMock ? "mock" : "remote"; }

void PayloadLog::record(std::string_view stage, std::string_view backend_id, std::string_view direction, Json body) {
    Json e = Json::object();
    e["stage"] = stage;
    e["backend"] = backend_id;
    e["direction"] = direction;
    e["body"] = std::move(body);
    std::lock_guard lock(mu_);
    entries_.push_back(std::move(e));
}

std::vector<Json> PayloadLog::entries() const {
    std::lock_guard lock(mu_);
    return entries_;
}

Json delta_to_json(const TypographyDelta& d) {
    Json j = Json::object();
    j["block"] = d.block;
    j["mode"] = d.mode == TypographyDelta::Mode::kAbsolute ? "absolute" : "relative";
    if (d.left) j["left"] = *d.left;
    if (d.top) j["top"] = *d.top;
    if (d.width) j["width"] = *d.width;
    if (d.height) j["height"] = *d.height;
    return j;
}

TypographyDelta delta_from_json(const Json& j) {
    if (!j.is_object()) throw Error("delta must be an object");
    TypographyDelta d;
    auto b = j.find("block");
    if (b == j.end() || !b->is_number_unsigned()) throw Error("delta needs a non-negative integer 'block'");
    d.block = b->get<std::size_t>();
    const std::string mode = j.value("mode", std::string("absolute"));
    if (mode == "absolute") d.mode = TypographyDelta::Mode::kAbsolute;
    else if (mode == "relative") d.mode = TypographyDelta::Mode::kRelative;
    else throw Error("delta mode must be 'absolute' or 'relative', got '" + mode + "'");
    auto num = [&](const char* key, std::optional<double>& out) {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return;
        if (!it->is_number()) throw Error(std::string("delta field '") + key + "' must be a number");
        out = it->get<double>();
    };
    num("left", d.left);
    num("top", d.top);
    num("width", d.width);
    num("height", d.height);
    return d;
}

std::vector<TypographySpec> apply_deltas(std::vector<TypographySpec> blocks,
                                         const std::vector<TypographyDelta>& deltas) {
    for (const auto& d : deltas) {
        if (d.block >= blocks.size()) {
            throw Error("delta names block " + std::to_string(d.block) + " but there are " +
                        std::to_string(blocks.size()));
        }
        auto& b = blocks[d.block];
        const bool rel = d.mode == TypographyDelta::Mode::kRelative;
        auto put = [rel](double& field, const std::optional<double>& v) {
            if (v) field = rel ? field + *v : *v;
        };
        put(b.left, d.left);
        put(b.top, d.top);
        put(b.width, d.width);
        put(b.height, d.height);
    }
    Findings all;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        for (auto f : codec::validate_typography(blocks[i])) {
            f.field = "blocks[" + std::to_string(i) + "]." + f.field;
            all.push_back(std::move(f));
        }
    }
    if (!all.empty()) throw codec::InvalidTypography("deltas produce an invalid block", std::move(all));
    return blocks;
}

Findings BackendSuite::check_complete() const {
    Findings f;
    auto need = [&f](const Backend* b, const char* name) {
        if (!b) f.push_back({name, "adapter missing"});
        else if (b->id().empty()) f.push_back({name, "adapter id is empty"});
    };
    need(planner.get(), "planner");
    need(background_gen.get(), "background_gen");
    need(object_gen.get(), "object_gen");
    need(typographer.get(), "typographer");
    need(reflector.get(), "reflector");
    need(quality_judge.get(), "quality_judge");
    return f;
}

Json BackendSuite::backend_ids() const {
    Json j = Json::object();
    auto put = [&j](const char* name, const Backend* b) {
        if (b) j[name] = b->id();
    };
    put("planner", planner.get());
    put("background_gen", background_gen.get());
    put("object_gen", object_gen.get());
    put("typographer", typographer.get());
    put("reflector", reflector.get());
    put("quality_judge", quality_judge.get());
    return j;
}

}  // namespace coleforge::pipeline
