#include "coleforge/pipeline/bundle.hpp"

#include <algorithm>

#include "coleforge/codec/typography_codec.hpp"
#include "coleforge/compositor/png_io.hpp"
#include "coleforge/core/digest.hpp"

namespace coleforge::pipeline {

namespace {

using compositor::Raster;

enum class RasterForm { kPng, kPixelDigest };

// The digest form names the pixels rather than one PNG encoding of them, so
// digests do not depend on the zlib build.
Json raster_field(const Raster& r, RasterForm form = RasterForm::kPng) {
    if (r.empty()) return nullptr;
    if (form == RasterForm::kPng) return base64_encode(compositor::encode_png(r));
    const auto& bytes = r.bytes();
    return Json{{"width", r.width()},
                {"height", r.height()},
                {"channels", r.channels()},
                {"sha256", sha256_hex(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()))}};
}

// Markup with every base64 data URI payload removed.
std::string without_data_uris(const std::string& markup) {
    static constexpr std::string_view kMarker = ";base64,";
    std::string out;
    out.reserve(markup.size() / 4);
    std::size_t pos = 0;
    for (auto at = markup.find(kMarker); at != std::string::npos; at = markup.find(kMarker, pos)) {
        out.append(markup, pos, at + kMarker.size() - pos);
        pos = markup.find('"', at);
        if (pos == std::string::npos) pos = markup.size();
    }
    out.append(markup, pos, std::string::npos);
    return out;
}

Raster raster_from(const Json& j, int channels) {
    if (j.is_null()) return Raster{};
    const auto bytes = base64_decode(j.get<std::string>());
    Raster r = compositor::decode_png(bytes);
    if (r.channels() != channels) throw Error("embedded layer has " + std::to_string(r.channels()) + " channels");
    return r;
}

Json report_or_null(const std::optional<metrics::QualityReport>& r) {
    return r ? metrics::quality_report_to_json(*r) : Json(nullptr);
}

std::optional<metrics::QualityReport> report_from(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return metrics::parse_judge(j.dump());
}

}  // namespace

bool DesignBundle::completed(std::string_view stage) const {
    const auto& c = provenance.completed_stages;
    return std::find(c.begin(), c.end(), stage) != c.end();
}

Json reflect_step_to_json(const ReflectStep& s) {
    Json j = Json::object();
    j["iteration"] = s.iteration;
    j["score"] = s.score;
    j["report"] = report_or_null(s.report);
    j["deltas"] = s.deltas;
    j["accepted"] = s.accepted;
    j["error"] = s.error;
    return j;
}

namespace {

Json bundle_json(const DesignBundle& b, bool include_timings, RasterForm form) {
    Json j = Json::object();
    j["format"] = kBundleFormat;
    j["version"] = kBundleVersion;
    j["intent"] = schema::intent_to_json(b.intent);
    j["canvas"] = Json{{"width", b.canvas.width}, {"height", b.canvas.height}};
    j["plan"] = b.completed(kStagePlanner) ? schema::plan_to_json(b.plan) : Json(nullptr);

    Json layers = Json::object();
    layers["background"] = raster_field(b.stack.background, form);
    if (b.stack.object) {
        const auto& o = *b.stack.object;
        layers["object"] = Json{{"rgb", raster_field(o.rgb, form)},
                                {"alpha", raster_field(o.alpha, form)},
                                {"placement",
                                 {{"offset_x", o.placement.offset_x},
                                  {"offset_y", o.placement.offset_y},
                                  {"scale", o.placement.scale}}}};
    } else {
        layers["object"] = nullptr;
    }
    j["layers"] = std::move(layers);
    j["typography"] = b.completed(kStageTypographer) ? codec::typography_to_json(b.stack.text_blocks)
                                                     : Json(nullptr);
    if (b.completed(kStageRender)) {
        Json idx = Json::object();
        for (const auto& [k, v] : b.svg.layer_index) idx[k] = v;
        j["svg"] = Json{{"markup", form == RasterForm::kPng ? b.svg.markup : without_data_uris(b.svg.markup)},
                        {"layer_index", std::move(idx)}};
    } else {
        j["svg"] = nullptr;
    }

    const auto& p = b.provenance;
    Json prov = Json::object();
    prov["seed"] = p.seed;
    prov["backend_ids"] = p.backend_ids;
    if (include_timings) {
        Json t = Json::object();
        for (const auto& [stage, ms] : p.stage_ms) t[stage] = ms;
        prov["stage_ms"] = std::move(t);
    }
    prov["completed_stages"] = p.completed_stages;
    prov["skipped_stages"] = p.skipped_stages;
    prov["consistency_residual"] = p.consistency_residual ? Json(*p.consistency_residual) : Json(nullptr);
    Json hist = Json::array();
    for (const auto& s : p.reflect_history) hist.push_back(reflect_step_to_json(s));
    prov["reflect_history"] = std::move(hist);
    prov["payload_log"] = p.payload_log;
    j["provenance"] = std::move(prov);
    j["scores"] = report_or_null(b.scores);
    return j;
}

}  // namespace

Json bundle_to_json(const DesignBundle& b, bool include_timings) { return bundle_json(b, include_timings, RasterForm::kPng); }

DesignBundle bundle_from_json(const Json& j) {
    try {
        if (j.value("format", std::string()) != kBundleFormat) throw Error("not a design bundle");
        if (j.at("version").get<int>() != kBundleVersion) throw Error("unsupported bundle version");
        DesignBundle b;
        b.intent = schema::intent_from_json(j.at("intent"));
        b.canvas.width = j.at("canvas").at("width").get<int>();
        b.canvas.height = j.at("canvas").at("height").get<int>();

        const auto& prov = j.at("provenance");
        auto& p = b.provenance;
        p.seed = prov.at("seed").get<std::uint64_t>();
        p.backend_ids = prov.at("backend_ids");
        if (auto t = prov.find("stage_ms"); t != prov.end()) {
            for (auto it = t->begin(); it != t->end(); ++it) p.stage_ms.emplace_back(it.key(), it->get<double>());
        }
        p.completed_stages = prov.at("completed_stages").get<std::vector<std::string>>();
        p.skipped_stages = prov.at("skipped_stages").get<std::vector<std::string>>();
        if (!prov.at("consistency_residual").is_null()) p.consistency_residual = prov["consistency_residual"].get<int>();
        for (const auto& s : prov.at("reflect_history")) {
            ReflectStep step;
            step.iteration = s.at("iteration").get<int>();
            step.score = s.at("score").get<double>();
            step.report = report_from(s.at("report"));
            step.deltas = s.at("deltas").get<std::size_t>();
            step.accepted = s.at("accepted").get<bool>();
            step.error = s.at("error").get<std::string>();
            p.reflect_history.push_back(std::move(step));
        }
        p.payload_log = prov.at("payload_log").get<std::vector<Json>>();

        if (!j.at("plan").is_null()) b.plan = schema::plan_from_json(j["plan"]);
        const auto& layers = j.at("layers");
        b.stack.background = raster_from(layers.at("background"), 3);
        if (!layers.at("object").is_null()) {
            const auto& o = layers["object"];
            typeset::ObjectLayer layer{raster_from(o.at("rgb"), 3), raster_from(o.at("alpha"), 1), {}};
            const auto& pl = o.at("placement");
            layer.placement = {pl.at("offset_x").get<double>(), pl.at("offset_y").get<double>(),
                               pl.at("scale").get<double>()};
            b.stack.object = std::move(layer);
        }
        if (!j.at("typography").is_null()) b.stack.text_blocks = codec::typography_from_json(j["typography"]);
        if (!j.at("svg").is_null()) {
            b.svg.markup = j["svg"].at("markup").get<std::string>();
            for (auto it = j["svg"].at("layer_index").begin(); it != j["svg"]["layer_index"].end(); ++it) {
                b.svg.layer_index[it.key()] = it->get<std::string>();
            }
        }
        b.scores = report_from(j.at("scores"));
        return b;
    } catch (const Json::exception& e) {
        throw Error(std::string("malformed bundle: ") + e.what());
    }
}

std::string bundle_digest(const DesignBundle& b) {
    return sha256_hex(bundle_json(b, false, RasterForm::kPixelDigest).dump());
}

}  // namespace coleforge::pipeline
