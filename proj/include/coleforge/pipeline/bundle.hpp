#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coleforge/metrics/judge.hpp"
#include "coleforge/schema/design_plan.hpp"
#include "coleforge/typeset/layer_stack.hpp"
#include "coleforge/typeset/svg_renderer.hpp"

namespace coleforge::pipeline {

using Json = nlohmann::ordered_json;

inline constexpr const char* kStagePlanner = "planner";
inline constexpr const char* kStageBackground = "background";
inline constexpr const char* kStageObject = "object";
inline constexpr const char* kStageTypographer = "typographer";
inline constexpr const char* kStageRender = "render";

struct ReflectStep {
    int iteration = 0;  // 0 is the score of the design as generated
    std::optional<metrics::QualityReport> report;
    double score = 0.0;
    std::size_t deltas = 0;
    bool accepted = false;
    std::string error;

    bool operator==(const ReflectStep&) const = default;
};

struct Provenance {
    std::uint64_t seed = 0;
    Json backend_ids = Json::object();
    // Wall time per stage in milliseconds, in execution order. Excluded from digests.
    std::vector<std::pair<std::string, double>> stage_ms;
    std::vector<std::string> completed_stages;
    std::vector<std::string> skipped_stages;
    std::optional<int> consistency_residual;
    std::vector<ReflectStep> reflect_history;
    std::vector<Json> payload_log;
};

struct DesignBundle {
    schema::DesignIntent intent;
    typeset::Canvas canvas;
    schema::DesignPlan plan;
    typeset::LayerStack stack;
    typeset::SvgDocument svg;
    Provenance provenance;
    std::optional<metrics::QualityReport> scores;

    bool completed(std::string_view stage) const;
};

inline constexpr const char* kBundleFormat = "coleforge.bundle";
inline constexpr int kBundleVersion = 1;

// Rasters are embedded as base64 PNG. Stages that did not run are null.
Json bundle_to_json(const DesignBundle& b, bool include_timings = true);
DesignBundle bundle_from_json(const Json& j);

// SHA-256 of the canonical JSON without wall-clock timings, with rasters
// identified by their pixels (not their PNG bytes).
std::string bundle_digest(const DesignBundle& b);

Json reflect_step_to_json(const ReflectStep& s);

}  // namespace coleforge::pipeline
