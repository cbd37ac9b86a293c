#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "coleforge/pipeline/backends.hpp"
#include "coleforge/pipeline/bundle.hpp"
#include "coleforge/typeset/rasterizer.hpp"

namespace coleforge::pipeline {

struct PipelineConfig {
    std::uint64_t seed = 0;
    Canvas canvas;
    // Zero disables the limit. In-process stages are checked when they
    // return; remote stages are also bounded by their HTTP timeouts.
    std::chrono::milliseconds stage_timeout{0};
    bool probe_health = true;
    // Largest tolerated |composed - blend(background, object, alpha)|.
    int max_consistency_residual = 1;
};

// A stage failed. The partial bundle holds every artifact produced before
// the failing stage and nothing after it.
class StageFailure : public Error {
public:
    StageFailure(std::string stage, std::string cause, Findings findings, DesignBundle partial);

    const std::string& stage() const noexcept { return stage_; }
    const std::string& cause() const noexcept { return cause_; }
    const Findings& findings() const noexcept { return findings_; }
    const DesignBundle& partial() const noexcept { return *partial_; }

private:
    std::string stage_;
    std::string cause_;
    Findings findings_;
    std::shared_ptr<const DesignBundle> partial_;
};

// planner -> background -> object (only when plan.object_flag) -> typographer -> render.
DesignBundle run_pipeline(const DesignIntent& intent, const BackendSuite& suite, const PipelineConfig& cfg);

struct ReflectConfig {
    int max_iters = 3;
    std::shared_ptr<const typeset::Rasterizer> rasterizer;  // mock rasterizer when null
};

// Scores the design, asks the reflector for box deltas, re-renders and
// re-scores until the score stops improving or max_iters rounds ran.
// Returns the best-scoring bundle; history and errors go to provenance.
DesignBundle run_reflect(const DesignBundle& bundle, const BackendSuite& suite, const ReflectConfig& cfg);

// Equal-weight mean of the five criteria.
double quality_score(const QualityReport& r) noexcept;

// Re-renders bundle.svg from bundle.stack.
void rerender(DesignBundle& bundle);
void rerender(DesignBundle& bundle, const typeset::EncodedLayers& encoded);

}  // namespace coleforge::pipeline
