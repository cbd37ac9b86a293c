#include "coleforge/pipeline/pipeline.hpp"

#include <chrono>

#include "coleforge/core/rng.hpp"

namespace coleforge::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Child seed per stage so that stages draw independent streams.
std::uint64_t stage_seed(std::uint64_t seed, std::uint64_t stage) { return mix_seed(seed ^ (stage * 0x9e3779b97f4a7c15ULL)); }

Findings prefixed(Findings f, const std::string& prefix) {
    for (auto& x : f) x.field = prefix + x.field;
    return f;
}

}  // namespace

StageFailure::StageFailure(std::string stage, std::string cause, Findings findings, DesignBundle partial)
    : Error(stage + " stage failed: " + cause + (findings.empty() ? std::string() : " (" + describe(findings) + ")")),
      stage_(std::move(stage)),
      cause_(std::move(cause)),
      findings_(std::move(findings)),
      partial_(std::make_shared<const DesignBundle>(std::move(partial))) {}

double quality_score(const QualityReport& r) noexcept { return r.aggregate(); }

void rerender(DesignBundle& bundle) { rerender(bundle, typeset::encode_layers(bundle.stack)); }

void rerender(DesignBundle& bundle, const typeset::EncodedLayers& encoded) {
    bundle.svg = typeset::render_svg(bundle.stack, bundle.canvas, encoded);
}

DesignBundle run_pipeline(const DesignIntent& intent, const BackendSuite& suite, const PipelineConfig& cfg) {
    DesignBundle b;
    b.intent = intent;
    b.canvas = cfg.canvas;
    b.provenance.seed = cfg.seed;
    b.provenance.backend_ids = suite.backend_ids();
    PayloadLog log;

    auto fail = [&](const std::string& stage, const std::string& cause, Findings findings = {}) -> StageFailure {
        b.provenance.payload_log = log.entries();
        return StageFailure(stage, cause, std::move(findings), b);
    };

    if (!cfg.canvas.valid()) throw fail("config", "canvas must have positive size");
    for (auto* a : {static_cast<const Backend*>(suite.planner.get()), static_cast<const Backend*>(suite.background_gen.get()),
                    static_cast<const Backend*>(suite.object_gen.get()), static_cast<const Backend*>(suite.typographer.get())}) {
        if (!a) throw fail("config", "generation backends (planner, background, object, typographer) are required");
    }
    if (cfg.probe_health) {
        for (auto* a : {static_cast<const Backend*>(suite.planner.get()),
                        static_cast<const Backend*>(suite.background_gen.get()),
                        static_cast<const Backend*>(suite.object_gen.get()),
                        static_cast<const Backend*>(suite.typographer.get())}) {
            Health h;
            try {
                h = a->health();
            } catch (const std::exception& e) {
                h = {false, e.what()};
            }
            if (!h.ok) throw fail("health", "backend '" + a->id() + "' unhealthy: " + h.detail);
        }
    }

    // Runs one stage, timing it and converting any exception into StageFailure.
    auto stage = [&](const char* name, std::uint64_t index, auto&& body) {
        StageContext ctx{stage_seed(cfg.seed, index), cfg.canvas, &log};
        const auto t0 = Clock::now();
        try {
            body(ctx);
        } catch (const StageFailure&) {
            throw;
        } catch (const FindingsError& e) {
            throw fail(name, e.what(), e.findings());
        } catch (const std::exception& e) {
            throw fail(name, e.what());
        }
        const double ms = ms_since(t0);
        if (cfg.stage_timeout.count() > 0 && ms > static_cast<double>(cfg.stage_timeout.count())) {
            throw fail(name, "timeout: took " + std::to_string(static_cast<long long>(ms)) + " ms, limit " +
                                 std::to_string(cfg.stage_timeout.count()) + " ms");
        }
        b.provenance.stage_ms.emplace_back(name, ms);
    };

    stage(kStagePlanner, 1, [&](const StageContext& ctx) {
        DesignPlan plan = suite.planner->plan(intent, ctx);
        if (auto f = schema::validate_plan(plan); !f.empty()) {
            throw fail(kStagePlanner, "plan failed validation", std::move(f));
        }
        b.plan = std::move(plan);
    });
    b.provenance.completed_stages.push_back(kStagePlanner);

    stage(kStageBackground, 2, [&](const StageContext& ctx) {
        Raster bg = suite.background_gen->generate(b.plan, ctx);
        if (bg.width() != cfg.canvas.width || bg.height() != cfg.canvas.height || bg.channels() != 3) {
            throw fail(kStageBackground, "background must be an RGB raster of canvas size");
        }
        b.stack.background = std::move(bg);
    });
    b.provenance.completed_stages.push_back(kStageBackground);

    if (b.plan.object_flag) {
        stage(kStageObject, 3, [&](const StageContext& ctx) {
            SevenChannelFrame frame = suite.object_gen->generate(b.plan, b.stack.background, ctx);
            if (frame.width() != cfg.canvas.width || frame.height() != cfg.canvas.height) {
                throw fail(kStageObject, "object frame must match the canvas size");
            }
            const int residual = compositor::consistency_check(frame, b.stack.background);
            if (residual > cfg.max_consistency_residual) {
                throw fail(kStageObject, "composed channels disagree with blend(background, object, alpha) by " +
                                             std::to_string(residual));
            }
            auto parts = compositor::split_frame(frame);
            b.provenance.consistency_residual = residual;
            b.stack.object = typeset::ObjectLayer{std::move(parts.object_rgb), std::move(parts.alpha), {}};
        });
        b.provenance.completed_stages.push_back(kStageObject);
    } else {
        b.provenance.skipped_stages.push_back(kStageObject);
    }

    stage(kStageTypographer, 4, [&](const StageContext& ctx) {
        const Raster image = typeset::compose_image_layers(b.stack, cfg.canvas);
        auto blocks = suite.typographer->typeset(b.plan, image, ctx);
        Findings all;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            auto f = prefixed(codec::validate_typography(blocks[i]), "blocks[" + std::to_string(i) + "].");
            all.insert(all.end(), f.begin(), f.end());
        }
        if (!all.empty()) throw fail(kStageTypographer, "typography failed validation", std::move(all));
        b.stack.text_blocks = std::move(blocks);
    });
    b.provenance.completed_stages.push_back(kStageTypographer);

    stage(kStageRender, 5, [&](const StageContext&) { rerender(b); });
    b.provenance.completed_stages.push_back(kStageRender);

    b.provenance.payload_log = log.entries();
    return b;
}

DesignBundle run_reflect(const DesignBundle& bundle, const BackendSuite& suite, const ReflectConfig& cfg) {
    if (cfg.max_iters <= 0) return bundle;
    if (!bundle.completed(kStageRender)) throw StageFailure("reflect", "bundle has not been rendered", {}, bundle);
    if (!suite.quality_judge || !suite.reflector) {
        throw StageFailure("reflect", "reflect needs both a quality judge and a reflector", {}, bundle);
    }
    const auto t0 = Clock::now();
    static const typeset::MockRasterizer kMock;
    const typeset::Rasterizer& raster = cfg.rasterizer ? *cfg.rasterizer : kMock;
    const auto encoded = typeset::encode_layers(bundle.stack);

    PayloadLog log;
    std::vector<ReflectStep> history = bundle.provenance.reflect_history;
    const int first = history.empty() ? 0 : history.back().iteration + 1;

    auto ctx_for = [&](int iter) {
        return StageContext{stage_seed(bundle.provenance.seed, 100 + static_cast<std::uint64_t>(iter)), bundle.canvas, &log};
    };
    auto judge = [&](const DesignBundle& b, const Raster& preview, int iter) {
        return suite.quality_judge->judge(JudgeRequest{b.intent, b.plan, b.stack.text_blocks, preview}, ctx_for(iter));
    };

    DesignBundle best = bundle;
    Raster best_preview = raster.rasterize(best.svg);
    double best_score = 0.0;
    {
        ReflectStep step;
        step.iteration = first;
        try {
            const auto report = judge(best, best_preview, first);
            step.report = report;
            step.score = best_score = quality_score(report);
            step.accepted = true;
            best.scores = report;
        } catch (const std::exception& e) {
            step.error = std::string("judge: ") + e.what();
        }
        history.push_back(step);
        if (!step.error.empty()) {
            best.provenance.reflect_history = std::move(history);
            for (auto& e : log.entries()) best.provenance.payload_log.push_back(std::move(e));
            return best;
        }
    }

    for (int i = 1; i <= cfg.max_iters; ++i) {
        ReflectStep step;
        step.iteration = first + i;
        DesignBundle candidate = best;
        try {
            const auto deltas =
                suite.reflector->propose(best.plan, best.stack.text_blocks, best_preview, *best.scores, ctx_for(step.iteration));
            step.deltas = deltas.size();
            candidate.stack.text_blocks = apply_deltas(best.stack.text_blocks, deltas);
        } catch (const std::exception& e) {
            step.error = std::string("reflector: ") + e.what();
            history.push_back(step);
            break;
        }
        rerender(candidate, encoded);
        Raster preview = raster.rasterize(candidate.svg);
        try {
            const auto report = judge(candidate, preview, step.iteration);
            step.report = report;
            step.score = quality_score(report);
            candidate.scores = report;
        } catch (const std::exception& e) {
            step.error = std::string("judge: ") + e.what();
            history.push_back(step);
            break;
        }
        const bool improved = step.score > best_score;
        step.accepted = improved;
        history.push_back(step);
        if (!improved) break;
        best = std::move(candidate);
        best_preview = std::move(preview);
        best_score = step.score;
    }

    best.provenance.reflect_history = std::move(history);
    for (auto& e : log.entries()) best.provenance.payload_log.push_back(std::move(e));
    best.provenance.stage_ms.emplace_back("reflect", ms_since(t0));
    return best;
}

}  // namespace coleforge::pipeline
