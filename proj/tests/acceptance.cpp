// Acceptance run: one PASS/FAIL line per primary criterion. Exit status is
// the number of failed criteria (capped at 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>

#include <boost/property_tree/xml_parser.hpp>

#include "coleforge/bench/harness.hpp"
#include "coleforge/codec/typography_codec.hpp"
#include "coleforge/compositor/blend.hpp"
#include "coleforge/editor/store.hpp"
#include "coleforge/metrics/boxes.hpp"
#include "coleforge/metrics/judge.hpp"
#include "coleforge/noise/offset_noise.hpp"
#include "coleforge/pipeline/mock_suite.hpp"
#include "coleforge/pipeline/pipeline.hpp"
#include "coleforge/reflect/pairs.hpp"
#include "coleforge/schema/intention_prompt.hpp"
#include "coleforge/schema/masked_plan.hpp"

using namespace coleforge;
namespace fs = std::filesystem;

namespace {

// Tolerances and time limits.
constexpr double kCodecLimitS = 5.0;
constexpr double kCompositorLimitS = 30.0;
constexpr double kNoiseLimitS = 60.0;
constexpr double kNoiseRelTol = 0.10;
constexpr double kIouTol = 1e-3;
constexpr double kE2ELimitS = 60.0;
constexpr int kCodecSamples = 10000;
constexpr int kCompositorFrames = 1000;
constexpr std::size_t kNoiseSamples = 10000;
constexpr int kIouPairs = 1000;
constexpr int kPlanRoundTrips = 1000;
constexpr int kEditorSequences = 50;

// Collects the first few problems of a criterion.
struct Check {
    int failures = 0;
    std::string first;

    void expect(bool ok, const std::string& what) {
        if (ok) return;
        if (failures++ == 0) first = what;
    }
};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path golden(const std::string& name) { return fs::path(COLEFORGE_GOLDEN_DIR) / name; }

const std::vector<schema::DesignIntent>& corpus() {
    static const auto c = bench::load_benchmark(fs::path(COLEFORGE_DATA_DIR) / "designer_intention_sample.jsonl");
    return c.intents;
}

// ---------------------------------------------------------------- codec

int linear_scan_bin(double x, const codec::BinSpec& s) {
    int b = 0;
    for (int k = 1; k < s.n_bins; ++k) {
        if (x >= s.lo + k * (s.hi - s.lo) / s.n_bins) b = k;
    }
    return b;
}

Outcome codec_conformance() {
    using codec::BinSpec;
    Check c;
    const auto& t = codec::standard_codec_table();
    const std::pair<const char*, BinSpec> golden_specs[] = {
        {"font_size", {2.0, 200.0, 100}},  {"angle", {0.0, 2.0 * std::numbers::pi, 64}},
        {"color_r", {0.0, 255.0, 32}},     {"left", {-1.0, 1.0, 256}},
        {"opacity", {0.0, 255.0, 8}},      {"letter_spacing", {0.0, 1.0, 40}},
        {"line_spacing", {0.0, 1.0, 40}},
    };
    for (const auto& [attr, spec] : golden_specs) {
        c.expect(codec::bin_spec_for(t, attr) == spec, std::string("bin spec of ") + attr);
    }
    Rng rng(1);
    double worst = 0.0;
    for (const auto& [attr, s] : golden_specs) {
        for (int i = 0; i < kCodecSamples; ++i) {
            const double x = uniform(rng, s.lo, s.hi);
            const int b = codec::quantize(x, s, false);
            c.expect(b == linear_scan_bin(x, s), std::string("bin disagrees with linear scan for ") + attr);
            const double err = std::abs(codec::dequantize(b, s) - x) / s.width();
            worst = std::max(worst, err);
            c.expect(err <= 0.5 + 1e-9, std::string("round trip beyond half a bin for ") + attr);
        }
    }
    c.expect(codec::quantize(2.0, t.font_size, false) == 0, "quantize(2) != 0");
    c.expect(codec::quantize(200.0, t.font_size, false) == 99, "quantize(200) != 99");
    return {c.failures == 0, c.failures ? c.first : fmt("7 specs, worst error %.4f bin widths", worst)};
}

// ------------------------------------------------------------- compositor

compositor::Raster random_raster(Rng& rng, int w, int h, int ch) {
    compositor::Raster r(w, h, ch);
    for (auto& v : r.data()) v = static_cast<std::uint8_t>(rng() & 0xff);
    return r;
}

compositor::Raster oracle_blend(const compositor::Raster& bg, const compositor::Raster& obj,
                                const compositor::Raster& alpha) {
    compositor::Raster out(bg.width(), bg.height(), 3);
    for (int y = 0; y < bg.height(); ++y) {
        for (int x = 0; x < bg.width(); ++x) {
            const int a = alpha.at(x, y, 0);
            for (int k = 0; k < 3; ++k) {
                const int num = bg.at(x, y, k) * (255 - a) + obj.at(x, y, k) * a;
                out.at(x, y, k) = static_cast<std::uint8_t>((2 * num + 255) / 510);
            }
        }
    }
    return out;
}

Outcome compositor_law() {
    using compositor::Raster;
    Check c;
    Rng rng(2);
    for (int i = 0; i < kCompositorFrames; ++i) {
        const auto bg = random_raster(rng, 64, 64, 3);
        const auto obj = random_raster(rng, 64, 64, 3);
        const auto a = random_raster(rng, 64, 64, 1);
        const auto composed = compositor::blend(bg, obj, a);
        c.expect(composed == oracle_blend(bg, obj, a), "blend differs from the scalar oracle");
        c.expect(compositor::consistency_check(compositor::assemble_frame(obj, a, composed), bg) == 0,
                 "nonzero residual on a constructed frame");
        if (i % 10 == 0) {
            c.expect(compositor::blend(bg, obj, Raster(64, 64, 1, 0)) == bg, "alpha 0 does not return background");
            c.expect(compositor::blend(bg, obj, Raster(64, 64, 1, 255)) == obj, "alpha 255 does not return object");
        }
    }
    return {c.failures == 0, c.failures ? c.first : std::to_string(kCompositorFrames) + " frames byte-identical"};
}

// ------------------------------------------------------------------ noise

Outcome noise_variance() {
    Check c;
    const auto off = noise::noise_stats(0.1, 4, 64, 64, kNoiseSamples, 3);
    const auto plain = noise::noise_stats(0.0, 4, 64, 64, kNoiseSamples, 4);
    const double want_off = 1.0 / 4096 + 0.01;
    const double want_plain = 1.0 / 4096;
    const double e_off = std::abs(off.empirical_mean_variance - want_off) / want_off;
    const double e_plain = std::abs(plain.empirical_mean_variance - want_plain) / want_plain;
    c.expect(e_off <= kNoiseRelTol, fmt("alpha=0.1 relative error %.4f", e_off));
    c.expect(e_plain <= kNoiseRelTol, fmt("alpha=0 relative error %.4f", e_plain));
    return {c.failures == 0, fmt("alpha=0.1 rel err %.4f, alpha=0 rel err %.4f", e_off, e_plain)};
}

// ---------------------------------------------------------------- metrics

// Boxes on a 1/512 lattice of [-1, 1]; a 1024-pixel raster covers each
// lattice cell with exactly one pixel center, so counting pixels is exact.
constexpr int kRasterPx = 1024;

metrics::Box lattice_box(Rng& rng) {
    auto coord = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
    const int l = coord(0, kRasterPx - 8);
    const int t = coord(0, kRasterPx - 8);
    const int w = coord(4, kRasterPx - l);
    const int h = coord(4, kRasterPx - t);
    const double s = 2.0 / kRasterPx;
    return {-1.0 + l * s, -1.0 + t * s, w * s, h * s};
}

double raster_iou(const metrics::Box& a, const metrics::Box& b) {
    const double s = 2.0 / kRasterPx;
    auto inside = [](const metrics::Box& r, double x, double y) {
        return x >= r.left && x < r.left + r.width && y >= r.top && y < r.top + r.height;
    };
    long inter = 0;
    long uni = 0;
    for (int j = 0; j < kRasterPx; ++j) {
        const double y = -1.0 + (j + 0.5) * s;
        const bool ya = y >= a.top && y < a.top + a.height;
        const bool yb = y >= b.top && y < b.top + b.height;
        if (!ya && !yb) continue;
        for (int i = 0; i < kRasterPx; ++i) {
            const double x = -1.0 + (i + 0.5) * s;
            const bool ia = ya && inside(a, x, y);
            const bool ib = yb && inside(b, x, y);
            inter += ia && ib;
            uni += ia || ib;
        }
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Outcome metrics_law() {
    Check c;
    Rng rng(5);
    double worst = 0.0;
    for (int i = 0; i < kIouPairs; ++i) {
        const auto a = lattice_box(rng);
        const auto b = i % 4 == 0 ? a : lattice_box(rng);
        worst = std::max(worst, std::abs(metrics::iou(a, b) - raster_iou(a, b)));
    }
    c.expect(worst <= kIouTol, fmt("IoU deviates from raster oracle by %.2e", worst));

    for (int set = 0; set < 500; ++set) {
        const std::size_t n = rng() % 40;
        std::vector<metrics::Box> p, g;
        for (std::size_t k = 0; k < n; ++k) {
            p.push_back(lattice_box(rng));
            g.push_back(rng() % 3 == 0 ? p.back() : lattice_box(rng));
        }
        const auto r = metrics::localization_report(p, g);
        c.expect(r.ap25 >= r.ap50 && r.ap50 >= r.ap75, "AP not ordered");
    }

    const std::vector<metrics::Box> gts{{0, 0, 1, 1}, {0, 0, 1, 1}};
    const std::vector<metrics::Box> preds{{0, 0, 1, 0.3}, {0, 0, 1, 0.6}};
    const auto f = metrics::localization_report(preds, gts);
    c.expect(f.ap25 == 1.0 && f.ap50 == 0.5 && f.ap75 == 0.0, "{0.3, 0.6} fixture");
    return {c.failures == 0, c.failures ? c.first : fmt("worst IoU deviation %.2e, fixture AP 1.0/0.5/0.0", worst)};
}

// ----------------------------------------------------------------- schema

std::string random_words(Rng& rng, int max_words, bool allow_empty) {
    static const char* kWords[] = {"sale", "Jazz", "\"quoted\"", "a\\b", "café", "日本", "50%", "new\nline",
                                   "<tag>", "{brace}", "tab\there", "emoji 🎉", "[x]", ",", "night", "summer"};
    const int n = static_cast<int>(rng() % static_cast<std::uint64_t>(max_words + 1));
    if (n == 0 && !allow_empty) return "x";
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += kWords[rng() % (sizeof(kWords) / sizeof(kWords[0]))];
    }
    return out;
}

schema::DesignPlan random_plan(Rng& rng) {
    schema::DesignPlan p;
    p.global_caption = random_words(rng, 12, true);
    p.category = std::string(schema::category_name(schema::kAllCategories[rng() % schema::kAllCategories.size()]));
    const int nk = static_cast<int>(rng() % 6);
    for (int i = 0; i < nk; ++i) p.keywords.push_back(random_words(rng, 2, false));
    p.background_caption = random_words(rng, 10, true);
    p.object_flag = rng() % 2 == 0;
    if (p.object_flag) p.object_caption = "a " + random_words(rng, 4, false);
    p.heading = random_words(rng, 5, true);
    p.sub_heading = random_words(rng, 6, true);
    p.body_text = random_words(rng, 15, true);
    return p;
}

Outcome schema_law() {
    Check c;
    Rng rng(6);
    for (int i = 0; i < kPlanRoundTrips; ++i) {
        const auto p = random_plan(rng);
        c.expect(schema::validate_plan(p).empty(), "generated plan invalid");
        std::vector<std::string> fields;
        for (auto f : schema::kPlanFields) {
            if (rng() % 2) fields.emplace_back(f);
        }
        const auto enc = schema::encode_masked(p, fields);
        c.expect(schema::decode_masked(enc, schema::ground_truth_fills(enc, p)) == p, "masked round trip");
        c.expect(schema::deserialize_plan(schema::serialize_plan(p)) == p, "plan serialization round trip");
    }
    schema::RawImageInfo raw;
    raw.title = "Summer Sale Instagram Post";
    raw.format = "Instagram Post";
    raw.keywords = {"summer", "sale", "beach", "discount"};
    raw.visible_texts = {"SUMMER SALE", "Up to 50% off", "shop now"};
    c.expect(schema::render_intention_prompt(raw) == read_file(golden("intention_prompt.txt")), "intention prompt golden");
    c.expect(metrics::render_quality_prompt() == read_file(golden("quality_prompt.txt")), "quality prompt golden");
    c.expect(metrics::render_pairwise_prompt("A poster for a summer jazz night in the park",
                                             {"Summer Jazz Night", "Central Park, 8 PM"}) ==
                 read_file(golden("pairwise_prompt.txt")),
             "pairwise prompt golden");
    return {c.failures == 0, c.failures ? c.first : std::to_string(kPlanRoundTrips) + " round trips, 3 prompt goldens"};
}

// -------------------------------------------------------------------- e2e

pipeline::PipelineConfig e2e_config() {
    pipeline::PipelineConfig pc;
    pc.seed = 7;
    pc.canvas = {512, 512};
    return pc;
}

std::vector<pipeline::DesignBundle> run_corpus(const pipeline::BackendSuite& suite) {
    std::vector<pipeline::DesignBundle> out;
    for (const auto& intent : corpus()) out.push_back(pipeline::run_pipeline(intent, suite, e2e_config()));
    return out;
}

Outcome end_to_end() {
    Check c;
    c.expect(corpus().size() == 30, "corpus does not hold 30 intents");
    const auto suite = pipeline::mock_suite(7);
    const auto first = run_corpus(suite);
    const auto second = run_corpus(suite);
    int with_object = 0;
    for (std::size_t i = 0; i < first.size(); ++i) {
        const auto& b = first[i];
        c.expect(schema::validate_plan(b.plan).empty(), "plan fails validation");
        const bool obj = b.plan.object_flag;
        with_object += obj;
        c.expect(b.stack.object.has_value() == obj, "object layer present iff object_flag");
        c.expect(b.completed(pipeline::kStageObject) == obj, "object stage ran iff object_flag");
        c.expect(b.svg.layer_index.size() == 1 + (obj ? 1u : 0u) + b.stack.text_blocks.size(), "SVG layer count");
        try {
            boost::property_tree::ptree pt;
            std::istringstream in(b.svg.markup);
            boost::property_tree::read_xml(in, pt);
            c.expect(pt.count("svg") == 1, "SVG root missing");
        } catch (const std::exception& e) {
            c.expect(false, std::string("SVG does not parse: ") + e.what());
        }
        c.expect(pipeline::bundle_digest(b) == pipeline::bundle_digest(second[i]), "digest differs between runs");
        c.expect(pipeline::bundle_to_json(b, false) == pipeline::bundle_to_json(second[i], false),
                 "bundle JSON differs between runs");
    }
    return {c.failures == 0, c.failures ? c.first
                                        : std::to_string(first.size()) + " bundles, " + std::to_string(with_object) +
                                              " with object, reproducible"};
}

// ---------------------------------------------------------------- reflect

Outcome reflect_law() {
    Check c;
    const auto suite = pipeline::mock_suite(9, {.text_jitter = 0.15});
    pipeline::PipelineConfig pc;
    pc.seed = 9;
    pc.canvas = {128, 128};

    std::vector<reflect::PairSource> sources;
    for (std::size_t k = 0; k < 6; ++k) {
        const auto base = pipeline::run_pipeline(corpus()[k * 5], suite, pc);
        sources.push_back({pipeline::bundle_digest(base), "preview.png", base.stack.text_blocks});

        Rng rng(k);
        c.expect(reflect::perturb_typography(base.stack.text_blocks, 0.0, rng) == base.stack.text_blocks,
                 "zero-delta perturbation is not the identity");

        double prev = -1.0;
        for (int iters = 1; iters <= 3; ++iters) {
            const auto r = pipeline::run_reflect(base, suite, {iters, nullptr});
            if (!r.scores) {
                c.expect(false, "reflect produced no score");
                continue;
            }
            const double s = pipeline::quality_score(*r.scores);
            c.expect(s >= prev, fmt("score decreased at iteration %.0f (%.3f < %.3f)", iters, s, prev));
            prev = s;
            double best = -1.0;
            for (const auto& step : r.provenance.reflect_history) {
                if (!step.accepted) continue;
                c.expect(step.score >= best, "accepted history not monotone");
                best = step.score;
            }
        }
    }

    for (const auto& r : reflect::make_pairs(sources, 0.0, 12, 3)) {
        c.expect(r.noisy == r.ground_truth, "zero-delta pair differs from ground truth");
    }
    reflect::PairSet set;
    set.delta = 0.1;
    set.seed = 3;
    set.records = reflect::make_pairs(sources, 0.1, 24, 3);
    std::stringstream ss;
    reflect::write_pairs(ss, set);
    try {
        const auto back = reflect::read_pairs(ss);
        c.expect(back.records == set.records && back.delta == set.delta && back.seed == set.seed,
                 "pairs JSONL does not reload");
    } catch (const std::exception& e) {
        c.expect(false, std::string("pairs JSONL does not reload: ") + e.what());
    }
    return {c.failures == 0, c.failures ? c.first : "identity, monotone over 3 iterations, 24 pairs reloaded"};
}

// ----------------------------------------------------------------- editor

editor::EditOp random_edit(Rng& rng, std::size_t blocks) {
    const auto b = static_cast<std::size_t>(rng() % blocks);
    switch (rng() % 6) {
        case 0: return editor::EditOp::move_block(b, uniform(rng, -0.05, 0.05), uniform(rng, -0.05, 0.05));
        case 1: return editor::EditOp::resize_block(b, uniform(rng, 0.2, 0.6), uniform(rng, 0.05, 0.2));
        case 2: return editor::EditOp::set_attribute(b, "font_size", static_cast<int>(uniform(rng, 12, 90)));
        case 3: return editor::EditOp::set_text(b, random_words(rng, 4, false));
        case 4: return editor::EditOp::move_object(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1));
        default: return editor::EditOp::scale_object(uniform(rng, 0.8, 1.25));
    }
}

Outcome editor_law() {
    Check c;
    const fs::path root = fs::temp_directory_path() / ("coleforge-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(root);
    {
        editor::DesignStore store(root);
        pipeline::PipelineConfig pc;
        pc.seed = 4;
        pc.canvas = {128, 128};
        const auto bundle = pipeline::run_pipeline(corpus()[1], pipeline::mock_suite(4, {.object_flag = true}), pc);
        const auto id = store.add(bundle);
        const auto original = pipeline::bundle_to_json(store.get(id).bundle, false).dump();
        const std::string original_svg = store.export_svg(id);
        const auto blocks = bundle.stack.text_blocks.size();
        Rng rng(8);
        int total = 0;
        for (int seq = 0; seq < kEditorSequences; ++seq) {
            const int n = 1 + static_cast<int>(rng() % 20);
            int applied = 0;
            for (int i = 0; i < n; ++i) {
                try {
                    store.apply_edit(id, store.get(id).version, random_edit(rng, blocks));
                    ++applied;
                } catch (const editor::InvalidEdit&) {
                }
            }
            total += applied;
            for (int i = 0; i < applied; ++i) store.apply_edit(id, store.get(id).version, editor::EditOp::undo());
            c.expect(pipeline::bundle_to_json(store.get(id).bundle, false).dump() == original,
                     "bundle differs after full undo");
            c.expect(store.export_svg(id) == original_svg, "SVG differs after full undo");
        }
        const auto v = store.get(id).version;
        store.apply_edit(id, v, editor::EditOp::move_block(0, 0.01, 0.0));
        bool conflict = false;
        try {
            store.apply_edit(id, v, editor::EditOp::move_block(0, 0.01, 0.0));
        } catch (const editor::Conflict&) {
            conflict = true;
        }
        c.expect(conflict, "stale version accepted");
        if (c.failures == 0) c.first = std::to_string(total) + " edits undone byte-for-byte, stale edit rejected";
    }
    fs::remove_all(root);
    return {c.failures == 0, c.first};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit_s;  // 0: no runtime bound
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"codec-conformance", kCodecLimitS, codec_conformance},
        {"compositor", kCompositorLimitS, compositor_law},
        {"offset-noise", kNoiseLimitS, noise_variance},
        {"metrics", 0.0, metrics_law},
        {"schema-masked-field", 0.0, schema_law},
        {"end-to-end", kE2ELimitS, end_to_end},
        {"reflect", 0.0, reflect_law},
        {"editor-service", 0.0, editor_law},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (cr.limit_s > 0 && s > cr.limit_s) {
            o.pass = false;
            o.detail += fmt(" (over the %.0f s limit)", cr.limit_s);
        }
        failed += !o.pass;
        std::printf("%s [PRIMARY] %-20s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", cr.name, s, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
