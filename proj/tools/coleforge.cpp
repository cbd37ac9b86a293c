// coleforge command-line entry point.
#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "coleforge/bench/harness.hpp"
#include "coleforge/codec/typography_codec.hpp"
#include "coleforge/editor/service.hpp"
#include "coleforge/metrics/boxes.hpp"
#include "coleforge/noise/offset_noise.hpp"
#include "coleforge/pipeline/mock_suite.hpp"
#include "coleforge/pipeline/remote_backend.hpp"
#include "coleforge/reflect/pairs.hpp"

namespace fs = std::filesystem;
using namespace coleforge;
using Json = nlohmann::ordered_json;

namespace {

struct Globals {
    bool json = false;
};

void emit(const Globals& g, const Json& j, const std::string& human) {
    if (g.json) std::cout << j.dump() << "\n";
    else std::cout << human;
}

Json read_json_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open " + p.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(p.string() + ": " + e.what());
    }
}

struct BackendOpts {
    std::string backend = "mock";
    std::string endpoint;
    std::uint64_t seed = 0;
    int canvas = 1024;
};

void add_backend_flags(CLI::App* cmd, BackendOpts& o) {
    cmd->add_option("--backend", o.backend, "Backend kind")->check(CLI::IsMember({"mock", "remote"}));
    cmd->add_option("--endpoint", o.endpoint, "Base URL of the remote model service (remote backend)");
    cmd->add_option("--seed", o.seed, "Seed");
    cmd->add_option("--canvas", o.canvas, "Canvas edge in pixels")->check(CLI::Range(16, 4096));
}

pipeline::BackendSuite make_suite(const BackendOpts& o) {
    if (o.backend == "mock") return pipeline::mock_suite(o.seed);
    if (o.endpoint.empty()) throw CLI::ValidationError("--endpoint", "required with --backend remote");
    pipeline::RemoteConfig rc;
    rc.base_url = o.endpoint;
    return pipeline::remote_suite(rc);
}

schema::Category category_arg(const std::string& s) {
    auto c = schema::parse_category(s);
    if (!c) throw CLI::ValidationError("--category", "unknown category '" + s + "'");
    return *c;
}

// Bundles under `in`: a bundle.json file, or every bundle.json below a directory.
std::vector<reflect::PairSource> load_sources(const fs::path& in) {
    std::vector<fs::path> files;
    if (fs::is_directory(in)) {
        for (const auto& e : fs::recursive_directory_iterator(in)) {
            if (e.is_regular_file() && e.path().filename() == "bundle.json") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(in);
    }
    std::vector<reflect::PairSource> out;
    for (const auto& f : files) {
        const auto b = pipeline::bundle_from_json(read_json_file(f));
        if (b.stack.text_blocks.empty()) continue;
        const fs::path preview = f.parent_path() / "preview.png";
        out.push_back({pipeline::bundle_digest(b), fs::exists(preview) ? preview.string() : std::string(),
                       b.stack.text_blocks});
    }
    return out;
}

std::vector<int> parse_shape(const std::string& s) {
    std::vector<int> dims;
    std::string cur;
    for (char c : s + "x") {
        if (c == 'x' || c == ',' || c == 'X') {
            if (cur.empty()) throw CLI::ValidationError("--shape", "expected CxHxW or HxW");
            try {
                dims.push_back(std::stoi(cur));
            } catch (const std::exception&) {
                throw CLI::ValidationError("--shape", "not a number: " + cur);
            }
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (dims.size() == 2) dims.insert(dims.begin(), 4);
    if (dims.size() != 3) throw CLI::ValidationError("--shape", "expected CxHxW or HxW");
    for (int d : dims) {
        if (d <= 0) throw CLI::ValidationError("--shape", "dimensions must be positive");
    }
    return dims;
}

int run_serve(const Globals& g, const fs::path& store_dir, const std::string& host, int port, const BackendOpts& bo) {
    editor::DesignStore store(store_dir);
    editor::ServiceConfig sc;
    sc.pipeline.canvas = {bo.canvas, bo.canvas};
    sc.pipeline.seed = bo.seed;
    editor::EditorService service(store, make_suite(bo), sc);
    httplib::Server server;
    service.bind(server);

    // Signals are taken by a dedicated thread so that stop() runs outside a handler.
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&set, &sig);
        server.stop();
    });

    const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    }
    emit(g, Json{{"listening", host + ":" + std::to_string(bound)}, {"store", store_dir.string()}},
         "listening on " + host + ":" + std::to_string(bound) + " (store " + store_dir.string() + ")\n");
    std::cout.flush();
    server.listen_after_bind();
    if (server.is_running()) server.stop();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coleforge: layered text-to-design pipeline toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_flag("--json", g.json, "Machine-readable JSON output");

    // generate
    auto* gen = app.add_subcommand("generate", "Run the pipeline for one intent");
    std::string intent_text, category = "posts";
    fs::path gen_out;
    int reflect_iters = 0;
    BackendOpts gen_b;
    gen->add_option("--intent", intent_text, "Design intention")->required();
    gen->add_option("--category", category, "Category");
    gen->add_option("--out", gen_out, "Output directory")->required();
    gen->add_option("--reflect", reflect_iters, "Reflect iterations")->check(CLI::Range(0, 20));
    add_backend_flags(gen, gen_b);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Run the pipeline over a JSONL intent corpus");
    fs::path corpus, bench_out;
    std::size_t workers = 1;
    int bench_reflect = 0;
    bool no_judge = false;
    BackendOpts bench_b;
    bench_b.canvas = 512;
    bench_cmd->add_option("--corpus", corpus, "JSONL corpus")->required()->check(CLI::ExistingFile);
    bench_cmd->add_option("--out", bench_out, "Output directory")->required();
    bench_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::Range(1, 64));
    bench_cmd->add_option("--reflect", bench_reflect, "Reflect iterations per intent")->check(CLI::Range(0, 20));
    bench_cmd->add_flag("--no-judge", no_judge, "Skip scoring");
    add_backend_flags(bench_cmd, bench_b);

    // metrics
    auto* met = app.add_subcommand("metrics", "mIoU and AP of predicted vs ground-truth boxes");
    fs::path pred, gt;
    met->add_option("--pred", pred, "Predicted boxes (JSON)")->required()->check(CLI::ExistingFile);
    met->add_option("--gt", gt, "Ground-truth boxes (JSON)")->required()->check(CLI::ExistingFile);

    // quantize
    auto* quant = app.add_subcommand("quantize", "Map an attribute value to its codec bin");
    std::string attr;
    double value = 0.0;
    bool clamp = false;
    quant->add_option("--attr", attr, "Attribute name")->required();
    quant->add_option("--value", value, "Value")->required();
    quant->add_flag("--clamp", clamp, "Clamp out-of-range values into the edge bins");

    // noise-stats
    auto* noise_cmd = app.add_subcommand("noise-stats", "Monte-Carlo check of offset-noise channel-mean variance");
    double alpha = 0.1;
    std::string shape = "4x64x64";
    std::size_t samples = 10000;
    std::uint64_t noise_seed = 0;
    noise_cmd->add_option("--alpha", alpha, "Offset strength")->check(CLI::NonNegativeNumber);
    noise_cmd->add_option("--shape", shape, "CxHxW or HxW");
    noise_cmd->add_option("--samples", samples, "Sample count")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
    noise_cmd->add_option("--seed", noise_seed, "Seed");

    // reflect-pairs
    auto* pairs_cmd = app.add_subcommand("reflect-pairs", "Build noisy/ground-truth typography pairs");
    fs::path pairs_in, pairs_out;
    double delta = 0.1;
    std::size_t count = 1;
    std::uint64_t pairs_seed = 0;
    pairs_cmd->add_option("--in", pairs_in, "bundle.json or a directory of bundles")->required()->check(CLI::ExistingPath);
    pairs_cmd->add_option("--delta", delta, "Shift magnitude (normalized units)")->check(CLI::NonNegativeNumber);
    pairs_cmd->add_option("--count", count, "Records to emit")->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    pairs_cmd->add_option("--seed", pairs_seed, "Seed");
    pairs_cmd->add_option("--out", pairs_out, "Output JSONL (stdout when omitted)");

    // serve
    auto* serve = app.add_subcommand("serve", "Serve the editor HTTP API");
    const char* env_store = std::getenv("COLEFORGE_STORE");
    fs::path store_dir = env_store && *env_store ? fs::path(env_store) : fs::path("coleforge-store");
    std::string host = "127.0.0.1";
    int port = 8080;
    BackendOpts serve_b;
    serve->add_option("--store", store_dir, "Design store directory (default $COLEFORGE_STORE)");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
    add_backend_flags(serve, serve_b);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen) {
            const auto intent = schema::make_intent(intent_text, category_arg(category));
            const auto suite = make_suite(gen_b);
            pipeline::PipelineConfig pc;
            pc.seed = gen_b.seed;
            pc.canvas = {gen_b.canvas, gen_b.canvas};
            auto bundle = pipeline::run_pipeline(intent, suite, pc);
            if (reflect_iters > 0) bundle = pipeline::run_reflect(bundle, suite, {reflect_iters, nullptr});
            if (!bundle.scores && suite.quality_judge) {
                const auto preview = typeset::rasterize_preview(bundle.svg);
                bundle.scores = suite.quality_judge->judge(
                    {bundle.intent, bundle.plan, bundle.stack.text_blocks, preview}, {mix_seed(pc.seed + 1000), pc.canvas, nullptr});
            }
            const auto preview = typeset::rasterize_preview(bundle.svg);
            bench::write_bundle_outputs(gen_out, bundle, preview);
            const std::string digest = pipeline::bundle_digest(bundle);
            Json j{{"out", gen_out.string()},
                   {"digest", digest},
                   {"object", bundle.stack.object.has_value()},
                   {"text_blocks", bundle.stack.text_blocks.size()},
                   {"score", bundle.scores ? Json(bundle.scores->aggregate()) : Json(nullptr)}};
            emit(g, j, "wrote " + gen_out.string() + "\ndigest " + digest + "\n");
        } else if (*bench_cmd) {
            const auto c = bench::load_benchmark(corpus);
            for (const auto& w : c.warnings) std::cerr << "warning: " << w << "\n";
            auto suite = make_suite(bench_b);
            if (no_judge) suite.quality_judge.reset();
            bench::EvalConfig ec;
            ec.out_dir = bench_out;
            ec.seed = bench_b.seed;
            ec.canvas = {bench_b.canvas, bench_b.canvas};
            ec.workers = workers;
            ec.reflect_iters = bench_reflect;
            const auto report = bench::run_eval(c.intents, suite, ec);
            emit(g, bench::eval_report_to_json(report), bench::eval_report_to_markdown(report));
            return report.failed == 0 ? 0 : 1;
        } else if (*met) {
            const auto p = metrics::boxes_from_json(read_json_file(pred));
            const auto t = metrics::boxes_from_json(read_json_file(gt));
            const auto r = metrics::localization_report(p, t);
            std::ostringstream h;
            h << "boxes " << r.count << "\nmIoU  " << r.miou << "\nAP25  " << r.ap25 << "\nAP50  " << r.ap50
              << "\nAP75  " << r.ap75 << "\n";
            emit(g, metrics::localization_report_to_json(r), h.str());
        } else if (*quant) {
            const auto spec = codec::bin_spec_for(codec::standard_codec_table(), attr);
            if (!spec) throw CLI::ValidationError("--attr", "'" + attr + "' is not a quantized attribute");
            const int bin = codec::quantize(value, *spec, clamp);
            emit(g, Json{{"bin", bin}}, std::to_string(bin) + "\n");
        } else if (*noise_cmd) {
            const auto dims = parse_shape(shape);
            const auto r = noise::noise_stats(alpha, dims[0], dims[1], dims[2], samples, noise_seed);
            Json j{{"alpha", r.alpha},
                   {"shape", {dims[0], dims[1], dims[2]}},
                   {"samples", r.samples},
                   {"channel_means", r.channel_means},
                   {"empirical_mean_variance", r.empirical_mean_variance},
                   {"analytic_mean_variance", r.analytic_mean_variance},
                   {"relative_error", r.relative_error},
                   {"elementwise_variance", r.elementwise_variance}};
            std::ostringstream h;
            h << "channel-mean variance " << r.empirical_mean_variance << " (analytic " << r.analytic_mean_variance
              << ", relative error " << r.relative_error << ")\n";
            emit(g, j, h.str());
        } else if (*pairs_cmd) {
            const auto sources = load_sources(pairs_in);
            reflect::PairSet set;
            set.delta = delta;
            set.seed = pairs_seed;
            set.records = reflect::make_pairs(sources, delta, count, pairs_seed);
            if (pairs_out.empty()) {
                reflect::write_pairs(std::cout, set);
            } else {
                std::ofstream out(pairs_out, std::ios::binary);
                if (!out) throw Error("cannot write " + pairs_out.string());
                reflect::write_pairs(out, set);
                emit(g, Json{{"out", pairs_out.string()}, {"records", set.records.size()}},
                     "wrote " + std::to_string(set.records.size()) + " records to " + pairs_out.string() + "\n");
            }
        } else if (*serve) {
            return run_serve(g, store_dir, host, port, serve_b);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
