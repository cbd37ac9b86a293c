#include "coleforge/bench/harness.hpp"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "coleforge/compositor/png_io.hpp"
#include "coleforge/core/digest.hpp"
#include "coleforge/core/rng.hpp"
#include "coleforge/core/text.hpp"

namespace coleforge::bench {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, std::string_view bytes) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_png_file(const fs::path& path, const compositor::Raster& r) {
    const auto png = compositor::encode_png(r);
    write_file(path, std::string_view(reinterpret_cast<const char*>(png.data()), png.size()));
}

std::optional<Json> read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    try {
        return Json::parse(in);
    } catch (const Json::exception&) {
        return std::nullopt;
    }
}

// Everything that determines a bundle: if this matches, the stored output is current.
std::string input_key(const DesignIntent& intent, std::uint64_t seed, const pipeline::BackendSuite& suite,
                      const EvalConfig& cfg) {
    Json k = Json::object();
    k["intent"] = schema::intent_to_json(intent);
    k["seed"] = seed;
    k["backends"] = suite.backend_ids();
    k["canvas"] = Json{cfg.canvas.width, cfg.canvas.height};
    k["reflect_iters"] = cfg.reflect_iters;
    return sha256_hex(k.dump());
}

Json scores_json(const std::optional<metrics::QualityReport>& r) {
    Json j = Json::object();
    j["available"] = r.has_value();
    if (r) {
        j["aggregate"] = r->aggregate();
        j["criteria"] = metrics::quality_report_to_json(*r);
    }
    return j;
}

std::optional<metrics::QualityReport> scores_from(const Json& j) {
    if (!j.value("available", false)) return std::nullopt;
    return metrics::parse_judge(j.at("criteria").dump());
}

IntentResult run_one(std::size_t index, const DesignIntent& intent, const pipeline::BackendSuite& suite,
                     const EvalConfig& cfg) {
    IntentResult res;
    res.index = index;
    res.category = intent.category;
    const fs::path rel = fs::path(std::string(schema::category_name(intent.category))) / intent_dir_name(index, intent);
    res.dir = rel.generic_string();
    const fs::path dir = cfg.out_dir / rel;
    const std::uint64_t seed = mix_seed(cfg.seed + index);
    const std::string key = input_key(intent, seed, suite, cfg);

    if (auto marker = read_json(dir / "done.json"); marker && marker->value("key", std::string()) == key) {
        if (auto sc = read_json(dir / "scores.json")) {
            try {
                res.scores = scores_from(*sc);
                res.digest = marker->value("digest", std::string());
                res.ok = res.reused = true;
                return res;
            } catch (const std::exception&) {
                // fall through and regenerate
            }
        }
    }

    try {
        fs::create_directories(dir);
        fs::remove(dir / "done.json");
        fs::remove(dir / "failure.json");
        pipeline::PipelineConfig pc;
        pc.seed = seed;
        pc.canvas = cfg.canvas;
        pc.stage_timeout = cfg.stage_timeout;
        pipeline::DesignBundle bundle = pipeline::run_pipeline(intent, suite, pc);
        if (cfg.reflect_iters > 0 && suite.reflector && suite.quality_judge) {
            bundle = pipeline::run_reflect(bundle, suite, pipeline::ReflectConfig{cfg.reflect_iters, nullptr});
        }
        const compositor::Raster preview = typeset::rasterize_preview(bundle.svg);
        if (!bundle.scores && suite.quality_judge) {
            pipeline::StageContext ctx{mix_seed(seed + 1000), bundle.canvas, nullptr};
            try {
                bundle.scores = suite.quality_judge->judge(
                    pipeline::JudgeRequest{bundle.intent, bundle.plan, bundle.stack.text_blocks, preview}, ctx);
            } catch (const std::exception& e) {
                res.error = std::string("judge: ") + e.what();
            }
        }
        res.scores = bundle.scores;
        res.digest = pipeline::bundle_digest(bundle);

        write_bundle_outputs(dir, bundle, preview);
        write_file(dir / "done.json", Json{{"key", key}, {"digest", res.digest}}.dump() + "\n");
        res.ok = true;
    } catch (const pipeline::StageFailure& e) {
        res.ok = false;
        res.error = e.what();
        Json f = Json::object();
        f["stage"] = e.stage();
        f["cause"] = e.cause();
        Json fs_ = Json::array();
        for (const auto& x : e.findings()) fs_.push_back({{"field", x.field}, {"message", x.message}});
        f["findings"] = std::move(fs_);
        try {
            write_file(dir / "failure.json", f.dump(2) + "\n");
        } catch (const std::exception&) {
        }
    } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
    }
    return res;
}

std::string fixed(double v, int digits) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(digits) << v;
    return o.str();
}

}  // namespace

void write_bundle_outputs(const fs::path& dir, const pipeline::DesignBundle& bundle, const compositor::Raster& preview) {
    fs::create_directories(dir);
    write_file(dir / "bundle.json", pipeline::bundle_to_json(bundle).dump() + "\n");
    write_file(dir / "design.svg", bundle.svg.markup);
    write_png_file(dir / "preview.png", preview);
    write_png_file(dir / "background.png", bundle.stack.background);
    if (bundle.stack.object) {
        write_png_file(dir / "object.png", bundle.stack.object->rgb);
        write_png_file(dir / "alpha.png", bundle.stack.object->alpha);
    }
    write_file(dir / "scores.json", scores_json(bundle.scores).dump(2) + "\n");
    std::string log;
    for (const auto& e : bundle.provenance.payload_log) log += e.dump() + "\n";
    write_file(dir / "provenance.jsonl", log);
}

Corpus parse_benchmark(std::istream& in) {
    Corpus c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw ParseError(lineno, std::string("not JSON: ") + e.what());
        }
        if (!j.is_object()) throw ParseError(lineno, "expected a JSON object");
        auto cat = j.find("category");
        auto txt = j.find("intention");
        if (cat == j.end() || !cat->is_string()) throw ParseError(lineno, "missing string field 'category'");
        if (txt == j.end() || !txt->is_string()) throw ParseError(lineno, "missing string field 'intention'");
        const auto parsed = schema::parse_category(cat->get<std::string>());
        if (!parsed) throw ParseError(lineno, "unknown category '" + cat->get<std::string>() + "'");
        try {
            c.intents.push_back(schema::make_intent(txt->get<std::string>(), *parsed));
        } catch (const Error& e) {
            throw ParseError(lineno, e.what());
        }
        ++c.counts[*parsed];
    }
    if (c.intents.empty()) c.warnings.push_back("benchmark file contains no intents");
    return c;
}

Corpus load_benchmark(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open benchmark file " + path.string());
    return parse_benchmark(in);
}

std::string intent_dir_name(std::size_t index, const DesignIntent& intent) {
    std::ostringstream o;
    o << std::setw(3) << std::setfill('0') << index << '-' << text::slugify(intent.text, 40);
    return o.str();
}

EvalReport run_eval(const std::vector<DesignIntent>& intents, const pipeline::BackendSuite& suite, const EvalConfig& cfg) {
    EvalReport report;
    report.results.resize(intents.size());
    fs::create_directories(cfg.out_dir);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < intents.size(); i = next++) report.results[i] = run_one(i, intents[i], suite, cfg);
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(cfg.workers, intents.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (const auto& r : report.results) {
        if (r.ok) ++report.ok;
        else ++report.failed;
        if (r.reused) ++report.reused;
    }
    report.categories = summarize(report.results);
    write_file(cfg.out_dir / "report.json", eval_report_to_json(report).dump(2) + "\n");
    write_file(cfg.out_dir / "report.md", eval_report_to_markdown(report));
    return report;
}

std::vector<CategorySummary> summarize(const std::vector<IntentResult>& results) {
    std::vector<CategorySummary> out;
    for (auto cat : schema::kAllCategories) {
        CategorySummary s;
        s.category = cat;
        bool any = false;
        for (const auto& r : results) {
            if (r.category != cat) continue;
            any = true;
            if (!r.ok) {
                ++s.failed;
                continue;
            }
            ++s.ok;
            if (!r.scores) continue;
            ++s.scored;
            for (std::size_t k = 0; k < 5; ++k) s.mean[k] += r.scores->scores[k];
            s.mean_aggregate += r.scores->aggregate();
        }
        if (!any) continue;
        if (s.scored) {
            for (auto& m : s.mean) m /= static_cast<double>(s.scored);
            s.mean_aggregate /= static_cast<double>(s.scored);
        }
        out.push_back(s);
    }
    return out;
}

Json eval_report_to_json(const EvalReport& r) {
    Json j = Json::object();
    j["total"] = r.results.size();
    j["ok"] = r.ok;
    j["failed"] = r.failed;
    j["reused"] = r.reused;
    Json cats = Json::array();
    for (const auto& c : r.categories) {
        Json cj = Json::object();
        cj["category"] = schema::category_name(c.category);
        cj["ok"] = c.ok;
        cj["failed"] = c.failed;
        cj["scored"] = c.scored;
        if (c.scored) {
            Json means = Json::object();
            for (auto crit : metrics::kCriteria) means[std::string(metrics::criterion_key(crit))] = c.mean[static_cast<std::size_t>(crit)];
            cj["mean"] = std::move(means);
            cj["mean_aggregate"] = c.mean_aggregate;
        } else {
            cj["mean"] = nullptr;
            cj["mean_aggregate"] = nullptr;
        }
        cats.push_back(std::move(cj));
    }
    j["categories"] = std::move(cats);
    Json rows = Json::array();
    for (const auto& x : r.results) {
        Json rj = Json::object();
        rj["index"] = x.index;
        rj["category"] = schema::category_name(x.category);
        rj["dir"] = x.dir;
        rj["status"] = x.ok ? (x.reused ? "reused" : "ok") : "failed";
        rj["digest"] = x.digest;
        rj["aggregate"] = x.scores ? Json(x.scores->aggregate()) : Json(nullptr);
        rj["error"] = x.error;
        rows.push_back(std::move(rj));
    }
    j["results"] = std::move(rows);
    return j;
}

std::string eval_report_to_markdown(const EvalReport& r) {
    std::ostringstream o;
    o << "# Evaluation report\n\n";
    o << r.results.size() << " intents: " << r.ok << " ok, " << r.failed << " failed";
    if (r.reused) o << " (" << r.reused << " reused from an earlier run)";
    o << ".\n\n";
    o << "| category | ok | failed |";
    for (auto c : metrics::kCriteria) o << ' ' << metrics::criterion_key(c) << " |";
    o << " mean |\n|---|---|---|";
    for (std::size_t i = 0; i < metrics::kCriteria.size(); ++i) o << "---|";
    o << "---|\n";
    for (const auto& c : r.categories) {
        o << "| " << schema::category_name(c.category) << " | " << c.ok << " | " << c.failed << " |";
        for (std::size_t k = 0; k < 5; ++k) o << ' ' << (c.scored ? fixed(c.mean[k], 2) : "n/a") << " |";
        o << ' ' << (c.scored ? fixed(c.mean_aggregate, 2) : "n/a") << " |\n";
    }
    bool any_failed = false;
    for (const auto& x : r.results) {
        if (x.ok) continue;
        if (!any_failed) o << "\n## Failures\n\n";
        any_failed = true;
        o << "- `" << x.dir << "`: " << x.error << "\n";
    }
    return o.str();
}

}  // namespace coleforge::bench
