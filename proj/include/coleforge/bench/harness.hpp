#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coleforge/pipeline/pipeline.hpp"

namespace coleforge::bench {

using Json = nlohmann::ordered_json;
using schema::Category;
using schema::DesignIntent;

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct Corpus {
    std::vector<DesignIntent> intents;
    std::map<Category, std::size_t> counts;
    std::vector<std::string> warnings;
};

// JSONL, one {"category": ..., "intention": ...} object per line. Blank lines
// are skipped. Throws ParseError naming the 1-based line.
Corpus parse_benchmark(std::istream& in);
Corpus load_benchmark(const std::filesystem::path& path);

struct EvalConfig {
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
    typeset::Canvas canvas;
    std::size_t workers = 1;
    int reflect_iters = 0;
    std::chrono::milliseconds stage_timeout{0};
};

struct IntentResult {
    std::size_t index = 0;
    Category category = Category::kPosts;
    std::string dir;  // relative to out_dir
    bool ok = false;
    bool reused = false;  // completed by an earlier run and skipped
    std::string error;
    std::string digest;
    std::optional<metrics::QualityReport> scores;
};

struct CategorySummary {
    Category category = Category::kPosts;
    std::size_t ok = 0;
    std::size_t failed = 0;
    std::size_t scored = 0;
    std::array<double, 5> mean{};
    double mean_aggregate = 0.0;
};

struct EvalReport {
    std::vector<IntentResult> results;
    std::vector<CategorySummary> categories;
    std::size_t ok = 0;
    std::size_t failed = 0;
    std::size_t reused = 0;
};

// Writes bundle.json, design.svg, preview.png, scores.json, provenance.jsonl
// (the payload log, one entry per line) and the layer PNGs (background.png,
// object.png, alpha.png) into `dir`.
void write_bundle_outputs(const std::filesystem::path& dir, const pipeline::DesignBundle& bundle,
                          const compositor::Raster& preview);

// Per-intent output directory name: zero-padded corpus index and a slug.
std::string intent_dir_name(std::size_t index, const DesignIntent& intent);

// Runs every intent (seed mix_seed(cfg.seed + index)) on a bounded worker
// pool and writes out/<category>/<NNN-slug>/ with bundle.json, design.svg,
// preview.png, scores.json and the layer PNGs. A directory whose completion
// marker matches the current inputs is skipped. Per-intent failures are
// recorded, never thrown. Also writes report.json and report.md.
EvalReport run_eval(const std::vector<DesignIntent>& intents, const pipeline::BackendSuite& suite,
                    const EvalConfig& cfg);

// Category means from per-intent results (only scored ones count).
std::vector<CategorySummary> summarize(const std::vector<IntentResult>& results);

Json eval_report_to_json(const EvalReport& r);
std::string eval_report_to_markdown(const EvalReport& r);

}  // namespace coleforge::bench
