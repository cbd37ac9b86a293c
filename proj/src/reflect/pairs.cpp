#include "coleforge/reflect/pairs.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

namespace coleforge::reflect {

namespace {

// Nearest value keeping [v, v + extent] inside [-1, 1]; v itself when it already fits.
double keep_inside(double v, double extent) {
    if (v < -1.0) return -1.0;
    if (v + extent > 1.0) return 1.0 - extent;
    return v;
}

}  // namespace

std::vector<TypographySpec> perturb_typography(std::span<const TypographySpec> blocks, double delta, Rng& rng) {
    if (!(delta >= 0.0)) throw Error("perturbation magnitude must be non-negative");
    std::vector<TypographySpec> out(blocks.begin(), blocks.end());
    for (auto& b : out) {
        const double dx = uniform(rng, -delta, delta);
        const double dy = uniform(rng, -delta, delta);
        if (delta == 0.0) continue;
        b.left = keep_inside(b.left + dx, b.width);
        b.top = keep_inside(b.top + dy, b.height);
    }
    return out;
}

std::vector<PairRecord> make_pairs(std::span<const PairSource> sources, double delta, std::size_t count,
                                   std::uint64_t seed, std::size_t first_index) {
    if (sources.empty()) throw EmptyDataset("no typography sources to perturb");
    if (count < 1) throw Error("pair count must be at least 1");
    std::vector<PairRecord> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t i = first_index + k;
        const auto& src = sources[i % sources.size()];
        Rng rng(mix_seed(seed + i));
        PairRecord r;
        r.index = i;
        r.source = src.id;
        r.preview_ref = src.preview_ref;
        r.ground_truth = src.blocks;
        r.noisy = perturb_typography(src.blocks, delta, rng);
        out.push_back(std::move(r));
    }
    return out;
}

Json pair_record_to_json(const PairRecord& r) {
    Json j = Json::object();
    j["index"] = r.index;
    j["source"] = r.source;
    j["preview"] = r.preview_ref;
    j["noisy"] = codec::typography_to_json(r.noisy);
    j["ground_truth"] = codec::typography_to_json(r.ground_truth);
    return j;
}

PairRecord pair_record_from_json(const Json& j) {
    PairRecord r;
    r.index = j.at("index").get<std::size_t>();
    r.source = j.at("source").get<std::string>();
    r.preview_ref = j.at("preview").get<std::string>();
    r.noisy = codec::typography_from_json(j.at("noisy"));
    r.ground_truth = codec::typography_from_json(j.at("ground_truth"));
    if (r.noisy.size() != r.ground_truth.size()) throw Error("pair record has mismatched block counts");
    return r;
}

void write_pairs(std::ostream& out, const PairSet& set) {
    Json header = Json::object();
    header["schema"] = kPairSchema;
    header["version"] = kPairSchemaVersion;
    header["delta"] = set.delta;
    header["seed"] = set.seed;
    header["count"] = set.records.size();
    out << header.dump() << '\n';
    for (const auto& r : set.records) out << pair_record_to_json(r).dump() << '\n';
}

PairSet read_pairs(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto parse = [&](const std::string& s) {
        try {
            return Json::parse(s);
        } catch (const Json::parse_error& e) {
            throw Error("pair file line " + std::to_string(lineno) + ": " + e.what());
        }
    };
    if (!std::getline(in, line)) throw Error("pair file is empty");
    ++lineno;
    const Json header = parse(line);
    if (!header.is_object() || header.value("schema", std::string()) != kPairSchema) {
        throw Error("pair file lacks the schema header");
    }
    if (header.value("version", 0) != kPairSchemaVersion) throw Error("unsupported pair file version");
    PairSet set;
    set.delta = header.at("delta").get<double>();
    set.seed = header.at("seed").get<std::uint64_t>();
    const auto expected = header.at("count").get<std::size_t>();
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            set.records.push_back(pair_record_from_json(parse(line)));
        } catch (const Json::exception& e) {
            throw Error("pair file line " + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            throw Error("pair file line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (set.records.size() != expected) {
        throw Error("pair file header promises " + std::to_string(expected) + " records, found " +
                    std::to_string(set.records.size()));
    }
    return set;
}

}  // namespace coleforge::reflect
