#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "coleforge/codec/typography_codec.hpp"
#include "coleforge/core/rng.hpp"

namespace coleforge::reflect {

using codec::TypographySpec;
using Json = nlohmann::ordered_json;

class EmptyDataset : public Error {
public:
    using Error::Error;
};

// Shifts every block's (left, top) by independent uniform noise in
// [-delta, delta]. A shifted box that leaves [-1, 1]^2 is pulled back to the
// nearest position inside; boxes that stay inside are not touched, so
// delta = 0 returns the input unchanged. Only left and top ever change.
std::vector<TypographySpec> perturb_typography(std::span<const TypographySpec> blocks, double delta, Rng& rng);

struct PairSource {
    std::string id;           // e.g. bundle digest
    std::string preview_ref;  // where the ground-truth preview lives
    std::vector<TypographySpec> blocks;
};

struct PairRecord {
    std::size_t index = 0;
    std::string source;
    std::string preview_ref;
    std::vector<TypographySpec> noisy;
    std::vector<TypographySpec> ground_truth;

    bool operator==(const PairRecord&) const = default;
};

inline constexpr const char* kPairSchema = "coleforge.reflect-pairs";
inline constexpr int kPairSchemaVersion = 1;

struct PairSet {
    double delta = 0.0;
    std::uint64_t seed = 0;
    std::vector<PairRecord> records;
};

// Record i uses source i mod |sources| and its own generator seeded with
// mix_seed(seed + i), so any index range can be produced independently.
std::vector<PairRecord> make_pairs(std::span<const PairSource> sources, double delta, std::size_t count,
                                   std::uint64_t seed, std::size_t first_index = 0);

// JSONL: one header line {"schema", "version", "delta", "seed", "count"},
// then one record per line.
void write_pairs(std::ostream& out, const PairSet& set);
PairSet read_pairs(std::istream& in);

Json pair_record_to_json(const PairRecord& r);
PairRecord pair_record_from_json(const Json& j);

}  // namespace coleforge::reflect
