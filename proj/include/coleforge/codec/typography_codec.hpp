#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "coleforge/core/error.hpp"

namespace coleforge::codec {

using Json = nlohmann::ordered_json;

class InvalidBinSpec : public Error {
public:
    using Error::Error;
};
class OutOfRange : public Error {
public:
    using Error::Error;
};
class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

// Uniform partition of [lo, hi] into n_bins half-open bins; hi itself is
// folded into the last bin.
struct BinSpec {
    double lo = 0.0;
    double hi = 1.0;
    int n_bins = 1;

    double width() const noexcept { return (hi - lo) / n_bins; }
    bool valid() const noexcept;

    bool operator==(const BinSpec&) const = default;
};

int quantize(double x, const BinSpec& spec, bool clamp);
// Bin center lo + (b + 0.5) * width.
double dequantize(int bin, const BinSpec& spec);

struct CodecTable {
    BinSpec font_size{2.0, 200.0, 100};
    BinSpec angle{0.0, 2.0 * std::numbers::pi, 64};
    BinSpec color_channel{0.0, 255.0, 32};
    BinSpec box_coord{-1.0, 1.0, 256};
    BinSpec opacity{0.0, 255.0, 8};
    BinSpec letter_spacing{0.0, 1.0, 40};
    BinSpec line_spacing{0.0, 1.0, 40};

    bool operator==(const CodecTable&) const = default;
};

const CodecTable& standard_codec_table();
// Box extents (width, height) span (0, hi - lo] of the coordinate range and
// use the coordinate grid: same bin count, same bin width.
BinSpec extent_spec(const BinSpec& coord) noexcept;
// Bin spec of a quantized attribute (color_r/g/b share one); empty otherwise.
std::optional<BinSpec> bin_spec_for(const CodecTable& table, std::string_view attr) noexcept;
Json codec_table_to_json(const CodecTable& table);

enum class Alignment { kLeft, kCenter, kRight };
enum class BlockRole { kHeading, kSubHeading, kBodyText };

std::string_view alignment_name(Alignment a) noexcept;
std::string_view block_role_name(BlockRole r) noexcept;
Alignment parse_alignment(std::string_view s);
BlockRole parse_block_role(std::string_view s);

// One text block. Box coordinates are normalized to [-1, 1] with the origin
// at the canvas center, x to the right and y downwards; (left, top) is the
// upper-left corner. Spacing values are fractions of the canvas width.
struct TypographySpec {
    std::string text;
    std::string font_family = "Montserrat";
    double font_size = 48.0;
    double angle = 0.0;  // radians, [0, 2pi)
    double color_r = 0.0;
    double color_g = 0.0;
    double color_b = 0.0;
    double opacity = 255.0;
    double left = -0.5;
    double top = -0.5;
    double width = 1.0;
    double height = 0.25;
    double letter_spacing = 0.0;
    double line_spacing = 0.0;
    Alignment alignment = Alignment::kCenter;
    BlockRole role = BlockRole::kHeading;

    bool operator==(const TypographySpec&) const = default;
};

// The fifteen predicted attributes (text is given, not predicted).
inline constexpr std::array<std::string_view, 15> kTypographyAttributes = {
    "font_family", "font_size", "angle",  "color_r", "color_g",        "color_b",      "opacity",  "left",
    "top",         "width",     "height", "letter_spacing", "line_spacing", "alignment", "role"};

// Shipped font vocabulary; font_family must be one of these.
const std::vector<std::string>& font_vocabulary();

inline constexpr double kBoxTolerance = 1e-9;

Findings validate_typography(const TypographySpec& spec);

class InvalidTypography : public FindingsError {
public:
    using FindingsError::FindingsError;
};

// Token textual form is `attr:value`: bin index for quantized attributes,
// JSON string for text and font_family, bare name for alignment and role.
struct Token {
    std::string attr;
    std::variant<int, std::string> value;

    std::string to_string() const;
    static Token parse(std::string_view text);

    bool operator==(const Token&) const = default;
};

class MalformedToken : public Error {
public:
    using Error::Error;
};

std::vector<Token> encode_spec(const TypographySpec& spec, const CodecTable& table = standard_codec_table());
TypographySpec decode_spec(std::span<const Token> tokens, const CodecTable& table = standard_codec_table());

std::string tokens_to_text(std::span<const Token> tokens);
std::vector<Token> tokens_from_text(std::string_view text);

Json spec_to_json(const TypographySpec& spec);
TypographySpec spec_from_json(const Json& j);

// Typography file: a JSON array with one object per block, canonical key order.
Json typography_to_json(std::span<const TypographySpec> blocks);
std::vector<TypographySpec> typography_from_json(const Json& j);
std::string serialize_typography(std::span<const TypographySpec> blocks);
std::vector<TypographySpec> deserialize_typography(std::string_view text);

// Reads/writes one attribute by name; values are JSON (numbers or strings).
Json get_attribute(const TypographySpec& spec, std::string_view attr);
void set_attribute(TypographySpec& spec, std::string_view attr, const Json& value);

}  // namespace coleforge::codec
