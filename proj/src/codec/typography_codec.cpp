#include "coleforge/codec/typography_codec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>

#include "coleforge/core/text.hpp"

namespace coleforge::codec {

bool BinSpec::valid() const noexcept {
    return std::isfinite(lo) && std::isfinite(hi) && lo < hi && n_bins >= 1 && width() > 0.0;
}

int quantize(double x, const BinSpec& spec, bool clamp) {
    if (!spec.valid()) throw InvalidBinSpec("invalid bin spec");
    if (!std::isfinite(x)) throw OutOfRange("value is not finite");
    if (x < spec.lo || x > spec.hi) {
        if (!clamp) {
            throw OutOfRange("value " + text::format_number(x, 6) + " outside [" +
                             text::format_number(spec.lo, 6) + ", " + text::format_number(spec.hi, 6) + "]");
        }
        x = std::clamp(x, spec.lo, spec.hi);
    }
    // Multiplying before dividing keeps integer-valued inputs exact, so bin
    // edges that land on integers are not perturbed by the rounded width.
    const double t = (x - spec.lo) * spec.n_bins / (spec.hi - spec.lo);
    const int b = static_cast<int>(std::floor(t));
    return std::clamp(b, 0, spec.n_bins - 1);
}

double dequantize(int bin, const BinSpec& spec) {
    if (!spec.valid()) throw InvalidBinSpec("invalid bin spec");
    if (bin < 0 || bin >= spec.n_bins) {
        throw IndexOutOfRange("bin " + std::to_string(bin) + " outside [0, " + std::to_string(spec.n_bins - 1) + "]");
    }
    return spec.lo + (bin + 0.5) * spec.width();
}

const CodecTable& standard_codec_table() {
    static const CodecTable table{};
    return table;
}

namespace {

Json bin_spec_json(const BinSpec& s) {
    Json j = Json::object();
    j["lo"] = s.lo;
    j["hi"] = s.hi;
    j["n_bins"] = s.n_bins;
    return j;
}

// Attribute name -> bin spec, for the quantized attributes.
std::optional<BinSpec> spec_for(const CodecTable& t, std::string_view attr) {
    if (attr == "font_size") return t.font_size;
    if (attr == "angle") return t.angle;
    if (attr == "color_r" || attr == "color_g" || attr == "color_b") return t.color_channel;
    if (attr == "opacity") return t.opacity;
    if (attr == "left" || attr == "top") return t.box_coord;
    if (attr == "width" || attr == "height") return extent_spec(t.box_coord);
    if (attr == "letter_spacing") return t.letter_spacing;
    if (attr == "line_spacing") return t.line_spacing;
    return std::nullopt;
}

}  // namespace

BinSpec extent_spec(const BinSpec& coord) noexcept { return {0.0, coord.hi - coord.lo, coord.n_bins}; }

std::optional<BinSpec> bin_spec_for(const CodecTable& table, std::string_view attr) noexcept {
    return spec_for(table, attr);
}

namespace {

double* numeric_field(TypographySpec& s, std::string_view attr) {
    if (attr == "font_size") return &s.font_size;
    if (attr == "angle") return &s.angle;
    if (attr == "color_r") return &s.color_r;
    if (attr == "color_g") return &s.color_g;
    if (attr == "color_b") return &s.color_b;
    if (attr == "opacity") return &s.opacity;
    if (attr == "left") return &s.left;
    if (attr == "top") return &s.top;
    if (attr == "width") return &s.width;
    if (attr == "height") return &s.height;
    if (attr == "letter_spacing") return &s.letter_spacing;
    if (attr == "line_spacing") return &s.line_spacing;
    return nullptr;
}

const double* numeric_field(const TypographySpec& s, std::string_view attr) {
    return numeric_field(const_cast<TypographySpec&>(s), attr);
}

// Order of numeric attributes in token sequences and typography files.
constexpr std::array<std::string_view, 12> kNumericOrder = {
    "font_size", "angle", "color_r", "color_g", "color_b",        "opacity",
    "left",      "top",   "width",   "height",  "letter_spacing", "line_spacing"};

}  // namespace

Json codec_table_to_json(const CodecTable& table) {
    Json j = Json::object();
    j["font_size"] = bin_spec_json(table.font_size);
    j["angle"] = bin_spec_json(table.angle);
    j["color_channel"] = bin_spec_json(table.color_channel);
    j["box_coord"] = bin_spec_json(table.box_coord);
    j["box_extent"] = bin_spec_json(extent_spec(table.box_coord));
    j["opacity"] = bin_spec_json(table.opacity);
    j["letter_spacing"] = bin_spec_json(table.letter_spacing);
    j["line_spacing"] = bin_spec_json(table.line_spacing);
    return j;
}

std::string_view alignment_name(Alignment a) noexcept {
    switch (a) {
        case Alignment::kLeft: return "left";
        case Alignment::kCenter: return "center";
        case Alignment::kRight: return "right";
    }
    return "left";
}

std::string_view block_role_name(BlockRole r) noexcept {
    switch (r) {
        case BlockRole::kHeading: return "heading";
        case BlockRole::kSubHeading: return "sub_heading";
        case BlockRole::kBodyText: return "body_text";
    }
    return "heading";
}

Alignment parse_alignment(std::string_view s) {
    if (s == "left") return Alignment::kLeft;
    if (s == "center") return Alignment::kCenter;
    if (s == "right") return Alignment::kRight;
    throw Error("unknown alignment '" + std::string(s) + "'");
}

BlockRole parse_block_role(std::string_view s) {
    if (s == "heading") return BlockRole::kHeading;
    if (s == "sub_heading") return BlockRole::kSubHeading;
    if (s == "body_text") return BlockRole::kBodyText;
    throw Error("unknown block role '" + std::string(s) + "'");
}

const std::vector<std::string>& font_vocabulary() {
    static const std::vector<std::string> fonts = {
        "Montserrat", "Roboto",     "Open Sans", "Lato",     "Oswald",   "Raleway",
        "Playfair Display", "Merriweather", "Bebas Neue", "Pacifico", "Poppins", "Lobster"};
    return fonts;
}

Findings validate_typography(const TypographySpec& s) {
    Findings out;
    const auto& t = standard_codec_table();
    if (!text::is_valid_utf8(s.text)) out.push_back({"text", "not valid UTF-8"});
    const auto& fonts = font_vocabulary();
    if (std::find(fonts.begin(), fonts.end(), s.font_family) == fonts.end()) {
        out.push_back({"font_family", "'" + s.font_family + "' is not in the font vocabulary"});
    }
    for (auto attr : kNumericOrder) {
        if (!std::isfinite(*numeric_field(s, attr))) out.push_back({std::string(attr), "not finite"});
    }
    if (!out.empty() && std::any_of(out.begin(), out.end(), [](const Finding& f) { return f.message == "not finite"; })) {
        return out;
    }
    auto in_closed = [&](std::string_view attr, double v, const BinSpec& b) {
        if (v < b.lo || v > b.hi) {
            out.push_back({std::string(attr), text::format_number(v, 6) + " outside [" + text::format_number(b.lo, 6) +
                                                  ", " + text::format_number(b.hi, 6) + "]"});
        }
    };
    in_closed("font_size", s.font_size, t.font_size);
    if (s.angle < t.angle.lo || s.angle >= t.angle.hi) out.push_back({"angle", "outside [0, 2pi)"});
    in_closed("color_r", s.color_r, t.color_channel);
    in_closed("color_g", s.color_g, t.color_channel);
    in_closed("color_b", s.color_b, t.color_channel);
    in_closed("opacity", s.opacity, t.opacity);
    in_closed("letter_spacing", s.letter_spacing, t.letter_spacing);
    in_closed("line_spacing", s.line_spacing, t.line_spacing);
    if (!(s.width > 0.0)) out.push_back({"width", "must be positive"});
    if (!(s.height > 0.0)) out.push_back({"height", "must be positive"});
    if (s.left < -1.0) out.push_back({"left", "box extends past the left canvas edge"});
    if (s.top < -1.0) out.push_back({"top", "box extends past the top canvas edge"});
    if (s.left + s.width > 1.0 + kBoxTolerance) out.push_back({"width", "box extends past the right canvas edge"});
    if (s.top + s.height > 1.0 + kBoxTolerance) out.push_back({"height", "box extends past the bottom canvas edge"});
    return out;
}

std::string Token::to_string() const {
    if (const int* b = std::get_if<int>(&value)) return attr + ":" + std::to_string(*b);
    const auto& s = std::get<std::string>(value);
    if (attr == "text" || attr == "font_family") return attr + ":" + Json(s).dump();
    return attr + ":" + s;
}

Token Token::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos || colon == 0) throw MalformedToken("token has no attribute: " + std::string(text));
    Token tok;
    tok.attr = std::string(text.substr(0, colon));
    const auto rest = text.substr(colon + 1);
    if (tok.attr == "text" || tok.attr == "font_family") {
        try {
            Json j = Json::parse(rest);
            if (!j.is_string()) throw MalformedToken("literal token is not a JSON string: " + std::string(text));
            tok.value = j.get<std::string>();
        } catch (const nlohmann::json::parse_error&) {
            throw MalformedToken("literal token is not a JSON string: " + std::string(text));
        }
    } else if (tok.attr == "alignment" || tok.attr == "role") {
        tok.value = std::string(rest);
    } else {
        int b = 0;
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), b);
        if (ec != std::errc() || ptr != rest.data() + rest.size()) {
            throw MalformedToken("bin token has no integer index: " + std::string(text));
        }
        tok.value = b;
    }
    return tok;
}

std::vector<Token> encode_spec(const TypographySpec& s, const CodecTable& table) {
    std::vector<Token> out;
    out.reserve(16);
    out.push_back({"role", std::string(block_role_name(s.role))});
    out.push_back({"text", s.text});
    out.push_back({"font_family", s.font_family});
    out.push_back({"alignment", std::string(alignment_name(s.alignment))});
    for (auto attr : kNumericOrder) {
        const auto b = spec_for(table, attr);
        try {
            out.push_back({std::string(attr), quantize(*numeric_field(s, attr), *b, false)});
        } catch (const OutOfRange& e) {
            throw OutOfRange(std::string(attr) + ": " + e.what());
        }
    }
    return out;
}

TypographySpec decode_spec(std::span<const Token> tokens, const CodecTable& table) {
    TypographySpec s;
    std::map<std::string, int> seen;
    for (const auto& tok : tokens) {
        if (++seen[tok.attr] > 1) throw MalformedToken("duplicate token for " + tok.attr);
        if (tok.attr == "text" || tok.attr == "font_family" || tok.attr == "alignment" || tok.attr == "role") {
            const auto* v = std::get_if<std::string>(&tok.value);
            if (!v) throw MalformedToken(tok.attr + " token must carry a literal");
            try {
                if (tok.attr == "text") s.text = *v;
                else if (tok.attr == "font_family") s.font_family = *v;
                else if (tok.attr == "alignment") s.alignment = parse_alignment(*v);
                else s.role = parse_block_role(*v);
            } catch (const MalformedToken&) {
                throw;
            } catch (const Error& e) {
                throw MalformedToken(e.what());
            }
            continue;
        }
        const auto b = spec_for(table, tok.attr);
        if (!b) throw MalformedToken("unknown token attribute " + tok.attr);
        const auto* idx = std::get_if<int>(&tok.value);
        if (!idx) throw MalformedToken(tok.attr + " token must carry a bin index");
        *numeric_field(s, tok.attr) = dequantize(*idx, *b);
    }
    for (auto attr : {"text", "font_family", "alignment", "role"}) {
        if (!seen.contains(attr)) throw MalformedToken(std::string("missing token for ") + attr);
    }
    for (auto attr : kNumericOrder) {
        if (!seen.contains(std::string(attr))) throw MalformedToken("missing token for " + std::string(attr));
    }
    return s;
}

std::string tokens_to_text(std::span<const Token> tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t.to_string();
    }
    return out;
}

std::vector<Token> tokens_from_text(std::string_view text) {
    // Literal values are JSON strings and may contain spaces, so split on
    // spaces outside of quotes.
    std::vector<Token> out;
    std::size_t start = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || (!in_string && text[i] == ' ')) {
            if (i > start) out.push_back(Token::parse(text.substr(start, i - start)));
            start = i + 1;
            continue;
        }
        const char c = text[i];
        if (escaped) {
            escaped = false;
        } else if (c == '\\' && in_string) {
            escaped = true;
        } else if (c == '"') {
            in_string = !in_string;
        }
    }
    if (in_string) throw MalformedToken("unterminated string literal in token text");
    return out;
}

Json spec_to_json(const TypographySpec& s) {
    Json j = Json::object();
    j["role"] = std::string(block_role_name(s.role));
    j["text"] = s.text;
    j["font_family"] = s.font_family;
    j["alignment"] = std::string(alignment_name(s.alignment));
    for (auto attr : kNumericOrder) j[std::string(attr)] = *numeric_field(s, attr);
    return j;
}

TypographySpec spec_from_json(const Json& j) {
    if (!j.is_object()) throw Error("typography block must be a JSON object");
    TypographySpec s;
    auto str = [&](const char* key) {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) throw Error(std::string("typography block needs string '") + key + "'");
        return it->get<std::string>();
    };
    s.role = parse_block_role(str("role"));
    s.text = str("text");
    s.font_family = str("font_family");
    s.alignment = parse_alignment(str("alignment"));
    for (auto attr : kNumericOrder) {
        auto it = j.find(std::string(attr));
        if (it == j.end() || !it->is_number()) {
            throw Error("typography block needs numeric '" + std::string(attr) + "'");
        }
        *numeric_field(s, attr) = it->get<double>();
    }
    for (const auto& [key, _] : j.items()) {
        if (key != "text" && std::find(kTypographyAttributes.begin(), kTypographyAttributes.end(), key) ==
                                 kTypographyAttributes.end()) {
            throw Error("unknown typography key '" + key + "'");
        }
    }
    return s;
}

Json typography_to_json(std::span<const TypographySpec> blocks) {
    Json arr = Json::array();
    for (const auto& b : blocks) arr.push_back(spec_to_json(b));
    return arr;
}

std::vector<TypographySpec> typography_from_json(const Json& j) {
    if (!j.is_array()) throw Error("typography file must be a JSON array");
    std::vector<TypographySpec> out;
    for (const auto& b : j) out.push_back(spec_from_json(b));
    return out;
}

std::string serialize_typography(std::span<const TypographySpec> blocks) {
    return typography_to_json(blocks).dump(2) + "\n";
}

std::vector<TypographySpec> deserialize_typography(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("typography file is not valid JSON: ") + e.what());
    }
    return typography_from_json(j);
}

Json get_attribute(const TypographySpec& s, std::string_view attr) {
    if (attr == "text") return s.text;
    if (attr == "font_family") return s.font_family;
    if (attr == "alignment") return std::string(alignment_name(s.alignment));
    if (attr == "role") return std::string(block_role_name(s.role));
    if (const double* v = numeric_field(s, attr)) return *v;
    throw Error("unknown typography attribute '" + std::string(attr) + "'");
}

void set_attribute(TypographySpec& s, std::string_view attr, const Json& value) {
    auto need_string = [&] {
        if (!value.is_string()) throw Error(std::string(attr) + " expects a string");
        return value.get<std::string>();
    };
    if (attr == "text") {
        s.text = need_string();
    } else if (attr == "font_family") {
        s.font_family = need_string();
    } else if (attr == "alignment") {
        s.alignment = parse_alignment(need_string());
    } else if (attr == "role") {
        s.role = parse_block_role(need_string());
    } else if (double* v = numeric_field(s, attr)) {
        if (!value.is_number()) throw Error(std::string(attr) + " expects a number");
        *v = value.get<double>();
    } else {
        throw Error("unknown typography attribute '" + std::string(attr) + "'");
    }
}

}  // namespace coleforge::codec
