#include "coleforge/typeset/layout.hpp"

#include "coleforge/core/text.hpp"

namespace coleforge::typeset {

const FontMetricsProvider& default_metrics() {
    static const MonospaceMetrics metrics;
    return metrics;
}

namespace {

constexpr double kFitEpsilon = 1e-6;

struct Measurer {
    const codec::TypographySpec& block;
    const FontMetricsProvider& metrics;
    double tracking;

    double glyph(char32_t cp) const { return metrics.advance(cp, block.font_family, block.font_size) + tracking; }

    double run(std::u32string_view s) const {
        double w = 0.0;
        for (char32_t cp : s) w += glyph(cp);
        return w;
    }
};

// Splits one paragraph into lines no wider than max_width where possible.
std::vector<std::u32string> wrap_paragraph(std::u32string_view para, const Measurer& m, double max_width) {
    std::vector<std::u32string> words;
    std::u32string cur;
    for (char32_t cp : para) {
        if (cp == U' ') {
            if (!cur.empty()) words.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(cp);
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));

    std::vector<std::u32string> lines;
    std::u32string line;
    const double space = m.glyph(U' ');
    double line_w = 0.0;
    for (auto& word : words) {
        const double word_w = m.run(word);
        if (!line.empty() && line_w + space + word_w <= max_width + kFitEpsilon) {
            line.push_back(U' ');
            line += word;
            line_w += space + word_w;
            continue;
        }
        if (!line.empty()) {
            lines.push_back(std::move(line));
            line.clear();
            line_w = 0.0;
        }
        if (word_w <= max_width + kFitEpsilon) {
            line = word;
            line_w = word_w;
            continue;
        }
        // Hard break; every piece keeps at least one glyph.
        std::u32string piece;
        double piece_w = 0.0;
        for (char32_t cp : word) {
            const double g = m.glyph(cp);
            if (!piece.empty() && piece_w + g > max_width + kFitEpsilon) {
                lines.push_back(std::move(piece));
                piece.clear();
                piece_w = 0.0;
            }
            piece.push_back(cp);
            piece_w += g;
        }
        line = std::move(piece);
        line_w = piece_w;
    }
    if (!line.empty() || lines.empty()) lines.push_back(std::move(line));
    return lines;
}

}  // namespace

LayoutResult layout_text(const codec::TypographySpec& block, const Canvas& canvas, const FontMetricsProvider& metrics) {
    LayoutResult result;
    if (block.text.empty()) return result;

    const double box_x = to_px_x(block.left, canvas);
    const double box_y = to_px_y(block.top, canvas);
    const double box_w = extent_to_px_x(block.width, canvas);
    const double box_h = extent_to_px_y(block.height, canvas);
    const Measurer m{block, metrics, block.letter_spacing * canvas.width};
    const double step = block.font_size * (1.0 + block.line_spacing);
    const double ascent = metrics.ascent(block.font_family, block.font_size);

    const std::u32string text = text::decode_utf8(block.text);
    std::size_t start = 0;
    std::vector<std::u32string> lines;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == U'\n') {
            auto para = wrap_paragraph(std::u32string_view(text).substr(start, i - start), m, box_w);
            for (auto& l : para) lines.push_back(std::move(l));
            start = i + 1;
        }
    }

    for (std::size_t i = 0; i < lines.size(); ++i) {
        LineBox lb;
        lb.text = text::encode_utf8(lines[i]);
        lb.width = m.run(lines[i]);
        lb.height = block.font_size;
        lb.y = box_y + static_cast<double>(i) * step;
        lb.baseline = lb.y + ascent;
        switch (block.alignment) {
            case codec::Alignment::kLeft: lb.x = box_x; break;
            case codec::Alignment::kCenter: lb.x = box_x + (box_w - lb.width) / 2.0; break;
            case codec::Alignment::kRight: lb.x = box_x + box_w - lb.width; break;
        }
        if (lb.width > box_w + kFitEpsilon) {
            result.findings.push_back({"width", "line " + std::to_string(i) + " needs " + text::format_number(lb.width, 2) +
                                                    "px, box is " + text::format_number(box_w, 2) + "px"});
        }
        result.lines.push_back(std::move(lb));
    }
    const double needed = static_cast<double>(lines.size() - 1) * step + block.font_size;
    if (needed > box_h + kFitEpsilon) {
        result.findings.push_back({"height", "text needs " + text::format_number(needed, 2) + "px, box is " +
                                                 text::format_number(box_h, 2) + "px"});
    }
    return result;
}

}  // namespace coleforge::typeset
