#pragma once

#include <string>
#include <vector>

#include "coleforge/typeset/layer_stack.hpp"

namespace coleforge::typeset {

class FontMetricsProvider {
public:
    virtual ~FontMetricsProvider() = default;
    virtual double advance(char32_t code_point, const std::string& family, double font_size) const = 0;
    virtual double ascent(const std::string& family, double font_size) const = 0;
};

// Every glyph advances 0.6 * font_size; ascent is 0.8 * font_size.
class MonospaceMetrics final : public FontMetricsProvider {
public:
    double advance(char32_t, const std::string&, double font_size) const override { return 0.6 * font_size; }
    double ascent(const std::string&, double font_size) const override { return 0.8 * font_size; }
};

const FontMetricsProvider& default_metrics();

// One laid-out line in canvas pixels, in the block's unrotated frame.
// (x, y) is the top-left of the line box; the line is drawn rotated by the
// block angle about the block center.
struct LineBox {
    std::string text;
    double x = 0.0;
    double y = 0.0;
    double width = 0.0;
    double height = 0.0;
    double baseline = 0.0;
};

struct LayoutResult {
    std::vector<LineBox> lines;
    Findings findings;  // Overflow findings; empty when the text fits

    bool overflow() const noexcept { return !findings.empty(); }
};

// Greedy word wrap at spaces, hard breaks inside words wider than the box,
// forced breaks at '\n'. Per-glyph advance is the metric advance plus
// letter_spacing * canvas.width; consecutive baselines are
// font_size * (1 + line_spacing) apart.
LayoutResult layout_text(const codec::TypographySpec& block, const Canvas& canvas,
                         const FontMetricsProvider& metrics = default_metrics());

}  // namespace coleforge::typeset
