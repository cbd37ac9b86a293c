#include "coleforge/typeset/svg_renderer.hpp"

#include <cmath>
#include <numbers>

#include "coleforge/compositor/png_io.hpp"
#include "coleforge/core/digest.hpp"
#include "coleforge/core/text.hpp"

namespace coleforge::typeset {

namespace {

using text::format_number;
using text::xml_escape;

std::string px(double v) { return format_number(v, 4); }
std::string norm(double v) { return format_number(v, 9); }

std::string data_uri(const Raster& r) {
    const auto png = compositor::encode_png(r);
    return "data:image/png;base64," + base64_encode(png);
}

std::string_view anchor_for(codec::Alignment a) {
    switch (a) {
        case codec::Alignment::kLeft: return "start";
        case codec::Alignment::kCenter: return "middle";
        case codec::Alignment::kRight: return "end";
    }
    return "start";
}

int channel(double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 255.0))); }

void emit_text_block(std::string& out, std::size_t index, const codec::TypographySpec& b, const Canvas& canvas,
                     const FontMetricsProvider& metrics) {
    const double box_x = to_px_x(b.left, canvas);
    const double box_y = to_px_y(b.top, canvas);
    const double box_w = extent_to_px_x(b.width, canvas);
    const double box_h = extent_to_px_y(b.height, canvas);
    const double cx = box_x + box_w / 2.0;
    const double cy = box_y + box_h / 2.0;
    const double degrees = b.angle * 180.0 / std::numbers::pi;

    out += "  <g id=\"layer-text-" + std::to_string(index) + "\" data-layer-role=\"text\" data-block-role=\"";
    out += codec::block_role_name(b.role);
    out += "\" data-left=\"" + norm(b.left) + "\" data-top=\"" + norm(b.top) + "\" data-width=\"" + norm(b.width) +
           "\" data-height=\"" + norm(b.height) + "\" data-angle=\"" + norm(b.angle) + "\" data-color=\"" +
           norm(b.color_r) + " " + norm(b.color_g) + " " + norm(b.color_b) + "\" data-opacity=\"" + norm(b.opacity) +
           "\" data-letter-spacing=\"" + norm(b.letter_spacing) + "\" data-line-spacing=\"" + norm(b.line_spacing) +
           "\" data-alignment=\"";
    out += codec::alignment_name(b.alignment);
    out += "\" font-family=\"" + xml_escape(b.font_family) + "\" font-size=\"" + px(b.font_size) + "\" fill=\"rgb(" +
           std::to_string(channel(b.color_r)) + "," + std::to_string(channel(b.color_g)) + "," +
           std::to_string(channel(b.color_b)) + ")\" fill-opacity=\"" + format_number(b.opacity / 255.0, 4) +
           "\" letter-spacing=\"" + px(b.letter_spacing * canvas.width) + "\" text-anchor=\"";
    out += anchor_for(b.alignment);
    out += "\" transform=\"rotate(" + format_number(degrees, 4) + " " + px(cx) + " " + px(cy) + ")\">\n";

    const auto layout = layout_text(b, canvas, metrics);
    for (const auto& line : layout.lines) {
        double x = line.x;
        if (b.alignment == codec::Alignment::kCenter) x = cx;
        if (b.alignment == codec::Alignment::kRight) x = box_x + box_w;
        out += "    <text xml:space=\"preserve\" x=\"" + px(x) + "\" y=\"" + px(line.baseline) + "\">" +
               xml_escape(line.text) + "</text>\n";
    }
    out += "  </g>\n";
}

}  // namespace

EncodedLayers encode_layers(const LayerStack& stack) {
    EncodedLayers enc;
    if (!stack.background.empty()) enc.background = data_uri(stack.background);
    if (stack.object) {
        enc.object = data_uri(stack.object->rgb);
        enc.alpha = data_uri(stack.object->alpha);
    }
    return enc;
}

SvgDocument render_svg(const LayerStack& stack, const Canvas& canvas, const FontMetricsProvider& metrics) {
    if (auto findings = validate_stack(stack, canvas); !findings.empty()) {
        throw InvalidStack("invalid layer stack", std::move(findings));
    }
    return render_svg(stack, canvas, encode_layers(stack), metrics);
}

SvgDocument render_svg(const LayerStack& stack, const Canvas& canvas, const EncodedLayers& encoded,
                       const FontMetricsProvider& metrics) {
    if (auto findings = validate_stack(stack, canvas); !findings.empty()) {
        throw InvalidStack("invalid layer stack", std::move(findings));
    }
    if (encoded.background.empty() || (stack.object && (encoded.object.empty() || encoded.alpha.empty()))) {
        throw InvalidStack("invalid layer stack", {{"encoded", "missing encoded layer images"}});
    }
    const std::string w = std::to_string(canvas.width);
    const std::string h = std::to_string(canvas.height);
    const std::string full = "x=\"0\" y=\"0\" width=\"" + w + "\" height=\"" + h + "\"";

    SvgDocument doc;
    std::string& out = doc.markup;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" version=\"1.1\" "
           "width=\"" + w + "\" height=\"" + h + "\" viewBox=\"0 0 " + w + " " + h + "\">\n";
    if (stack.object) {
        out += "  <defs>\n";
        out += "    <mask id=\"object-alpha\" maskUnits=\"userSpaceOnUse\" " + full + ">\n";
        out += "      <image " + full + " xlink:href=\"" + encoded.alpha + "\"/>\n";
        out += "    </mask>\n";
        out += "  </defs>\n";
    }
    out += "  <g id=\"layer-background\" data-layer-role=\"background\">\n";
    out += "    <image " + full + " xlink:href=\"" + encoded.background + "\"/>\n";
    out += "  </g>\n";
    doc.layer_index["layer-background"] = "background";

    if (stack.object) {
        const auto& p = stack.object->placement;
        const double cx = canvas.width / 2.0;
        const double cy = canvas.height / 2.0;
        const double dx = extent_to_px_x(p.offset_x, canvas);
        const double dy = extent_to_px_y(p.offset_y, canvas);
        out += "  <g id=\"layer-object\" data-layer-role=\"object\" data-offset-x=\"" + norm(p.offset_x) +
               "\" data-offset-y=\"" + norm(p.offset_y) + "\" data-scale=\"" + norm(p.scale) + "\" transform=\"translate(" +
               px(cx + dx) + " " + px(cy + dy) + ") scale(" + norm(p.scale) + ") translate(" + px(-cx) + " " + px(-cy) +
               ")\">\n";
        out += "    <image " + full + " mask=\"url(#object-alpha)\" xlink:href=\"" + encoded.object + "\"/>\n";
        out += "  </g>\n";
        doc.layer_index["layer-object"] = "object";
    }
    for (std::size_t i = 0; i < stack.text_blocks.size(); ++i) {
        emit_text_block(out, i, stack.text_blocks[i], canvas, metrics);
        doc.layer_index["layer-text-" + std::to_string(i)] = "text";
    }
    out += "</svg>\n";
    return doc;
}

}  // namespace coleforge::typeset
