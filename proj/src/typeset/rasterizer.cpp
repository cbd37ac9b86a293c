#include "coleforge/typeset/rasterizer.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coleforge/compositor/blend.hpp"
#include "coleforge/compositor/png_io.hpp"
#include "coleforge/core/digest.hpp"

namespace coleforge::typeset {

namespace pt = boost::property_tree;

namespace {

constexpr std::string_view kPngDataPrefix = "data:image/png;base64,";

Raster decode_data_uri(const std::string& uri) {
    if (uri.rfind(kPngDataPrefix, 0) != 0) throw Error("rasterizer: image is not an embedded PNG");
    const auto bytes = base64_decode(std::string_view(uri).substr(kPngDataPrefix.size()));
    return compositor::decode_png(bytes);
}

std::string attr(const pt::ptree& node, const std::string& name) {
    auto v = node.get_optional<std::string>("<xmlattr>." + name);
    if (!v) throw Error("rasterizer: missing attribute " + name);
    return *v;
}

double num_attr(const pt::ptree& node, const std::string& name) {
    const std::string s = attr(node, name);
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw Error("");
        return v;
    } catch (const std::exception&) {
        throw Error("rasterizer: attribute " + name + " is not a number: " + s);
    }
}

const pt::ptree& child(const pt::ptree& node, const std::string& name) {
    auto c = node.get_child_optional(name);
    if (!c) throw Error("rasterizer: missing element " + name);
    return *c;
}

struct TextBlockPaint {
    double left, top, width, height, angle, opacity;
    double rgb[3];
};

void paint_block(Raster& out, const TextBlockPaint& b, const Canvas& canvas) {
    const int a = static_cast<int>(std::lround(std::clamp(b.opacity, 0.0, 255.0)));
    if (a == 0) return;
    std::uint8_t color[3];
    for (int c = 0; c < 3; ++c) color[c] = static_cast<std::uint8_t>(std::lround(std::clamp(b.rgb[c], 0.0, 255.0)));

    const double x0 = to_px_x(b.left, canvas);
    const double y0 = to_px_y(b.top, canvas);
    const double w = extent_to_px_x(b.width, canvas);
    const double h = extent_to_px_y(b.height, canvas);
    const double cx = x0 + w / 2.0;
    const double cy = y0 + h / 2.0;
    const double cs = std::cos(b.angle);
    const double sn = std::sin(b.angle);
    // Bounding box of the rotated rectangle.
    const double ex = std::abs(cs) * w / 2.0 + std::abs(sn) * h / 2.0;
    const double ey = std::abs(sn) * w / 2.0 + std::abs(cs) * h / 2.0;
    const int px0 = std::max(0, static_cast<int>(std::floor(cx - ex)) - 1);
    const int px1 = std::min(canvas.width, static_cast<int>(std::ceil(cx + ex)) + 1);
    const int py0 = std::max(0, static_cast<int>(std::floor(cy - ey)) - 1);
    const int py1 = std::min(canvas.height, static_cast<int>(std::ceil(cy + ey)) + 1);
    const bool axis_aligned = b.angle == 0.0;
    for (int py = py0; py < py1; ++py) {
        for (int px = px0; px < px1; ++px) {
            double u = px + 0.5;
            double v = py + 0.5;
            if (!axis_aligned) {
                // Undo the rotation about the block center.
                const double dx = u - cx;
                const double dy = v - cy;
                u = cx + cs * dx + sn * dy;
                v = cy - sn * dx + cs * dy;
            }
            if (u < x0 || u >= x0 + w || v < y0 || v >= y0 + h) continue;
            for (int c = 0; c < 3; ++c) {
                out.at(px, py, c) = compositor::blend_sample(out.at(px, py, c), color[c], static_cast<std::uint8_t>(a));
            }
        }
    }
}

Raster composite_object(const Raster& bg, const Raster& obj, const Raster& alpha, const ObjectPlacement& p,
                        const Canvas& canvas) {
    if (p.is_identity()) return compositor::blend(bg, obj, alpha);
    Raster out = bg;
    const double cx = canvas.width / 2.0;
    const double cy = canvas.height / 2.0;
    const double dx = extent_to_px_x(p.offset_x, canvas);
    const double dy = extent_to_px_y(p.offset_y, canvas);
    for (int y = 0; y < canvas.height; ++y) {
        for (int x = 0; x < canvas.width; ++x) {
            const double sx = cx + (x + 0.5 - cx - dx) / p.scale;
            const double sy = cy + (y + 0.5 - cy - dy) / p.scale;
            const int ix = static_cast<int>(std::floor(sx));
            const int iy = static_cast<int>(std::floor(sy));
            if (ix < 0 || iy < 0 || ix >= obj.width() || iy >= obj.height()) continue;
            const std::uint8_t a = alpha.at(ix, iy, 0);
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = compositor::blend_sample(bg.at(x, y, c), obj.at(ix, iy, c), a);
        }
    }
    return out;
}

}  // namespace

Raster MockRasterizer::rasterize(const SvgDocument& doc) const {
    pt::ptree tree;
    try {
        std::istringstream in(doc.markup);
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
        throw Error(std::string("rasterizer: malformed SVG: ") + e.what());
    }
    const auto& svg = child(tree, "svg");
    const Canvas canvas{static_cast<int>(num_attr(svg, "width")), static_cast<int>(num_attr(svg, "height"))};
    if (!canvas.valid()) throw Error("rasterizer: invalid canvas size");

    Raster background, object, alpha;
    ObjectPlacement placement;
    bool has_object = false;
    std::vector<TextBlockPaint> blocks;

    for (const auto& [name, node] : svg) {
        if (name == "defs") {
            for (const auto& [dname, dnode] : node) {
                if (dname == "mask" && attr(dnode, "id") == "object-alpha") {
                    alpha = decode_data_uri(attr(child(dnode, "image"), "xlink:href"));
                }
            }
        } else if (name == "g") {
            const std::string role = attr(node, "data-layer-role");
            if (role == "background") {
                background = decode_data_uri(attr(child(node, "image"), "xlink:href"));
            } else if (role == "object") {
                has_object = true;
                object = decode_data_uri(attr(child(node, "image"), "xlink:href"));
                placement = {num_attr(node, "data-offset-x"), num_attr(node, "data-offset-y"),
                             num_attr(node, "data-scale")};
            } else if (role == "text") {
                TextBlockPaint b{};
                b.left = num_attr(node, "data-left");
                b.top = num_attr(node, "data-top");
                b.width = num_attr(node, "data-width");
                b.height = num_attr(node, "data-height");
                b.angle = num_attr(node, "data-angle");
                b.opacity = num_attr(node, "data-opacity");
                std::istringstream rgb(attr(node, "data-color"));
                if (!(rgb >> b.rgb[0] >> b.rgb[1] >> b.rgb[2])) throw Error("rasterizer: bad data-color");
                blocks.push_back(b);
            } else {
                throw Error("rasterizer: unknown layer role " + role);
            }
        }
    }
    if (background.empty()) throw Error("rasterizer: document has no background layer");
    if (background.width() != canvas.width || background.height() != canvas.height || background.channels() != 3) {
        throw Error("rasterizer: background does not match the canvas");
    }
    Raster out = background;
    if (has_object) {
        if (alpha.empty()) throw Error("rasterizer: object layer has no alpha mask");
        out = composite_object(background, object, alpha, placement, canvas);
    }
    for (const auto& b : blocks) paint_block(out, b, canvas);
    return out;
}

Raster compose_image_layers(const LayerStack& stack, const Canvas& canvas) {
    if (!stack.object) return stack.background;
    const auto& o = *stack.object;
    return composite_object(stack.background, o.rgb, o.alpha, o.placement, canvas);
}

std::shared_ptr<const Rasterizer> make_rasterizer(std::string_view name) {
    if (name == "mock") return std::make_shared<MockRasterizer>();
    throw RasterizerUnavailable("no rasterizer named '" + std::string(name) + "'");
}

Raster rasterize_preview(const SvgDocument& doc, const Rasterizer& rasterizer) { return rasterizer.rasterize(doc); }

Raster rasterize_preview(const SvgDocument& doc) {
    static const MockRasterizer mock;
    return mock.rasterize(doc);
}

}  // namespace coleforge::typeset
