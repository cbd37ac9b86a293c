#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "coleforge/compositor/raster.hpp"
#include "coleforge/typeset/svg_renderer.hpp"

namespace coleforge::typeset {

class RasterizerUnavailable : public Error {
public:
    using Error::Error;
};

class Rasterizer {
public:
    virtual ~Rasterizer() = default;
    virtual std::string id() const = 0;
    virtual Raster rasterize(const SvgDocument& doc) const = 0;
};

// Reads back the documents render_svg produces: decodes the embedded layer
// PNGs, composites the object through its alpha mask and placement, and
// paints every text block as a solid rectangle of its color covering the
// block box (rotated about its center), blended at the block opacity.
class MockRasterizer final : public Rasterizer {
public:
    std::string id() const override { return "mock"; }
    Raster rasterize(const SvgDocument& doc) const override;
};

// Known names: "mock". Anything else throws RasterizerUnavailable.
std::shared_ptr<const Rasterizer> make_rasterizer(std::string_view name);

// Background with the object composited through its alpha and placement,
// i.e. the image the text layers are drawn on.
Raster compose_image_layers(const LayerStack& stack, const Canvas& canvas);

Raster rasterize_preview(const SvgDocument& doc, const Rasterizer& rasterizer);
Raster rasterize_preview(const SvgDocument& doc);

}  // namespace coleforge::typeset
