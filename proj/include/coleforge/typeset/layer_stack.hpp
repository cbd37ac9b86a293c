#pragma once

#include <optional>
#include <vector>

#include "coleforge/codec/typography_codec.hpp"
#include "coleforge/compositor/raster.hpp"

namespace coleforge::typeset {

using compositor::Raster;

struct Canvas {
    int width = 1024;
    int height = 1024;

    bool valid() const noexcept { return width > 0 && height > 0; }
    bool operator==(const Canvas&) const = default;
};

// Normalized [-1, 1] canvas coordinates to pixels and back.
inline double to_px_x(double x, const Canvas& c) noexcept { return (x + 1.0) / 2.0 * c.width; }
inline double to_px_y(double y, const Canvas& c) noexcept { return (y + 1.0) / 2.0 * c.height; }
inline double from_px_x(double px, const Canvas& c) noexcept { return px / c.width * 2.0 - 1.0; }
inline double from_px_y(double py, const Canvas& c) noexcept { return py / c.height * 2.0 - 1.0; }
inline double extent_to_px_x(double w, const Canvas& c) noexcept { return w / 2.0 * c.width; }
inline double extent_to_px_y(double h, const Canvas& c) noexcept { return h / 2.0 * c.height; }

// Placement of the object layer relative to where it was generated:
// translated by (offset_x, offset_y) in normalized units and scaled about
// the canvas center.
struct ObjectPlacement {
    double offset_x = 0.0;
    double offset_y = 0.0;
    double scale = 1.0;

    bool is_identity() const noexcept { return offset_x == 0.0 && offset_y == 0.0 && scale == 1.0; }
    bool operator==(const ObjectPlacement&) const = default;
};

struct ObjectLayer {
    Raster rgb;
    Raster alpha;
    ObjectPlacement placement;

    bool operator==(const ObjectLayer&) const = default;
};

struct LayerStack {
    Raster background;
    std::optional<ObjectLayer> object;
    std::vector<codec::TypographySpec> text_blocks;

    bool operator==(const LayerStack&) const = default;
};

// Raster sizes against the canvas, and every text block's invariants.
Findings validate_stack(const LayerStack& stack, const Canvas& canvas);

}  // namespace coleforge::typeset
