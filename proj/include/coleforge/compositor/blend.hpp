#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "coleforge/compositor/raster.hpp"

namespace coleforge::compositor {

// Unpremultiplied 8-bit alpha blend:
//   out = round(bg * (1 - a/255) + obj * (a/255)), rounding half away from zero.
std::uint8_t blend_sample(std::uint8_t bg, std::uint8_t obj, std::uint8_t alpha) noexcept;

// Throws DimensionMismatch unless bg/obj are 3-channel, alpha 1-channel, all same size.
Raster blend(const Raster& background, const Raster& object, const Raster& alpha);

// Rows [row_begin, row_end) of blend(), written into `out` (already sized).
// Disjoint row ranges may be processed concurrently.
void blend_rows(const Raster& background, const Raster& object, const Raster& alpha, Raster& out, int row_begin,
                int row_end);

// Object prediction frame: object RGB, its alpha mask and the composed image.
// Planes are stored in the fixed order objR, objG, objB, alpha, compR, compG, compB.
class SevenChannelFrame {
public:
    static constexpr int kChannels = 7;

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    const std::vector<std::uint8_t>& planes() const noexcept { return planes_; }
    std::uint8_t plane_at(int plane, int x, int y) const;

    bool operator==(const SevenChannelFrame&) const = default;

    friend SevenChannelFrame assemble_frame(const Raster&, const Raster&, const Raster&);
    friend SevenChannelFrame frame_from_raw(std::span<const std::uint8_t>);

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> planes_;
};

SevenChannelFrame assemble_frame(const Raster& object_rgb, const Raster& alpha, const Raster& composed_rgb);

struct FrameParts {
    Raster object_rgb;
    Raster alpha;
    Raster composed_rgb;
};

FrameParts split_frame(const SevenChannelFrame& frame);

// Raw interchange dump:
//   bytes 0..3   ASCII "CF7C"
//   bytes 4..7   width, uint32 little endian
//   bytes 8..11  height, uint32 little endian
//   bytes 12..15 plane count (7), uint32 little endian
//   then 7 planes of width*height bytes each, row-major, in frame order.
std::vector<std::uint8_t> frame_to_raw(const SevenChannelFrame& frame);
SevenChannelFrame frame_from_raw(std::span<const std::uint8_t> raw);

// max |composed - blend(background, object, alpha)| over all pixels and channels.
int consistency_check(const SevenChannelFrame& frame, const Raster& background);

}  // namespace coleforge::compositor
