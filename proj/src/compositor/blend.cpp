#include "coleforge/compositor/blend.hpp"

#include <cmath>
#include <cstdlib>

namespace coleforge::compositor {

namespace {

void check_blend_inputs(const Raster& bg, const Raster& obj, const Raster& alpha) {
    if (bg.channels() != 3 || obj.channels() != 3) throw DimensionMismatch("blend needs 3-channel layers");
    if (alpha.channels() != 1) throw DimensionMismatch("blend needs a 1-channel alpha mask");
    if (!bg.same_size(obj) || !bg.same_size(alpha)) throw DimensionMismatch("blend inputs differ in size");
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[off + static_cast<std::size_t>(i)]) << (8 * i);
    return v;
}

}  // namespace

std::uint8_t blend_sample(std::uint8_t bg, std::uint8_t obj, std::uint8_t alpha) noexcept {
    const double a = alpha / 255.0;
    const double v = bg * (1.0 - a) + obj * a;
    return static_cast<std::uint8_t>(std::round(v));
}

void blend_rows(const Raster& bg, const Raster& obj, const Raster& alpha, Raster& out, int row_begin, int row_end) {
    for (int y = row_begin; y < row_end; ++y) {
        for (int x = 0; x < bg.width(); ++x) {
            const std::uint8_t a = alpha.at(x, y, 0);
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = blend_sample(bg.at(x, y, c), obj.at(x, y, c), a);
        }
    }
}

Raster blend(const Raster& background, const Raster& object, const Raster& alpha) {
    check_blend_inputs(background, object, alpha);
    Raster out(background.width(), background.height(), 3);
    blend_rows(background, object, alpha, out, 0, background.height());
    return out;
}

std::uint8_t SevenChannelFrame::plane_at(int plane, int x, int y) const {
    const std::size_t n = static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    return planes_[static_cast<std::size_t>(plane) * n + static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                   static_cast<std::size_t>(x)];
}

SevenChannelFrame assemble_frame(const Raster& object_rgb, const Raster& alpha, const Raster& composed_rgb) {
    if (object_rgb.channels() != 3 || composed_rgb.channels() != 3 || alpha.channels() != 1) {
        throw DimensionMismatch("frame needs RGB object, 1-channel alpha and RGB composed image");
    }
    if (!object_rgb.same_size(alpha) || !object_rgb.same_size(composed_rgb)) {
        throw DimensionMismatch("frame parts differ in size");
    }
    SevenChannelFrame f;
    f.width_ = object_rgb.width();
    f.height_ = object_rgb.height();
    const std::size_t n = static_cast<std::size_t>(f.width_) * static_cast<std::size_t>(f.height_);
    f.planes_.resize(n * SevenChannelFrame::kChannels);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            f.planes_[c * n + i] = object_rgb.bytes()[i * 3 + c];
            f.planes_[(4 + c) * n + i] = composed_rgb.bytes()[i * 3 + c];
        }
        f.planes_[3 * n + i] = alpha.bytes()[i];
    }
    return f;
}

FrameParts split_frame(const SevenChannelFrame& frame) {
    const int w = frame.width();
    const int h = frame.height();
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    const auto& p = frame.planes();
    std::vector<std::uint8_t> obj(n * 3), alpha(n), comp(n * 3);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            obj[i * 3 + c] = p[c * n + i];
            comp[i * 3 + c] = p[(4 + c) * n + i];
        }
        alpha[i] = p[3 * n + i];
    }
    return FrameParts{Raster(w, h, 3, std::move(obj)), Raster(w, h, 1, std::move(alpha)),
                      Raster(w, h, 3, std::move(comp))};
}

std::vector<std::uint8_t> frame_to_raw(const SevenChannelFrame& frame) {
    std::vector<std::uint8_t> out{'C', 'F', '7', 'C'};
    put_u32(out, static_cast<std::uint32_t>(frame.width()));
    put_u32(out, static_cast<std::uint32_t>(frame.height()));
    put_u32(out, SevenChannelFrame::kChannels);
    out.insert(out.end(), frame.planes().begin(), frame.planes().end());
    return out;
}

SevenChannelFrame frame_from_raw(std::span<const std::uint8_t> raw) {
    if (raw.size() < 16 || raw[0] != 'C' || raw[1] != 'F' || raw[2] != '7' || raw[3] != 'C') {
        throw DimensionMismatch("not a seven-channel frame dump");
    }
    const auto w = get_u32(raw, 4);
    const auto h = get_u32(raw, 8);
    const auto planes = get_u32(raw, 12);
    if (planes != SevenChannelFrame::kChannels || w == 0 || h == 0 || w > 1u << 15 || h > 1u << 15) {
        throw DimensionMismatch("frame dump header is invalid");
    }
    const std::size_t n = static_cast<std::size_t>(w) * h;
    if (raw.size() != 16 + n * SevenChannelFrame::kChannels) throw DimensionMismatch("frame dump has the wrong size");
    SevenChannelFrame f;
    f.width_ = static_cast<int>(w);
    f.height_ = static_cast<int>(h);
    f.planes_.assign(raw.begin() + 16, raw.end());
    return f;
}

int consistency_check(const SevenChannelFrame& frame, const Raster& background) {
    if (background.channels() != 3 || background.width() != frame.width() || background.height() != frame.height()) {
        throw DimensionMismatch("background does not match the frame");
    }
    int worst = 0;
    for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < frame.width(); ++x) {
            const std::uint8_t a = frame.plane_at(3, x, y);
            for (int c = 0; c < 3; ++c) {
                const int expected = blend_sample(background.at(x, y, c), frame.plane_at(c, x, y), a);
                worst = std::max(worst, std::abs(frame.plane_at(4 + c, x, y) - expected));
            }
        }
    }
    return worst;
}

}  // namespace coleforge::compositor
