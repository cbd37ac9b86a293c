#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coleforge/core/error.hpp"

namespace coleforge::compositor {

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Row-major interleaved 8-bit image with 1 (gray / alpha) or 3 (RGB) channels.
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, int channels, std::uint8_t fill = 0);
    Raster(int width, int height, int channels, std::vector<std::uint8_t> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return data_.empty(); }

    std::uint8_t& at(int x, int y, int c) { return data_[index(x, y, c)]; }
    std::uint8_t at(int x, int y, int c) const { return data_[index(x, y, c)]; }

    std::span<std::uint8_t> data() noexcept { return data_; }
    std::span<const std::uint8_t> data() const noexcept { return data_; }
    const std::vector<std::uint8_t>& bytes() const noexcept { return data_; }

    bool same_size(const Raster& o) const noexcept { return width_ == o.width_ && height_ == o.height_; }

    bool operator==(const Raster&) const = default;

private:
    std::size_t index(int x, int y, int c) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) *
                   static_cast<std::size_t>(channels_) +
               static_cast<std::size_t>(c);
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

}  // namespace coleforge::compositor
