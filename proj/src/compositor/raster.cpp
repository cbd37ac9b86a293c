#include "coleforge/compositor/raster.hpp"

#include <string>

namespace coleforge::compositor {

namespace {

void check_shape(int width, int height, int channels) {
    if (width <= 0 || height <= 0) throw DimensionMismatch("raster dimensions must be positive");
    if (channels != 1 && channels != 3) throw DimensionMismatch("raster must have 1 or 3 channels");
}

}  // namespace

Raster::Raster(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
    check_shape(width, height, channels);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * static_cast<std::size_t>(channels),
                 fill);
}

Raster::Raster(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    check_shape(width, height, channels);
    const auto expected =
        static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * static_cast<std::size_t>(channels);
    if (data_.size() != expected) {
        throw DimensionMismatch("raster data has " + std::to_string(data_.size()) + " bytes, expected " +
                                std::to_string(expected));
    }
}

}  // namespace coleforge::compositor
