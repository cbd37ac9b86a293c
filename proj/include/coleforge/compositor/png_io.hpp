#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "coleforge/compositor/raster.hpp"

namespace coleforge::compositor {

class PngError : public Error {
public:
    using Error::Error;
};

// 8-bit RGB for 3-channel rasters, 8-bit gray for 1-channel rasters.
std::vector<std::uint8_t> encode_png(const Raster& raster);
Raster decode_png(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const Raster& raster);
Raster read_png(const std::filesystem::path& path);

}  // namespace coleforge::compositor
