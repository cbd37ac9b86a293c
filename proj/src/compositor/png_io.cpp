#include "coleforge/compositor/png_io.hpp"

#include <png.h>
#include <zlib.h>

#include <cstring>
#include <fstream>
#include <iterator>

namespace coleforge::compositor {

namespace {

void write_to_vector(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

[[noreturn]] void on_png_error(png_structp, png_const_charp msg) { throw PngError(std::string("png: ") + msg); }

void on_png_warning(png_structp, png_const_charp) {}

}  // namespace

std::vector<std::uint8_t> encode_png(const Raster& raster) {
    if (raster.empty()) throw PngError("png: cannot encode an empty raster");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error, on_png_warning);
    if (!png) throw PngError("png: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw PngError("png: out of memory");
    }
    std::vector<std::uint8_t> out;
    try {
        png_set_write_fn(png, &out, write_to_vector, flush_noop);
        // Speed over size: previews and layers are re-encoded on every render.
        png_set_compression_level(png, Z_BEST_SPEED);
        png_set_IHDR(png, info, static_cast<png_uint_32>(raster.width()), static_cast<png_uint_32>(raster.height()), 8,
                     raster.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                     PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        const std::size_t stride = static_cast<std::size_t>(raster.width()) * static_cast<std::size_t>(raster.channels());
        const auto* base = raster.data().data();
        for (int y = 0; y < raster.height(); ++y) {
            png_write_row(png, const_cast<png_bytep>(base + static_cast<std::size_t>(y) * stride));
        }
        png_write_end(png, nullptr);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
    png_destroy_write_struct(&png, &info);
    return out;
}

Raster decode_png(std::span<const std::uint8_t> bytes) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw PngError(std::string("png: ") + image.message);
    }
    const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
    image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    const int channels = gray ? 1 : 3;
    std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, data.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw PngError("png: " + msg);
    }
    return Raster(static_cast<int>(image.width), static_cast<int>(image.height), channels, std::move(data));
}

void write_png(const std::filesystem::path& path, const Raster& raster) {
    const auto bytes = encode_png(raster);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw PngError("png: cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Raster read_png(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw PngError("png: cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_png(bytes);
}

}  // namespace coleforge::compositor
