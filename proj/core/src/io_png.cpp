#include <cstdio>
#include <memory>
#include <vector>

#include <png.h>

#include "qpi/io.hpp"

namespace qpi::io {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::filesystem::path& path, const char* what) {
    throw InvalidInputError(std::string(what) + ": " + path.string());
}

} // namespace

void write_png_rgb(const std::filesystem::path& path, const RgbImage& image) {
    if (image.grid.size() == 0 || image.pixels.size() != image.grid.size() * 3)
        throw InvalidInputError("write_png_rgb: malformed image");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail(path, "cannot open for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        fail(path, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "libpng write failed");
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, image.grid.width, image.grid.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(image.grid.height);
    for (int y = 0; y < image.grid.height; ++y)
        rows[y] = const_cast<png_bytep>(image.pixels.data() +
                                        static_cast<std::size_t>(y) * image.grid.width * 3);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

RgbImage read_png_rgb(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail(path, "cannot open");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "not a readable PNG");
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    // Normalize to 8-bit RGB regardless of the stored layout.
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    RgbImage image;
    image.grid = {static_cast<int>(png_get_image_width(png, info)),
                  static_cast<int>(png_get_image_height(png, info))};
    image.pixels.resize(image.grid.size() * 3);
    std::vector<png_bytep> rows(image.grid.height);
    for (int y = 0; y < image.grid.height; ++y)
        rows[y] = image.pixels.data() + static_cast<std::size_t>(y) * image.grid.width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return image;
}

void write_png_mask(const std::filesystem::path& path, const Field<std::uint8_t>& mask) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail(path, "cannot open for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        fail(path, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "libpng write failed");
    }
    png_init_io(png, fp.get());
    const int w = mask.width(), h = mask.height();
    png_set_IHDR(png, info, w, h, 1, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    // Pack 8 pixels per byte, MSB first.
    const int stride = (w + 7) / 8;
    std::vector<png_byte> packed(static_cast<std::size_t>(stride) * h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask.at(x, y))
                packed[static_cast<std::size_t>(y) * stride + x / 8] |=
                    static_cast<png_byte>(0x80u >> (x % 8));
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = packed.data() + static_cast<std::size_t>(y) * stride;
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Field<std::uint8_t> read_png_mask(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail(path, "cannot open");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "not a readable PNG");
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_rgb_to_gray(png, 1, -1.0, -1.0);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    std::vector<png_byte> buf(static_cast<std::size_t>(w) * h);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = buf.data() + static_cast<std::size_t>(y) * w;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Field<std::uint8_t> mask({w, h}, 0);
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = buf[i] ? 1 : 0;
    return mask;
}

} // namespace qpi::io
