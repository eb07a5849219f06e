#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "qpi/field.hpp"

namespace qpi::io {

// QPIF1 container: magic "QPIF1", uint32 little-endian JSON header length,
// JSON header, raw little-endian payload. dtype "f32" stores one float per
// sample; "c64-interleaved" stores re/im float pairs. Values are double in
// memory and float32 on disk.
struct FieldMeta {
    double pixel_pitch_um = 3.5;
    std::string units; // "radians", "intensity", "mask", ...
};

void write_field(const std::filesystem::path& path, const RealField& field,
                 const FieldMeta& meta);
void write_field(const std::filesystem::path& path, const ComplexField& field,
                 const FieldMeta& meta);

struct LoadedField {
    RealField real;        // filled when dtype == f32
    ComplexField complex_; // filled when dtype == c64-interleaved
    bool is_complex = false;
    FieldMeta meta;
};

LoadedField read_field(const std::filesystem::path& path);
RealField read_real_field(const std::filesystem::path& path);

// 8-bit RGB PNG.
void write_png_rgb(const std::filesystem::path& path, const RgbImage& image);
RgbImage read_png_rgb(const std::filesystem::path& path);

// 1-bit grayscale PNG mask (nonzero -> 1).
void write_png_mask(const std::filesystem::path& path, const Field<std::uint8_t>& mask);
Field<std::uint8_t> read_png_mask(const std::filesystem::path& path);

// Lowercase hex SHA-256 of a file or buffer.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_bytes(const void* data, std::size_t size);

// Shortest float formatting used in CSV output: %.9g.
std::string format_g9(double v);

} // namespace qpi::io
