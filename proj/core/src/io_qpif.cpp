#include "qpi/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

namespace qpi::io {
namespace {

static_assert(std::endian::native == std::endian::little,
              "QPIF I/O assumes a little-endian host");

constexpr char kMagic[5] = {'Q', 'P', 'I', 'F', '1'};

nlohmann::json make_header(const Grid& grid, const char* dtype, const FieldMeta& meta) {
    nlohmann::json h;
    h["width"] = grid.width;
    h["height"] = grid.height;
    h["dtype"] = dtype;
    h["pixel_pitch_um"] = meta.pixel_pitch_um;
    h["units"] = meta.units;
    return h;
}

void write_payload(const std::filesystem::path& path, const nlohmann::json& header,
                   const std::vector<float>& payload) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInputError("cannot open for writing: " + path.string());
    const std::string hs = header.dump(); // nlohmann sorts keys; stable bytes
    const std::uint32_t len = static_cast<std::uint32_t>(hs.size());
    out.write(kMagic, 5);
    out.write(reinterpret_cast<const char*>(&len), 4);
    out.write(hs.data(), hs.size());
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!out) throw InvalidInputError("write failed: " + path.string());
}

} // namespace

void write_field(const std::filesystem::path& path, const RealField& field,
                 const FieldMeta& meta) {
    std::vector<float> payload(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) payload[i] = static_cast<float>(field[i]);
    write_payload(path, make_header(field.grid(), "f32", meta), payload);
}

void write_field(const std::filesystem::path& path, const ComplexField& field,
                 const FieldMeta& meta) {
    std::vector<float> payload(field.size() * 2);
    for (std::size_t i = 0; i < field.size(); ++i) {
        payload[2 * i] = static_cast<float>(field[i].real());
        payload[2 * i + 1] = static_cast<float>(field[i].imag());
    }
    write_payload(path, make_header(field.grid(), "c64-interleaved", meta), payload);
}

LoadedField read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open: " + path.string());
    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, kMagic, 5) != 0)
        throw InvalidInputError("not a QPIF1 file: " + path.string());
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 4);
    if (!in || len == 0 || len > (1u << 24))
        throw InvalidInputError("corrupt QPIF1 header length: " + path.string());
    std::string hs(len, '\0');
    in.read(hs.data(), len);
    if (!in) throw InvalidInputError("truncated QPIF1 header: " + path.string());

    nlohmann::json h;
    try {
        h = nlohmann::json::parse(hs);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInputError("bad QPIF1 header JSON in " + path.string() + ": " + e.what());
    }
    LoadedField lf;
    int width = 0, height = 0;
    std::string dtype;
    try {
        width = h.at("width").get<int>();
        height = h.at("height").get<int>();
        dtype = h.at("dtype").get<std::string>();
        lf.meta.pixel_pitch_um = h.value("pixel_pitch_um", 3.5);
        lf.meta.units = h.value("units", "");
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInputError("bad QPIF1 header fields in " + path.string() + ": " +
                                e.what());
    }
    if (width <= 0 || height <= 0)
        throw InvalidInputError("bad QPIF1 dimensions in " + path.string());

    const std::size_t n = static_cast<std::size_t>(width) * height;
    const std::size_t scalars = dtype == "c64-interleaved" ? 2 * n : n;
    if (dtype != "f32" && dtype != "c64-interleaved")
        throw InvalidInputError("unsupported QPIF1 dtype '" + dtype + "' in " + path.string());
    std::vector<float> payload(scalars);
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(scalars * sizeof(float)));
    if (!in) throw InvalidInputError("truncated QPIF1 payload: " + path.string());

    if (dtype == "f32") {
        lf.real = RealField({width, height});
        for (std::size_t i = 0; i < n; ++i) lf.real[i] = payload[i];
    } else {
        lf.is_complex = true;
        lf.complex_ = ComplexField({width, height});
        for (std::size_t i = 0; i < n; ++i)
            lf.complex_[i] = {payload[2 * i], payload[2 * i + 1]};
    }
    return lf;
}

RealField read_real_field(const std::filesystem::path& path) {
    LoadedField lf = read_field(path);
    if (lf.is_complex)
        throw InvalidInputError("expected f32 field in " + path.string());
    return std::move(lf.real);
}

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace qpi::io
