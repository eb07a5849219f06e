#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qpi/errors.hpp"

namespace qpi {

// Row-major 2D grid. x indexes columns (fastest), y indexes rows:
// element (x, y) lives at data[y * width + x].
struct Grid {
    int width = 0;
    int height = 0;

    bool operator==(const Grid&) const = default;
    std::size_t size() const { return static_cast<std::size_t>(width) * height; }
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    bool contains(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

template <typename T>
class Field {
public:
    Field() = default;
    explicit Field(Grid g, T fill = T{}) : grid_(checked(g)), data_(grid_.size(), fill) {}

    const Grid& grid() const { return grid_; }
    int width() const { return grid_.width; }
    int height() const { return grid_.height; }
    std::size_t size() const { return data_.size(); }

    T& at(int x, int y) { return data_[grid_.index(x, y)]; }
    const T& at(int x, int y) const { return data_[grid_.index(x, y)]; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& values() { return data_; }
    const std::vector<T>& values() const { return data_; }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

private:
    static Grid checked(Grid g) {
        if (g.width <= 0 || g.height <= 0)
            throw InvalidInputError("field dimensions must be positive");
        return g;
    }

    Grid grid_;
    std::vector<T> data_;
};

using RealField = Field<double>;
using ComplexField = Field<std::complex<double>>;

// Unwrapped-vs-wrapped state travels with the samples so downstream stages
// can reject the wrong kind.
struct PhaseMap {
    RealField values;
    bool wrapped = true;
};

// Binary nucleus mask, 1 inside. Valid masks hold a single 4-connected
// component of at least 16 pixels with no enclosed holes.
struct NucleusMask {
    Field<std::uint8_t> values;
    int area = 0;
};

// Interleaved 8-bit RGB image.
struct RgbImage {
    Grid grid;
    std::vector<std::uint8_t> pixels; // 3 bytes per pixel, row-major

    std::size_t index(int x, int y) const { return 3 * grid.index(x, y); }
};

inline void require_same_grid(const Grid& a, const Grid& b, const std::string& what) {
    if (!(a == b))
        throw InvalidInputError(what + ": grid mismatch (" + std::to_string(a.width) + "x" +
                                std::to_string(a.height) + " vs " + std::to_string(b.width) +
                                "x" + std::to_string(b.height) + ")");
}

} // namespace qpi
