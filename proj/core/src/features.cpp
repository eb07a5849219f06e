#include "qpi/features.hpp"

#include <cmath>

#include "qpi/field_ops.hpp"
#include "qpi/resample.hpp"

namespace qpi::feat {
namespace {

void require_mask(const NucleusMask& mask) {
    if (mask.area <= 0) throw FeatureUndefinedError("empty nucleus mask");
}

double mask_area(const Field<std::uint8_t>& m) {
    double a = 0.0;
    for (auto v : m) a += v;
    return a;
}

// Shared roughness core over explicit fields: sum of phase-gradient
// magnitude on the eroded mask divided by the full mask area.
double roughness_core(const RealField& phase, const Field<std::uint8_t>& mask) {
    const double a = mask_area(mask);
    if (a < 16.0) throw FeatureUndefinedError("mask below 16 pixels");
    const Field<std::uint8_t> eroded = erode4(mask);
    auto [gx, gy] = gradient(phase);
    double sum = 0.0;
    for (std::size_t i = 0; i < phase.size(); ++i)
        if (eroded[i]) sum += std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
    return sum / a;
}

} // namespace

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = {
        "area",
        "perimeter",
        "perimeter_per_area",
        "mean_intensity",
        "mean_red",
        "mean_green",
        "mean_blue",
        "var_red",
        "var_green",
        "var_blue",
        "optical_volume",
        "roughness_per_area",
        "roughness_scale_3_4",
        "roughness_scale_1_2",
        "roughness_scale_1_4",
        "roughness_scale_1_8",
        "phase_variance",
        "centroid_shift",
        "moment_of_inertia",
    };
    return names;
}

double area(const NucleusMask& mask) { return mask_area(mask.values); }

double perimeter(const NucleusMask& mask) {
    RealField m(mask.values.grid());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = mask.values[i];
    auto [gx, gy] = gradient(m);
    double sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        sum += std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
    return sum;
}

Field<std::uint8_t> erode4(const Field<std::uint8_t>& mask) {
    const int w = mask.width(), h = mask.height();
    Field<std::uint8_t> out(mask.grid(), 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) continue;
            if (mask.at(x - 1, y) && mask.at(x + 1, y) && mask.at(x, y - 1) &&
                mask.at(x, y + 1))
                out.at(x, y) = 1;
        }
    return out;
}

ChannelStats channel_stats(const RgbImage& rgb, const NucleusMask& mask) {
    require_same_grid(rgb.grid, mask.values.grid(), "channel_stats");
    require_mask(mask);
    double s[3] = {0, 0, 0}, s2[3] = {0, 0, 0};
    double n = 0.0;
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
        if (!mask.values[i]) continue;
        ++n;
        for (int c = 0; c < 3; ++c) {
            const double v = rgb.pixels[3 * i + c];
            s[c] += v;
            s2[c] += v * v;
        }
    }
    ChannelStats cs;
    cs.mean_r = s[0] / n;
    cs.mean_g = s[1] / n;
    cs.mean_b = s[2] / n;
    cs.var_r = s2[0] / n - cs.mean_r * cs.mean_r;
    cs.var_g = s2[1] / n - cs.mean_g * cs.mean_g;
    cs.var_b = s2[2] / n - cs.mean_b * cs.mean_b;
    cs.mean_luma = 0.299 * cs.mean_r + 0.587 * cs.mean_g + 0.114 * cs.mean_b;
    return cs;
}

double optical_volume(const RealField& phase, const NucleusMask& mask) {
    require_same_grid(phase.grid(), mask.values.grid(), "optical_volume");
    require_mask(mask);
    double sum = 0.0;
    for (std::size_t i = 0; i < phase.size(); ++i)
        if (mask.values[i]) sum += phase[i];
    return sum;
}

double roughness_per_area(const RealField& phase, const NucleusMask& mask) {
    require_same_grid(phase.grid(), mask.values.grid(), "roughness_per_area");
    require_mask(mask);
    return roughness_core(phase, mask.values);
}

double roughness_at_scale(const RealField& phase, const NucleusMask& mask, double scale) {
    require_same_grid(phase.grid(), mask.values.grid(), "roughness_at_scale");
    require_mask(mask);
    const RealField scaled_phase = resample_bicubic(phase, scale);
    const Field<std::uint8_t> scaled_mask = resample_mask(mask.values, scale);
    return roughness_core(scaled_phase, scaled_mask);
}

double phase_variance(const RealField& phase, const NucleusMask& mask) {
    require_same_grid(phase.grid(), mask.values.grid(), "phase_variance");
    require_mask(mask);
    double s = 0.0, s2 = 0.0, n = 0.0;
    for (std::size_t i = 0; i < phase.size(); ++i) {
        if (!mask.values[i]) continue;
        s += phase[i];
        s2 += phase[i] * phase[i];
        ++n;
    }
    const double m = s / n;
    return s2 / n - m * m;
}

double centroid_shift(const RealField& phase, const NucleusMask& mask) {
    require_same_grid(phase.grid(), mask.values.grid(), "centroid_shift");
    require_mask(mask);
    const int w = phase.width(), h = phase.height();
    double mass = 0.0, mx = 0.0, my = 0.0;
    double n = 0.0, gx = 0.0, gy = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!mask.values.at(x, y)) continue;
            const double p = phase.at(x, y);
            mass += p;
            mx += p * x;
            my += p * y;
            ++n;
            gx += x;
            gy += y;
        }
    if (mass <= 0.0)
        throw FeatureUndefinedError("centroid_shift: nonpositive phase mass over mask");
    return std::hypot(mx / mass - gx / n, my / mass - gy / n);
}

double moment_of_inertia(const RealField& phase, const NucleusMask& mask) {
    require_same_grid(phase.grid(), mask.values.grid(), "moment_of_inertia");
    require_mask(mask);
    const int w = phase.width(), h = phase.height();
    const double ox = (w - 1) / 2.0, oy = (h - 1) / 2.0;
    double mass = 0.0, mx = 0.0, my = 0.0, inertia = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!mask.values.at(x, y)) continue;
            const double p = phase.at(x, y);
            const double dx = x - ox, dy = y - oy;
            inertia += p * (dx * dx + dy * dy);
            mass += p;
            mx += p * x;
            my += p * y;
        }
    if (mass <= 0.0)
        throw FeatureUndefinedError("moment_of_inertia: nonpositive phase mass over mask");
    const double d2 = (mx / mass - ox) * (mx / mass - ox) + (my / mass - oy) * (my / mass - oy);
    return inertia + mass * d2;
}

NucleusFeatures extract_all(const RgbImage& brightfield, const PhaseMap& phase,
                            const NucleusMask& mask, const std::string& nucleus_id,
                            const std::string& class_label) {
    if (phase.wrapped)
        throw InvalidInputError("extract_all: phase map must be unwrapped");
    require_same_grid(brightfield.grid, mask.values.grid(), "extract_all");
    require_same_grid(phase.values.grid(), mask.values.grid(), "extract_all");
    require_mask(mask);

    NucleusFeatures f;
    f.nucleus_id = nucleus_id;
    f.class_label = class_label;

    const double a = area(mask);
    const double p = perimeter(mask);
    const ChannelStats cs = channel_stats(brightfield, mask);

    f.values[0] = a;
    f.values[1] = p;
    f.values[2] = p / a;
    f.values[3] = cs.mean_luma;
    f.values[4] = cs.mean_r;
    f.values[5] = cs.mean_g;
    f.values[6] = cs.mean_b;
    f.values[7] = cs.var_r;
    f.values[8] = cs.var_g;
    f.values[9] = cs.var_b;
    f.values[10] = optical_volume(phase.values, mask);
    f.values[11] = roughness_per_area(phase.values, mask);
    for (std::size_t s = 0; s < kRoughnessScales.size(); ++s)
        f.values[12 + s] = roughness_at_scale(phase.values, mask, kRoughnessScales[s]);
    f.values[16] = phase_variance(phase.values, mask);
    f.values[17] = centroid_shift(phase.values, mask);
    f.values[18] = moment_of_inertia(phase.values, mask);
    return f;
}

} // namespace qpi::feat
