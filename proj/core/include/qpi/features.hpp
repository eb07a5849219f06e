#pragma once

#include <array>
#include <string>
#include <vector>

#include "qpi/field.hpp"

namespace qpi::feat {

inline constexpr int kFeatureCount = 19;
inline constexpr int kBrightfieldFeatureCount = 10;

// Fixed column order: brightfield block first, phase block second. Analysis
// selects the brightfield block as the first kBrightfieldFeatureCount columns.
const std::array<std::string, kFeatureCount>& feature_names();

struct NucleusFeatures {
    std::string nucleus_id;
    std::string class_label; // empty when truth is unknown
    std::array<double, kFeatureCount> values{};
};

struct FeatureMatrix {
    std::vector<NucleusFeatures> rows;
};

// ---- mask geometry ----

// Pixel count of the mask.
double area(const NucleusMask& mask);

// Sum over the grid of sqrt(gx^2 + gy^2) of the 0/1 mask under forward
// differences; a smooth-boundary length estimate.
double perimeter(const NucleusMask& mask);

// 4-neighbor erosion; pixels outside the grid count as background, so the
// image border is always eroded.
Field<std::uint8_t> erode4(const Field<std::uint8_t>& mask);

// ---- brightfield statistics (population variance throughout) ----

struct ChannelStats {
    double mean_r = 0.0, mean_g = 0.0, mean_b = 0.0;
    double var_r = 0.0, var_g = 0.0, var_b = 0.0;
    double mean_luma = 0.0;
};

ChannelStats channel_stats(const RgbImage& rgb, const NucleusMask& mask);

// ---- phase morphometry (phase must be unwrapped) ----

// Sum of phase over the mask.
double optical_volume(const RealField& phase, const NucleusMask& mask);

// Mean phase-gradient magnitude: sum of sqrt(|d phase/dx|^2 + |d phase/dy|^2)
// over the eroded mask (so differences never cross the boundary), divided by
// the full mask area.
double roughness_per_area(const RealField& phase, const NucleusMask& mask);

// roughness_per_area evaluated on bicubically downscaled phase and mask.
// Throws FeatureUndefinedError when the scaled mask drops below 16 pixels.
double roughness_at_scale(const RealField& phase, const NucleusMask& mask, double scale);

inline constexpr std::array<double, 4> kRoughnessScales = {0.75, 0.5, 0.25, 0.125};

// Population variance of phase over the mask.
double phase_variance(const RealField& phase, const NucleusMask& mask);

// Distance between the phase-weighted centroid and the geometric mask
// centroid. Requires positive total phase mass over the mask.
double centroid_shift(const RealField& phase, const NucleusMask& mask);

// Moment of inertia of the masked phase about the ROI center
// ((W-1)/2, (H-1)/2): sum of phase * r^2 over the mask, plus the total
// phase mass times the squared distance from the phase centroid to that
// center.
double moment_of_inertia(const RealField& phase, const NucleusMask& mask);

// All 19 features in column order. The phase map must be unwrapped and all
// grids must agree.
NucleusFeatures extract_all(const RgbImage& brightfield, const PhaseMap& phase,
                            const NucleusMask& mask, const std::string& nucleus_id,
                            const std::string& class_label = "");

} // namespace qpi::feat
