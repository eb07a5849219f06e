#pragma once

#include <cstdint>
#include <string>

#include "qpi/field.hpp"

namespace qpi::seg {

// ROI request: center in full-frame coordinates, square side in pixels.
struct RoiSpec {
    std::string image_id;
    double center_x = 0.0;
    double center_y = 0.0;
    int side = 256;
};

// BT.601 luma: 0.299 R + 0.587 G + 0.114 B, kept as double.
RealField rgb_to_luma(const RgbImage& rgb);

// 3x3 median filter with replicated borders.
RealField median_filter3(const RealField& f);

struct Kmeans2Result {
    Field<std::uint8_t> labels; // 1 = cluster with the lower centroid
    double low_centroid = 0.0;
    double high_centroid = 0.0;
    int iterations = 0;
};

// Scalar 2-means, centroids initialized at the 10th and 90th percentiles,
// Lloyd iterations to an assignment fixpoint (at most max_iterations).
// Distance ties go to the lower centroid. The lower-centroid cluster gets
// label 1 (nucleus candidates are dark). Throws DegenerateInputError when
// all values are equal.
Kmeans2Result kmeans2(const RealField& values, int max_iterations = 100);

// Keeps only the 4-connected candidate component whose centroid is nearest
// the ROI center, fills enclosed holes (background not reachable from the
// image border), and validates the result: at least 16 pixels, one
// component. Throws SegmentationFailureError when no candidate survives.
NucleusMask refine_mask(const Field<std::uint8_t>& candidates, double roi_center_x,
                        double roi_center_y);

// Full chain: luma -> median filter -> 2-means -> refine, keeping the
// candidate component nearest the given center (image coordinates).
NucleusMask segment_nucleus(const RgbImage& roi, double center_x, double center_y);

// Same, centered on the image: ((w-1)/2, (h-1)/2).
NucleusMask segment_nucleus(const RgbImage& roi);

// Dice overlap 2|A n B| / (|A| + |B|); 1.0 when both masks are empty.
double dice(const NucleusMask& a, const NucleusMask& b);

} // namespace qpi::seg
