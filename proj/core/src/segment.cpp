#include "qpi/segment.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qpi::seg {
namespace {

// Nearest-rank percentile, p in [0, 100].
double percentile(std::vector<double> v, double p) {
    const std::size_t n = v.size();
    std::size_t idx = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
    if (idx > 0) --idx;
    if (idx >= n) idx = n - 1;
    std::nth_element(v.begin(), v.begin() + idx, v.end());
    return v[idx];
}

} // namespace

RealField rgb_to_luma(const RgbImage& rgb) {
    RealField out(rgb.grid);
    for (std::size_t i = 0; i < rgb.grid.size(); ++i) {
        const std::uint8_t* p = rgb.pixels.data() + 3 * i;
        out[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
    return out;
}

RealField median_filter3(const RealField& f) {
    const int w = f.width(), h = f.height();
    RealField out(f.grid());
    double win[9];
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int n = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                const int yy = std::clamp(y + dy, 0, h - 1);
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = std::clamp(x + dx, 0, w - 1);
                    win[n++] = f.at(xx, yy);
                }
            }
            std::nth_element(win, win + 4, win + 9);
            out.at(x, y) = win[4];
        }
    }
    return out;
}

Kmeans2Result kmeans2(const RealField& values, int max_iterations) {
    if (max_iterations < 1)
        throw InvalidConfigurationError("kmeans2: max_iterations must be positive");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    if (*mn == *mx)
        throw DegenerateInputError("kmeans2: all samples are equal");

    std::vector<double> v(values.begin(), values.end());
    double c_low = percentile(v, 10.0);
    double c_high = percentile(v, 90.0);
    if (c_low == c_high) {
        c_low = *mn;
        c_high = *mx;
    }

    Kmeans2Result r;
    r.labels = Field<std::uint8_t>(values.grid(), 0);
    std::vector<std::uint8_t> prev(values.size(), 255);
    for (int it = 0; it < max_iterations; ++it) {
        r.iterations = it + 1;
        // Assign: ties at the midpoint go to the lower centroid.
        bool changed = false;
        double sum_low = 0.0, sum_high = 0.0;
        std::size_t n_low = 0, n_high = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d_low = std::fabs(values[i] - c_low);
            const double d_high = std::fabs(values[i] - c_high);
            const std::uint8_t label = d_low <= d_high ? 1 : 0;
            r.labels[i] = label;
            if (label != prev[i]) changed = true;
            if (label) {
                sum_low += values[i];
                ++n_low;
            } else {
                sum_high += values[i];
                ++n_high;
            }
        }
        if (!changed) break;
        prev.assign(r.labels.begin(), r.labels.end());
        // Update; an empty cluster keeps its centroid.
        if (n_low) c_low = sum_low / n_low;
        if (n_high) c_high = sum_high / n_high;
        // Keep the "low" centroid the lower one so label 1 stays the dark
        // cluster even if the centroids cross.
        if (c_low > c_high) {
            std::swap(c_low, c_high);
            for (auto& l : r.labels) l ^= 1;
            for (auto& l : prev) l ^= 1;
        }
    }
    r.low_centroid = c_low;
    r.high_centroid = c_high;
    return r;
}

namespace {

// 4-connected component labeling by BFS scan order; label 0 = unlabeled.
std::vector<int> label_components(const Field<std::uint8_t>& mask, int& component_count) {
    const int w = mask.width(), h = mask.height();
    std::vector<int> labels(mask.size(), 0);
    std::vector<std::size_t> queue;
    int next = 0;
    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || labels[start]) continue;
        ++next;
        labels[start] = next;
        queue.assign(1, start);
        while (!queue.empty()) {
            const std::size_t p = queue.back();
            queue.pop_back();
            const int x = static_cast<int>(p % w), y = static_cast<int>(p / w);
            const int nx[4] = {x - 1, x + 1, x, x};
            const int ny[4] = {y, y, y - 1, y + 1};
            for (int k = 0; k < 4; ++k) {
                if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
                const std::size_t q = static_cast<std::size_t>(ny[k]) * w + nx[k];
                if (mask[q] && !labels[q]) {
                    labels[q] = next;
                    queue.push_back(q);
                }
            }
        }
    }
    component_count = next;
    return labels;
}

} // namespace

NucleusMask refine_mask(const Field<std::uint8_t>& candidates, double roi_center_x,
                        double roi_center_y) {
    const int w = candidates.width(), h = candidates.height();
    int ncomp = 0;
    std::vector<int> labels = label_components(candidates, ncomp);
    if (ncomp == 0)
        throw SegmentationFailureError("no candidate nucleus pixels");

    // Component centroids; pick the one nearest the ROI center, breaking
    // ties by scan order (lower label).
    std::vector<double> sx(ncomp + 1, 0.0), sy(ncomp + 1, 0.0);
    std::vector<int> count(ncomp + 1, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int l = labels[static_cast<std::size_t>(y) * w + x];
            if (!l) continue;
            sx[l] += x;
            sy[l] += y;
            ++count[l];
        }
    int best = 0;
    double best_d = 0.0;
    for (int l = 1; l <= ncomp; ++l) {
        const double cx = sx[l] / count[l], cy = sy[l] / count[l];
        const double d = std::hypot(cx - roi_center_x, cy - roi_center_y);
        if (best == 0 || d < best_d) {
            best = l;
            best_d = d;
        }
    }

    NucleusMask mask;
    mask.values = Field<std::uint8_t>(candidates.grid(), 0);
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (labels[i] == best) mask.values[i] = 1;

    // Fill holes: background 4-connected to the border stays background,
    // everything else becomes nucleus.
    std::vector<std::uint8_t> outside(mask.values.size(), 0);
    std::vector<std::size_t> queue;
    auto push_bg = [&](int x, int y) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (!mask.values[i] && !outside[i]) {
            outside[i] = 1;
            queue.push_back(i);
        }
    };
    for (int x = 0; x < w; ++x) {
        push_bg(x, 0);
        push_bg(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push_bg(0, y);
        push_bg(w - 1, y);
    }
    while (!queue.empty()) {
        const std::size_t p = queue.back();
        queue.pop_back();
        const int x = static_cast<int>(p % w), y = static_cast<int>(p / w);
        if (x > 0) push_bg(x - 1, y);
        if (x + 1 < w) push_bg(x + 1, y);
        if (y > 0) push_bg(x, y - 1);
        if (y + 1 < h) push_bg(x, y + 1);
    }
    int area = 0;
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
        if (!outside[i]) mask.values[i] = 1;
        if (mask.values[i]) ++area;
    }
    mask.area = area;

    if (area < 16)
        throw SegmentationFailureError("nucleus mask below 16 pixels");
    int final_count = 0;
    label_components(mask.values, final_count);
    if (final_count != 1)
        throw SegmentationFailureError("nucleus mask is not a single component");
    return mask;
}

NucleusMask segment_nucleus(const RgbImage& roi, double center_x, double center_y) {
    if (!roi.grid.contains(static_cast<int>(center_x), static_cast<int>(center_y)))
        throw InvalidInputError("segment: center outside the image");
    const RealField luma = rgb_to_luma(roi);
    const RealField filtered = median_filter3(luma);
    const Kmeans2Result km = kmeans2(filtered);
    return refine_mask(km.labels, center_x, center_y);
}

NucleusMask segment_nucleus(const RgbImage& roi) {
    return segment_nucleus(roi, (roi.grid.width - 1) / 2.0, (roi.grid.height - 1) / 2.0);
}

double dice(const NucleusMask& a, const NucleusMask& b) {
    require_same_grid(a.values.grid(), b.values.grid(), "dice");
    std::size_t inter = 0, total = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (a.values[i] && b.values[i]) ++inter;
        total += a.values[i] + b.values[i];
    }
    if (total == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

} // namespace qpi::seg
