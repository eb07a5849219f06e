#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "qpi/holo.hpp"
#include "qpi/segment.hpp"

#include "testutil.hpp"

using namespace qpi;
using namespace qpi::seg;

namespace {

// Exhaustive threshold minimizing total within-class squared deviation; the
// same objective 2-means converges to, solved by brute force.
std::vector<std::uint8_t> best_threshold_labels(const RealField& v) {
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    double best_sse = 1e300, best_thr = sorted.front();
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const double thr = 0.5 * (sorted[i] + sorted[i + 1]);
        double s0 = 0, s1 = 0, n0 = 0, n1 = 0;
        for (const auto& x : v) (x <= thr ? (s0 += x, ++n0) : (s1 += x, ++n1));
        const double m0 = s0 / n0, m1 = s1 / n1;
        double sse = 0.0;
        for (const auto& x : v) {
            const double m = x <= thr ? m0 : m1;
            sse += (x - m) * (x - m);
        }
        if (sse < best_sse) {
            best_sse = sse;
            best_thr = thr;
        }
    }
    std::vector<std::uint8_t> labels(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) labels[i] = v[i] <= best_thr ? 1 : 0;
    return labels;
}

// Counts 4-connected components of 1-pixels.
int count_components(const Field<std::uint8_t>& m) {
    const int w = m.width(), h = m.height();
    std::vector<char> seen(m.size(), 0);
    int count = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < m.size(); ++s) {
        if (!m[s] || seen[s]) continue;
        ++count;
        stack.assign(1, s);
        seen[s] = 1;
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(p % w), y = static_cast<int>(p / w);
            const int nx[4] = {x - 1, x + 1, x, x}, ny[4] = {y, y, y - 1, y + 1};
            for (int k = 0; k < 4; ++k) {
                if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
                const std::size_t q = static_cast<std::size_t>(ny[k]) * w + nx[k];
                if (m[q] && !seen[q]) {
                    seen[q] = 1;
                    stack.push_back(q);
                }
            }
        }
    }
    return count;
}

// True when some 0-pixel is unreachable from the border (an enclosed hole).
bool has_hole(const Field<std::uint8_t>& m) {
    const int w = m.width(), h = m.height();
    std::vector<char> reach(m.size(), 0);
    std::vector<std::size_t> stack;
    auto push = [&](int x, int y) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (!m[i] && !reach[i]) {
            reach[i] = 1;
            stack.push_back(i);
        }
    };
    for (int x = 0; x < w; ++x) {
        push(x, 0);
        push(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push(0, y);
        push(w - 1, y);
    }
    while (!stack.empty()) {
        const std::size_t p = stack.back();
        stack.pop_back();
        const int x = static_cast<int>(p % w), y = static_cast<int>(p / w);
        if (x > 0) push(x - 1, y);
        if (x + 1 < w) push(x + 1, y);
        if (y > 0) push(x, y - 1);
        if (y + 1 < h) push(x, y + 1);
    }
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!m[i] && !reach[i]) return true;
    return false;
}

} // namespace

TEST_CASE("rgb_to_luma applies the fixed channel weights") {
    RgbImage img;
    img.grid = {2, 1};
    img.pixels = {255, 0, 0, 10, 20, 30};
    RealField y = rgb_to_luma(img);
    CHECK(y.at(0, 0) == doctest::Approx(0.299 * 255).epsilon(1e-12));
    CHECK(y.at(1, 0) == doctest::Approx(0.299 * 10 + 0.587 * 20 + 0.114 * 30).epsilon(1e-12));
}

TEST_CASE("median filter removes impulses and replicates borders") {
    RealField f({7, 7}, 10.0);
    f.at(3, 3) = 1000.0; // lone impulse
    RealField g = median_filter3(f);
    CHECK(g.at(3, 3) == 10.0);

    // Against a direct windowed median with clamped indices.
    RealField r = testutil::random_real_field(9, 6, 33);
    RealField m = median_filter3(r);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 9; ++x) {
            std::vector<double> win;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    win.push_back(r.at(std::clamp(x + dx, 0, 8), std::clamp(y + dy, 0, 5)));
            std::sort(win.begin(), win.end());
            CHECK(m.at(x, y) == win[4]);
        }
}

TEST_CASE("kmeans2 agrees with the exhaustive threshold on a bimodal mixture") {
    Rng rng(2024);
    RealField v({128, 128});
    for (std::size_t i = 0; i < v.size(); ++i) {
        const bool dark = rng.uniform() < 0.3;
        v[i] = dark ? 60.0 + 10.0 * rng.gaussian() : 180.0 + 10.0 * rng.gaussian();
    }
    Kmeans2Result km = kmeans2(v);
    CHECK(km.low_centroid < km.high_centroid);
    CHECK(km.low_centroid == doctest::Approx(60.0).epsilon(0.05));
    CHECK(km.high_centroid == doctest::Approx(180.0).epsilon(0.05));

    std::vector<std::uint8_t> oracle_labels = best_threshold_labels(v);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (km.labels[i] == oracle_labels[i]) ++agree;
    CHECK(static_cast<double>(agree) / v.size() >= 0.99);
}

TEST_CASE("kmeans2 labels the lower-centroid cluster 1 and rejects flat input") {
    RealField v({4, 2});
    const double vals[8] = {1.0, 1.1, 0.9, 8.0, 8.2, 7.9, 8.1, 1.05};
    for (int i = 0; i < 8; ++i) v[i] = vals[i];
    Kmeans2Result km = kmeans2(v);
    for (int i = 0; i < 8; ++i) CHECK(km.labels[i] == (vals[i] < 4.0 ? 1 : 0));

    RealField flat({5, 5}, 3.0);
    CHECK_THROWS_AS(kmeans2(flat), DegenerateInputError);
}

TEST_CASE("kmeans2 reaches an assignment fixpoint") {
    RealField v = testutil::random_real_field(64, 64, 8);
    Kmeans2Result km = kmeans2(v);
    CHECK(km.iterations < 100);
    // One more Lloyd assignment with the returned centroids must not move
    // any label: the result is self-consistent.
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::uint8_t expect =
            std::fabs(v[i] - km.low_centroid) <= std::fabs(v[i] - km.high_centroid) ? 1 : 0;
        CHECK(km.labels[i] == expect);
    }
}

TEST_CASE("refine_mask keeps the component nearest the center and fills holes") {
    Field<std::uint8_t> cand({64, 64}, 0);
    // Center blob with a hole, 24x24 around (32, 32).
    for (int y = 20; y < 44; ++y)
        for (int x = 20; x < 44; ++x) cand.at(x, y) = 1;
    for (int y = 30; y < 34; ++y)
        for (int x = 30; x < 34; ++x) cand.at(x, y) = 0; // hole
    // Distractor blob near a corner, larger but farther away.
    for (int y = 2; y < 15; ++y)
        for (int x = 2; x < 15; ++x) cand.at(x, y) = 1;

    NucleusMask m = refine_mask(cand, 31.5, 31.5);
    CHECK(m.area == 24 * 24); // hole filled, distractor gone
    CHECK(m.values.at(31, 31) == 1);
    CHECK(m.values.at(5, 5) == 0);
    CHECK(count_components(m.values) == 1);
    CHECK_FALSE(has_hole(m.values));
}

TEST_CASE("refine_mask rejects empty and undersized candidates") {
    Field<std::uint8_t> empty({32, 32}, 0);
    CHECK_THROWS_AS(refine_mask(empty, 16, 16), SegmentationFailureError);

    Field<std::uint8_t> tiny({32, 32}, 0);
    for (int x = 10; x < 13; ++x)
        for (int y = 10; y < 15; ++y) tiny.at(x, y) = 1; // 15 px
    CHECK_THROWS_AS(refine_mask(tiny, 11, 12), SegmentationFailureError);
}

TEST_CASE("segment_nucleus recovers the phantom mask with high Dice overlap") {
    holo::OpticalConfig o;
    o.width = 128;
    o.height = 128;
    holo::PhantomSpec spec = holo::PhantomSpec::for_class(holo::PhantomClass::SmoothSmall);
    spec.nucleus_radius_px = 24.0;
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        holo::PhantomTruth t = holo::make_phantom(spec, o, seed);
        NucleusMask m = segment_nucleus(t.brightfield);
        CHECK(dice(m, t.mask) >= 0.95);
        CHECK(m.area >= 16);
        CHECK(count_components(m.values) == 1);
        CHECK_FALSE(has_hole(m.values));
    }
}

TEST_CASE("dice is 1 for identical masks and 0 for disjoint ones") {
    NucleusMask a, b;
    a.values = Field<std::uint8_t>({8, 8}, 0);
    b.values = Field<std::uint8_t>({8, 8}, 0);
    for (int i = 0; i < 4; ++i) {
        a.values.at(i, 0) = 1;
        b.values.at(i, 4) = 1;
    }
    CHECK(dice(a, a) == 1.0);
    CHECK(dice(a, b) == 0.0);

    NucleusMask e1, e2;
    e1.values = Field<std::uint8_t>({4, 4}, 0);
    e2.values = Field<std::uint8_t>({4, 4}, 0);
    CHECK(dice(e1, e2) == 1.0);
}
