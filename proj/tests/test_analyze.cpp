#include <doctest.h>

#include <cmath>
#include <vector>

#include "qpi/analyze.hpp"
#include "qpi/rng.hpp"

#include "oracles.hpp"

using namespace qpi;
using qpi::pca::Standardized;
using qpi::pca::PCAModel;
using qpi::pca::StabilityTrace;
using qpi::pca::KMOResult;
using qpi::pca::standardize;
using qpi::pca::project;
using qpi::pca::explained_variance;
using qpi::pca::eigenvector_change;
using qpi::pca::stability_curve;
using qpi::pca::kmo;
using qpi::pca::silhouette;

namespace {

Eigen::MatrixXd make_data(int n, int p, std::uint64_t seed) {
    Rng rng(seed);
    // Mix independent columns through a fixed loading matrix so the
    // correlation spectrum is well separated.
    Eigen::MatrixXd mix = Eigen::MatrixXd::Identity(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) mix(i, j) += 0.35 / (1.0 + std::abs(i - j));
    Eigen::MatrixXd g(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) g(i, j) = rng.gaussian();
    return g * mix;
}

// Correlation matrix computed directly from definitions (no library code).
std::vector<std::vector<double>> direct_correlation(const Eigen::MatrixXd& d) {
    const int n = static_cast<int>(d.rows()), p = static_cast<int>(d.cols());
    std::vector<double> mean(p, 0.0), sd(p, 0.0);
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < n; ++i) mean[j] += d(i, j);
        mean[j] /= n;
        for (int i = 0; i < n; ++i) sd[j] += (d(i, j) - mean[j]) * (d(i, j) - mean[j]);
        sd[j] = std::sqrt(sd[j] / n);
    }
    std::vector<std::vector<double>> corr(p, std::vector<double>(p, 0.0));
    for (int j = 0; j < p; ++j)
        for (int k = 0; k < p; ++k) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                acc += (d(i, j) - mean[j]) / sd[j] * ((d(i, k) - mean[k]) / sd[k]);
            corr[j][k] = acc / n;
        }
    return corr;
}

void align_sign_largest_entry(std::vector<std::vector<double>>& vectors) {
    const int p = static_cast<int>(vectors.size());
    for (int j = 0; j < p; ++j) {
        int arg = 0;
        double best = -1.0;
        for (int i = 0; i < p; ++i)
            if (std::fabs(vectors[i][j]) > best) {
                best = std::fabs(vectors[i][j]);
                arg = i;
            }
        if (vectors[arg][j] < 0.0)
            for (int i = 0; i < p; ++i) vectors[i][j] = -vectors[i][j];
    }
}

} // namespace

TEST_CASE("standardize produces zero mean, unit population variance") {
    Eigen::MatrixXd d = make_data(37, 4, 1);
    Standardized s = standardize(d);
    for (int j = 0; j < 4; ++j) {
        CHECK(std::fabs(s.data.col(j).mean()) < 1e-12);
        CHECK(s.data.col(j).squaredNorm() / 37.0 == doctest::Approx(1.0).epsilon(1e-12));
    }
    // Round trip through the stored transform.
    Eigen::MatrixXd back = (s.data.array().rowwise() * s.std_dev.transpose().array())
                               .matrix()
                               .rowwise() +
                           s.mean.transpose();
    CHECK((back - d).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("standardize rejects degenerate input with a useful message") {
    Eigen::MatrixXd one_row(1, 3);
    one_row << 1, 2, 3;
    CHECK_THROWS_AS(standardize(one_row), InsufficientDataError);

    Eigen::MatrixXd d = make_data(10, 3, 2);
    d.col(1).setConstant(7.0);
    try {
        standardize(d, {"area", "perimeter", "volume"});
        FAIL("expected DegenerateInputError");
    } catch (const DegenerateInputError& e) {
        CHECK(std::string(e.what()).find("perimeter") != std::string::npos);
    }
}

TEST_CASE("pca matches an independent Jacobi eigensolver") {
    Eigen::MatrixXd d = make_data(60, 6, 42);
    PCAModel model = qpi::pca::pca(d);

    auto corr = direct_correlation(d);
    oracle::JacobiResult ref = oracle::jacobi_eigen(corr);
    align_sign_largest_entry(ref.vectors);

    // Precondition for comparing eigenvectors individually.
    for (int j = 0; j + 1 < 6; ++j) CHECK(ref.values[j] - ref.values[j + 1] > 1e-3);

    for (int j = 0; j < 6; ++j) {
        CHECK(model.eigenvalues(j) == doctest::Approx(ref.values[j]).epsilon(1e-10));
        for (int i = 0; i < 6; ++i)
            CHECK(std::fabs(model.eigenvectors(i, j) - ref.vectors[i][j]) < 1e-8);
    }
    // Trace of a correlation matrix equals the number of variables.
    CHECK(model.eigenvalues.sum() == doctest::Approx(6.0).epsilon(1e-10));
}

TEST_CASE("eigenvector sign convention puts the largest entry positive") {
    Eigen::MatrixXd d = make_data(50, 5, 7);
    PCAModel model = qpi::pca::pca(d);
    for (int j = 0; j < 5; ++j) {
        int arg = 0;
        for (int i = 0; i < 5; ++i)
            if (std::fabs(model.eigenvectors(i, j)) > std::fabs(model.eigenvectors(arg, j)))
                arg = i;
        CHECK(model.eigenvectors(arg, j) > 0.0);
    }
}

TEST_CASE("projected scores have diagonal covariance equal to the eigenvalues") {
    Eigen::MatrixXd d = make_data(80, 5, 9);
    PCAModel model = qpi::pca::pca(d);
    Eigen::MatrixXd scores = project(model, d, 5);
    Eigen::MatrixXd cov = scores.transpose() * scores / 80.0;
    for (int j = 0; j < 5; ++j)
        for (int k = 0; k < 5; ++k) {
            const double expect = j == k ? model.eigenvalues(j) : 0.0;
            CHECK(std::fabs(cov(j, k) - expect) < 1e-9);
        }
    CHECK_THROWS_AS(project(model, d, 0), InvalidInputError);
    CHECK_THROWS_AS(project(model, d, 6), InvalidInputError);
}

TEST_CASE("explained variance is a distribution over components") {
    PCAModel model = qpi::pca::pca(make_data(45, 4, 11));
    Eigen::VectorXd ev = explained_variance(model);
    CHECK(ev.sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < 4; ++j) CHECK(ev(j) >= 0.0);
    for (int j = 0; j + 1 < 4; ++j) CHECK(ev(j) >= ev(j + 1));
}

TEST_CASE("eigenvector_change ignores column sign flips") {
    Eigen::MatrixXd d = make_data(40, 4, 13);
    PCAModel model = qpi::pca::pca(d);
    Eigen::MatrixXd flipped = model.eigenvectors;
    flipped.col(0) = -flipped.col(0);
    flipped.col(2) = -flipped.col(2);
    CHECK(eigenvector_change(model.eigenvectors, flipped) < 1e-14);
    CHECK(eigenvector_change(model.eigenvectors, model.eigenvectors) == 0.0);

    // A genuine rotation registers as change.
    Eigen::MatrixXd rotated = model.eigenvectors;
    const double c = std::cos(0.3), s = std::sin(0.3);
    Eigen::VectorXd a = rotated.col(0), b = rotated.col(1);
    rotated.col(0) = c * a + s * b;
    rotated.col(1) = -s * a + c * b;
    CHECK(eigenvector_change(model.eigenvectors, rotated) > 0.1);
}

TEST_CASE("appending the column-means row leaves the basis exactly unchanged") {
    Eigen::MatrixXd d = make_data(30, 4, 17);
    Eigen::MatrixXd extended(31, 4);
    extended.topRows(30) = d;
    extended.row(30) = d.colwise().mean();
    // The extra row standardizes to zero, rescaling every column identically,
    // so the correlation matrix is bit-for-bit the same computation.
    StabilityTrace trace = stability_curve(extended, 30, 1);
    REQUIRE(trace.change.size() == 1);
    CHECK(trace.row_counts[0] == 31);
    CHECK(trace.change[0] <= 1e-10);
}

TEST_CASE("stability_curve always ends at the full row count") {
    Eigen::MatrixXd d = make_data(25, 3, 19);
    StabilityTrace trace = stability_curve(d, 20, 3);
    REQUIRE(trace.row_counts.size() == 2);
    CHECK(trace.row_counts[0] == 23);
    CHECK(trace.row_counts[1] == 25);
    for (double c : trace.change) CHECK(c >= 0.0);

    CHECK_THROWS_AS(stability_curve(d, 3, 1), InvalidInputError);      // < p+1
    CHECK_THROWS_AS(stability_curve(d, 25, 1), InsufficientDataError); // >= n
    CHECK_THROWS_AS(stability_curve(d, 20, 0), InvalidInputError);
}

TEST_CASE("stability change shrinks for data with a strong factor structure") {
    Rng rng(23);
    const int n = 400, p = 5;
    // Neighbor-correlated columns: the correlation matrix approaches
    // rho^|i-j|, whose spectrum is well separated, so the basis settles as
    // rows accumulate.
    const double rho = 0.65;
    Eigen::MatrixXd d(n, p);
    for (int i = 0; i < n; ++i) {
        d(i, 0) = rng.gaussian();
        for (int j = 1; j < p; ++j)
            d(i, j) = rho * d(i, j - 1) + std::sqrt(1.0 - rho * rho) * rng.gaussian();
    }
    StabilityTrace trace = stability_curve(d, 50, 50);
    REQUIRE(trace.change.size() >= 3);
    // Later refits move the basis far less than early ones.
    CHECK(trace.change.back() < 0.5 * trace.change.front() + 1e-12);
}

TEST_CASE("two-variable KMO is exactly one half at any correlation level") {
    for (int t = 1; t <= 20; ++t) {
        const double rho = -0.95 + 1.9 * (t - 1) / 19.0;
        Rng rng(100 + t);
        Eigen::MatrixXd d(200, 2);
        for (int i = 0; i < 200; ++i) {
            const double x = rng.gaussian();
            d(i, 0) = x;
            d(i, 1) = rho * x + std::sqrt(1.0 - rho * rho) * rng.gaussian() + 0.01;
        }
        KMOResult r = kmo(d);
        CHECK(r.overall == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(r.per_variable[0] == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(r.per_variable[1] == doctest::Approx(0.5).epsilon(1e-10));
    }
}

TEST_CASE("kmo matches a Gauss-Jordan inverse oracle") {
    Eigen::MatrixXd d = make_data(50, 5, 29);
    KMOResult r = kmo(d);

    auto corr = direct_correlation(d);
    auto inv = oracle::invert(corr);
    double sum_r2 = 0.0, sum_q2 = 0.0;
    std::vector<double> r2_row(5, 0.0), q2_row(5, 0.0);
    for (int j = 0; j < 5; ++j)
        for (int k = 0; k < 5; ++k) {
            if (j == k) continue;
            const double r2 = corr[j][k] * corr[j][k];
            const double q = -inv[j][k] / std::sqrt(inv[j][j] * inv[k][k]);
            sum_r2 += r2;
            sum_q2 += q * q;
            r2_row[j] += r2;
            q2_row[j] += q * q;
        }
    CHECK(r.overall == doctest::Approx(sum_r2 / (sum_r2 + sum_q2)).epsilon(1e-10));
    for (int j = 0; j < 5; ++j)
        CHECK(r.per_variable[j] ==
              doctest::Approx(r2_row[j] / (r2_row[j] + q2_row[j])).epsilon(1e-10));
}

TEST_CASE("kmo rejects a numerically singular correlation matrix") {
    Eigen::MatrixXd d = make_data(40, 2, 31);
    Eigen::MatrixXd collinear(40, 3);
    collinear.leftCols(2) = d;
    collinear.col(2) = 2.0 * d.col(0) - d.col(1); // exact linear combination
    CHECK_THROWS_AS(kmo(collinear), SingularMatrixError);
}

TEST_CASE("silhouette matches hand-computed values") {
    Eigen::MatrixXd pts(4, 2);
    pts << 0.0, 0.0, 0.1, 0.0, 10.0, 0.0, 10.1, 0.0;
    std::vector<int> labels = {0, 0, 1, 1};
    // Each point: a = 0.1, b = mean distance to the far pair.
    const double s0 = (10.05 - 0.1) / 10.05;
    const double s1 = (9.95 - 0.1) / 9.95;
    const double expect = (s0 + s1 + s1 + s0) / 4.0;
    CHECK(silhouette(pts, labels) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("silhouette gives singleton clusters a zero contribution") {
    Eigen::MatrixXd pts(3, 1);
    pts << 0.0, 0.1, 10.0;
    std::vector<int> labels = {0, 0, 1};
    const double s0 = (10.0 - 0.1) / 10.0;
    const double s1 = (9.9 - 0.1) / 9.9;
    CHECK(silhouette(pts, labels) == doctest::Approx((s0 + s1) / 3.0).epsilon(1e-12));
}

TEST_CASE("silhouette validates its inputs") {
    Eigen::MatrixXd pts(3, 2);
    pts.setRandom();
    CHECK_THROWS_AS(silhouette(pts, {0, 0}), InvalidInputError);
    CHECK_THROWS_AS(silhouette(pts, {1, 1, 1}), InvalidInputError);
}

TEST_CASE("silhouette separates tight clusters better than scrambled labels") {
    Rng rng(37);
    Eigen::MatrixXd pts(60, 2);
    std::vector<int> labels(60);
    for (int i = 0; i < 60; ++i) {
        const int c = i % 3;
        labels[i] = c;
        pts(i, 0) = 8.0 * c + 0.3 * rng.gaussian();
        pts(i, 1) = 0.3 * rng.gaussian();
    }
    std::vector<int> scrambled(60);
    for (int i = 0; i < 60; ++i) scrambled[i] = static_cast<int>(rng.below(3));
    const double good = silhouette(pts, labels);
    const double bad = silhouette(pts, scrambled);
    CHECK(good > 0.8);
    CHECK(good > bad + 0.5);
}
