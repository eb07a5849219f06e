#include "qpi/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

namespace qpi::pca {
namespace {

Eigen::MatrixXd correlation_from_standardized(const Eigen::MatrixXd& z) {
    return (z.transpose() * z) / static_cast<double>(z.rows());
}

// Descending eigen decomposition with the deterministic sign convention.
void eigen_sorted(const Eigen::MatrixXd& sym, Eigen::MatrixXd& vectors,
                  Eigen::VectorXd& values) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw SingularMatrixError("eigendecomposition failed to converge");
    const int p = static_cast<int>(sym.rows());
    vectors.resize(p, p);
    values.resize(p);
    // Eigen returns ascending order.
    for (int j = 0; j < p; ++j) {
        values(j) = solver.eigenvalues()(p - 1 - j);
        vectors.col(j) = solver.eigenvectors().col(p - 1 - j);
    }
    for (int j = 0; j < p; ++j) {
        int arg = 0;
        double best = -1.0;
        for (int i = 0; i < p; ++i) {
            const double a = std::fabs(vectors(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (vectors(arg, j) < 0.0) vectors.col(j) = -vectors.col(j);
    }
}

} // namespace

Standardized standardize(const Eigen::MatrixXd& data,
                         const std::vector<std::string>& column_names) {
    const int n = static_cast<int>(data.rows()), p = static_cast<int>(data.cols());
    if (n < 2) throw InsufficientDataError("standardize: need at least 2 rows");
    if (p < 1) throw InvalidInputError("standardize: no columns");

    Standardized s;
    s.mean = data.colwise().mean();
    s.std_dev.resize(p);
    for (int j = 0; j < p; ++j) {
        const double var = (data.col(j).array() - s.mean(j)).square().sum() / n;
        s.std_dev(j) = std::sqrt(var);
        if (!(s.std_dev(j) > 0.0)) {
            const std::string name = j < static_cast<int>(column_names.size())
                                         ? column_names[j]
                                         : "column " + std::to_string(j);
            throw DegenerateInputError("standardize: zero variance in " + name);
        }
    }
    s.data = (data.rowwise() - s.mean.transpose()).array().rowwise() /
             s.std_dev.transpose().array();
    return s;
}

PCAModel pca(const Eigen::MatrixXd& data, const std::vector<std::string>& column_names) {
    Standardized s = standardize(data, column_names);
    const Eigen::MatrixXd corr = correlation_from_standardized(s.data);

    PCAModel model;
    eigen_sorted(corr, model.eigenvectors, model.eigenvalues);
    for (int j = 0; j < model.eigenvalues.size(); ++j)
        model.eigenvalues(j) = std::max(0.0, model.eigenvalues(j));
    model.mean = std::move(s.mean);
    model.std_dev = std::move(s.std_dev);
    return model;
}

Eigen::MatrixXd project(const PCAModel& model, const Eigen::MatrixXd& data, int k) {
    const int p = static_cast<int>(model.eigenvectors.rows());
    if (data.cols() != p) throw InvalidInputError("project: column count mismatch");
    if (k < 1 || k > p) throw InvalidInputError("project: invalid component count");
    Eigen::MatrixXd z = (data.rowwise() - model.mean.transpose()).array().rowwise() /
                        model.std_dev.transpose().array();
    return z * model.eigenvectors.leftCols(k);
}

Eigen::VectorXd explained_variance(const PCAModel& model) {
    const double total = model.eigenvalues.sum();
    if (total <= 0.0) throw DegenerateInputError("explained_variance: zero total variance");
    return model.eigenvalues / total;
}

double eigenvector_change(const Eigen::MatrixXd& reference, Eigen::MatrixXd candidate) {
    if (reference.rows() != candidate.rows() || reference.cols() != candidate.cols())
        throw InvalidInputError("eigenvector_change: shape mismatch");
    for (int j = 0; j < candidate.cols(); ++j)
        if (candidate.col(j).dot(reference.col(j)) < 0.0) candidate.col(j) = -candidate.col(j);
    const double denom = candidate.norm();
    if (denom <= 0.0) throw DegenerateInputError("eigenvector_change: zero basis");
    return (candidate - reference).norm() / denom;
}

StabilityTrace stability_curve(const Eigen::MatrixXd& data, int start_rows, int step) {
    const int n = static_cast<int>(data.rows());
    const int p = static_cast<int>(data.cols());
    if (step < 1) throw InvalidInputError("stability_curve: step must be positive");
    if (start_rows < p + 1)
        throw InvalidInputError("stability_curve: start_rows must exceed column count");
    if (start_rows >= n)
        throw InsufficientDataError("stability_curve: not enough rows");

    StabilityTrace trace;
    Eigen::MatrixXd prev;
    for (int m = start_rows; m <= n; m += step) {
        // Each prefix is re-standardized on its own rows.
        PCAModel model = pca(data.topRows(m));
        if (prev.size()) {
            trace.row_counts.push_back(m);
            trace.change.push_back(eigenvector_change(prev, model.eigenvectors));
            prev = model.eigenvectors;
        } else {
            prev = model.eigenvectors;
        }
        if (m != n && m + step > n) {
            // Always include the full dataset as the last point.
            m = n - step;
        }
    }
    return trace;
}

KMOResult kmo(const Eigen::MatrixXd& data) {
    Standardized s = standardize(data);
    const Eigen::MatrixXd corr = correlation_from_standardized(s.data);
    const int p = static_cast<int>(corr.rows());
    if (p < 2) throw InvalidInputError("kmo: need at least 2 columns");

    Eigen::MatrixXd vectors;
    Eigen::VectorXd values;
    eigen_sorted(corr, vectors, values);
    const double lmax = values(0), lmin = values(p - 1);
    if (lmin <= 0.0 || lmax / lmin >= 1e12)
        throw SingularMatrixError("kmo: correlation matrix is numerically singular");
    const Eigen::MatrixXd inv =
        vectors * values.cwiseInverse().asDiagonal() * vectors.transpose();

    KMOResult result;
    result.per_variable.assign(p, 0.0);
    double sum_r2 = 0.0, sum_q2 = 0.0;
    std::vector<double> r2_row(p, 0.0), q2_row(p, 0.0);
    for (int j = 0; j < p; ++j) {
        for (int k = 0; k < p; ++k) {
            if (j == k) continue;
            const double r2 = corr(j, k) * corr(j, k);
            const double q = -inv(j, k) / std::sqrt(inv(j, j) * inv(k, k));
            const double q2 = q * q;
            r2_row[j] += r2;
            q2_row[j] += q2;
            sum_r2 += r2;
            sum_q2 += q2;
        }
    }
    if (sum_r2 + sum_q2 <= 0.0)
        throw DegenerateInputError("kmo: no off-diagonal correlation structure");
    result.overall = sum_r2 / (sum_r2 + sum_q2);
    for (int j = 0; j < p; ++j) {
        const double d = r2_row[j] + q2_row[j];
        result.per_variable[j] = d > 0.0 ? r2_row[j] / d : 0.0;
    }
    return result;
}

double silhouette(const Eigen::MatrixXd& points, const std::vector<int>& labels) {
    const int n = static_cast<int>(points.rows());
    if (static_cast<int>(labels.size()) != n)
        throw InvalidInputError("silhouette: label count mismatch");
    std::map<int, int> cluster_sizes;
    for (int l : labels) ++cluster_sizes[l];
    if (cluster_sizes.size() < 2)
        throw InvalidInputError("silhouette: need at least 2 clusters");

    double total = 0.0;
    std::map<int, double> dist_sum;
    for (int i = 0; i < n; ++i) {
        for (auto& [l, s] : dist_sum) s = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            dist_sum[labels[j]] += (points.row(i) - points.row(j)).norm();
        }
        const int own = labels[i];
        const int own_size = cluster_sizes[own];
        if (own_size <= 1) continue; // singleton: contributes 0
        const double a = dist_sum[own] / (own_size - 1);
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [l, s] : dist_sum) {
            if (l == own) continue;
            b = std::min(b, s / cluster_sizes[l]);
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / n;
}

} // namespace qpi::pca
