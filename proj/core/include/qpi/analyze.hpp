#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qpi/errors.hpp"

namespace qpi::pca {

// Column-standardized data (population standard deviation) plus the applied
// transform, so new rows can be projected consistently.
struct Standardized {
    Eigen::MatrixXd data;
    Eigen::VectorXd mean;
    Eigen::VectorXd std_dev;
};

// PCA of the correlation matrix D^T D / n of standardized data. Eigenvectors
// are columns in descending eigenvalue order, each signed so its
// largest-magnitude entry is positive (first such index on ties).
struct PCAModel {
    Eigen::MatrixXd eigenvectors;
    Eigen::VectorXd eigenvalues; // clamped at zero
    Eigen::VectorXd mean;
    Eigen::VectorXd std_dev;
};

struct StabilityTrace {
    std::vector<int> row_counts;
    std::vector<double> change; // ||U(n) - U(prev)||_F / ||U(n)||_F, sign/order aligned
};

struct KMOResult {
    double overall = 0.0;
    std::vector<double> per_variable;
};

// Standardizes columns to mean 0, population std 1. Throws
// DegenerateInputError naming the first zero-variance column, and
// InsufficientDataError for fewer than 2 rows.
Standardized standardize(const Eigen::MatrixXd& data,
                         const std::vector<std::string>& column_names = {});

PCAModel pca(const Eigen::MatrixXd& data, const std::vector<std::string>& column_names = {});

// Scores of (raw) rows on the first k components.
Eigen::MatrixXd project(const PCAModel& model, const Eigen::MatrixXd& data, int k);

// Fraction of total variance captured by each component.
Eigen::VectorXd explained_variance(const PCAModel& model);

// Aligns columns of candidate to reference by sign (flip when the inner
// product is negative; order is already fixed by eigenvalue rank) and
// returns ||candidate - reference||_F / ||candidate||_F.
double eigenvector_change(const Eigen::MatrixXd& reference, Eigen::MatrixXd candidate);

// Recomputes the PCA basis on each prefix of the rows, from start_rows to
// the full set, recording the aligned relative change between consecutive
// prefixes. Rows should be pre-shuffled by the caller; the trace is
// deterministic in the row order.
StabilityTrace stability_curve(const Eigen::MatrixXd& data, int start_rows, int step = 1);

// Kaiser-Meyer-Olkin sampling adequacy from the inverse correlation matrix:
// partial correlations q_jk = -inv_jk / sqrt(inv_jj inv_kk),
// KMO = sum r^2 / (sum r^2 + sum q^2) over off-diagonal pairs, overall and
// per variable. Throws SingularMatrixError when the correlation matrix is
// numerically singular (condition >= 1e12 or a nonpositive eigenvalue).
KMOResult kmo(const Eigen::MatrixXd& data);

// Mean silhouette over all points (Euclidean metric); singleton-cluster
// points contribute 0. Requires at least 2 distinct labels.
double silhouette(const Eigen::MatrixXd& points, const std::vector<int>& labels);

} // namespace qpi::pca
