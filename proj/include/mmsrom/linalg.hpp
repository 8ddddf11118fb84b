#pragma once

/**
 * @file linalg.hpp
 * @brief Dense linear-algebra vocabulary and small subspace utilities.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"

namespace mmsrom {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// max |A - A^T| relative to max |A| (0 for the zero matrix).
inline double symmetry_deviation(const Matrix& a) {
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

/// Frobenius norm of V^T V - I.
inline double orthonormality_defect(const Matrix& v) {
    return (v.transpose() * v - Matrix::Identity(v.cols(), v.cols())).norm();
}

/// Frobenius distance between the orthogonal projectors onto span(A) and span(B).
/// Both inputs must have orthonormal columns.
inline double projector_distance(const Matrix& a, const Matrix& b) {
    return (a * a.transpose() - b * b.transpose()).norm();
}

/// Principal angles [rad] between span(A) and span(B), both orthonormal, ascending.
inline Vector principal_angles(const Matrix& a, const Matrix& b) {
    Eigen::JacobiSVD<Matrix> svd(a.transpose() * b);
    Vector s = svd.singularValues();
    Vector ang(s.size());
    for (Index i = 0; i < s.size(); ++i) ang(i) = std::acos(std::clamp(s(i), -1.0, 1.0));
    std::sort(ang.data(), ang.data() + ang.size());
    return ang;
}

/// Largest principal angle between two subspaces given by arbitrary full-rank bases.
inline double subspace_angle(const Matrix& a, const Matrix& b) {
    Matrix qa = Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(a.rows(), a.cols());
    Matrix qb = Eigen::HouseholderQR<Matrix>(b).householderQ() * Matrix::Identity(b.rows(), b.cols());
    return principal_angles(qa, qb).maxCoeff();
}

/**
 * @brief Symmetric (Löwdin) orthonormalisation A (A^T A)^{-1/2} = U W^T via the thin SVD.
 *
 * Columns are first scaled to unit norm so the rank test is insensitive to
 * column scaling. The result spans the same subspace as A and stays as close
 * as possible (Frobenius) to the scaled columns, so column identity survives.
 * Throws ContractError when the columns are numerically dependent; the message
 * names the columns that dominate the null direction.
 */
inline Matrix orthonormalize_columns(const Matrix& a, double rank_tol = 1e-10) {
    Matrix scaled = a;
    for (Index j = 0; j < scaled.cols(); ++j) {
        const double nrm = scaled.col(j).norm();
        if (nrm == 0.0) throw ContractError("orthonormalize_columns: column " + std::to_string(j) + " is zero");
        scaled.col(j) /= nrm;
    }
    Eigen::JacobiSVD<Matrix> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    if (s(s.size() - 1) <= rank_tol * s(0)) {
        // null direction: last right singular vector
        Vector nullv = svd.matrixV().col(s.size() - 1).cwiseAbs();
        std::string cols;
        for (Index j = 0; j < nullv.size(); ++j)
            if (nullv(j) > 0.1) cols += (cols.empty() ? "" : ",") + std::to_string(j);
        throw ContractError("rank-deficient basis: dependent columns {" + cols + "}");
    }
    return svd.matrixU() * svd.matrixV().transpose();
}

/// Descending singular values of a matrix.
inline Vector singular_values(const Matrix& a) {
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues();
}

}  // namespace mmsrom
