#pragma once

// Relative reduction errors: instantaneous e(t) and the uniform-in-time E.

#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace mmsrom {

struct InstantError {
    std::vector<double> value;     ///< |u - u_r| / |u| per sample (NaN where skipped)
    std::vector<Index> skipped;    ///< samples with |u| = 0
};

inline void check_same_shape(const Matrix& u, const Matrix& ur) {
    if (u.rows() != ur.rows() || u.cols() != ur.cols()) throw ContractError("error metric: trajectories differ in shape");
    if (u.cols() == 0) throw ContractError("error metric: empty time grid");
}

inline InstantError error_instant(const Matrix& u, const Matrix& ur) {
    check_same_shape(u, ur);
    InstantError e;
    e.value.resize(static_cast<size_t>(u.cols()));
    for (Index i = 0; i < u.cols(); ++i) {
        const double n = u.col(i).norm();
        if (n == 0.0) {
            e.value[static_cast<size_t>(i)] = std::numeric_limits<double>::quiet_NaN();
            e.skipped.push_back(i);
        } else {
            e.value[static_cast<size_t>(i)] = (u.col(i) - ur.col(i)).norm() / n;
        }
    }
    return e;
}

/// sum_t |u - u_r| / sum_t |u|.
inline double error_uniform(const Matrix& u, const Matrix& ur) {
    check_same_shape(u, ur);
    double num = 0.0, den = 0.0;
    for (Index i = 0; i < u.cols(); ++i) {
        num += (u.col(i) - ur.col(i)).norm();
        den += u.col(i).norm();
    }
    if (den == 0.0) throw ContractError("error_uniform: reference trajectory is identically zero");
    return num / den;
}

/// Uniform error restricted to one degree of freedom (a single probe component).
inline double error_uniform_row(const Matrix& u, const Matrix& ur, Index row) {
    check_same_shape(u, ur);
    return error_uniform(u.row(row), ur.row(row));
}

}  // namespace mmsrom
