#pragma once

// Two-mass chain with temperature-dependent springs k1 (ground-m1), k2 (m1-m2),
// k3 (m2-ground) and stiffness-proportional dampers c_i = beta * k_i(T).

#include <cmath>
#include <numbers>

#include "model.hpp"

namespace mmsrom {

enum class SpringLaw {
    printed,      ///< k2 = b cos(aT): trace of K varies with T, K indefinite near aT ~ 1.6..2.1
    isospectral,  ///< k2 = b sin(aT): eigenvalues of K stay at a and a + 2b
};

struct TwoDofParams {
    double m = 1.0;      // kg
    double a = 1.0;      // N/m
    double b = 20.0;     // N/m
    double alpha = 2.0;  // 1/K
    double beta = 0.1;   // s
    SpringLaw law = SpringLaw::printed;
};

struct SpringConstants {
    double k1, k2, k3;
};

inline SpringConstants twodof_springs(double temp, const TwoDofParams& p = {}) {
    if (!(temp >= -std::numbers::pi / 2 && temp <= std::numbers::pi / 2))
        throw DomainError("two-DOF temperature outside [-pi/2, pi/2]");
    const double c = std::cos(p.alpha * temp);
    const double s = std::sin(p.alpha * temp);
    const double k2 = p.law == SpringLaw::printed ? p.b * c : p.b * s;
    return {p.a + p.b * (1 + c - s), k2, p.a + p.b * (1 - c - s)};
}

/// K(T) = [[k1+k2, -k2], [-k2, k2+k3]].
inline Matrix twodof_stiffness(double temp, const TwoDofParams& p = {}) {
    const auto k = twodof_springs(temp, p);
    Matrix km(2, 2);
    km << k.k1 + k.k2, -k.k2, -k.k2, k.k2 + k.k3;
    return km;
}

class TwoDofModel final : public SecondOrderModel {
public:
    explicit TwoDofModel(TwoDofParams p = {}) : p_(p), mass_(p.m * Matrix::Identity(2, 2)) {}

    const TwoDofParams& params() const { return p_; }

    Index dof_count() const override { return 2; }
    const Matrix& mass() const override { return mass_; }
    Matrix damping(TemperatureParam temp) const override { return p_.beta * twodof_stiffness(temp, p_); }
    Vector internal_force(const Vector& u, TemperatureParam temp) const override {
        check(u);
        return twodof_stiffness(temp, p_) * u;
    }
    Matrix tangent_stiffness(const Vector& u, TemperatureParam temp) const override {
        check(u);
        return twodof_stiffness(temp, p_);
    }

    /// Lowest mode of K(T) (M = m I), unit Euclidean norm, sign fixed by a positive
    /// projection on the T = 0 lowest mode so the vector varies continuously in T.
    Vector first_mode(double temp) const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(twodof_stiffness(temp, p_));
        Vector phi = es.eigenvectors().col(0);
        Eigen::SelfAdjointEigenSolver<Matrix> es0(twodof_stiffness(0.0, p_));
        Vector ref = es0.eigenvectors().col(0);
        if (ref(ref.cwiseAbs().maxCoeff() == std::abs(ref(0)) ? 0 : 1) < 0) ref = -ref;
        if (phi.dot(ref) < 0) phi = -phi;
        return phi;
    }

    /// Undamped natural frequencies [rad/s], ascending.
    Vector frequencies(double temp) const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(twodof_stiffness(temp, p_) / p_.m, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    }

private:
    static void check(const Vector& u) {
        if (u.size() != 2) throw ContractError("two-DOF model expects a 2-vector");
    }
    TwoDofParams p_;
    Matrix mass_;
};

}  // namespace mmsrom
