#pragma once

/**
 * @file spectral.hpp
 * @brief Temperature-dependent equilibria, vibration modes and static modal
 *        derivatives, assembled into a LocalBasis for one configuration.
 */

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "log.hpp"
#include "model.hpp"

namespace mmsrom {

enum class BasisKind { vm_only, vm_md };

inline std::string to_string(BasisKind k) { return k == BasisKind::vm_only ? "vm-only" : "vm+md"; }
inline BasisKind basis_kind_from_string(const std::string& s) {
    if (s == "vm-only") return BasisKind::vm_only;
    if (s == "vm+md") return BasisKind::vm_md;
    throw ContractError("unknown basis kind '" + s + "'");
}

/// Orthonormal reduction basis with its equilibrium and frequencies at one configuration.
struct LocalBasis {
    double param = 0.0;  ///< temperature configuration (pulse centre x_c)
    Vector u_eq;
    Vector frequencies;  ///< omega_i [rad/s], ascending
    Matrix basis;        ///< n x m, V^T V = I
    BasisKind kind = BasisKind::vm_only;
};

// ---------------------------------------------------------------------------
// Equilibrium
// ---------------------------------------------------------------------------

struct EquilibriumResult {
    Vector u;
    int iterations = 0;
    std::vector<double> residual_history;
    bool stable = true;  ///< tangent positive definite at the solution
};

struct NewtonOptions {
    double rel_tol = 1e-9;
    int max_iterations = 50;
};

/// Newton iteration on f(u, theta) = 0 with the analytic tangent.
/// Converged when ||f||_2 <= rel_tol (1 + ||f(u_guess)||_2).
inline EquilibriumResult solve_equilibrium(const SecondOrderModel& model, TemperatureParam theta,
                                           const Vector& u_guess, const NewtonOptions& opt = {}) {
    if (u_guess.size() != model.dof_count()) throw ContractError("solve_equilibrium: guess has wrong size");
    EquilibriumResult res;
    res.u = u_guess;
    Vector f;
    Matrix k;
    model.force_and_tangent(res.u, theta, f, k);
    const double tol = opt.rel_tol * (1.0 + f.norm());
    res.residual_history.push_back(f.norm());
    Eigen::LDLT<Matrix> ldlt;
    while (res.residual_history.back() > tol) {
        if (res.iterations >= opt.max_iterations)
            throw SolverError("equilibrium Newton did not converge in " + std::to_string(opt.max_iterations) +
                                  " iterations (|f| = " + std::to_string(res.residual_history.back()) + ")",
                              res.residual_history);
        ldlt.compute(k);
        if (ldlt.info() != Eigen::Success) throw SolverError("equilibrium: tangent factorisation failed", res.residual_history);
        res.u -= ldlt.solve(f);
        ++res.iterations;
        model.force_and_tangent(res.u, theta, f, k);
        res.residual_history.push_back(f.norm());
        if (!std::isfinite(res.residual_history.back()))
            throw SolverError("equilibrium Newton diverged", res.residual_history);
    }
    ldlt.compute(k);
    res.stable = ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0).all();
    if (!res.stable) log::warn("equilibrium at theta=" + std::to_string(theta) + " has an indefinite tangent (unstable)");
    return res;
}

// ---------------------------------------------------------------------------
// Vibration modes
// ---------------------------------------------------------------------------

struct Modes {
    Vector omega;  ///< ascending [rad/s]
    Matrix phi;    ///< mass-normalised columns
};

enum class EigenMethod { shift_invert, dense };

namespace detail {

inline void normalize_modes(const Matrix& m, Modes& modes) {
    for (Index j = 0; j < modes.phi.cols(); ++j) {
        auto col = modes.phi.col(j);
        col /= std::sqrt(col.dot(m * col));
        Index imax;
        col.cwiseAbs().maxCoeff(&imax);
        if (col(imax) < 0) col = -col;
    }
}

inline Modes modes_from_eigenvalues(const Vector& lambda, Matrix phi, Index k) {
    if (lambda(0) <= 0.0)
        throw SolverError("tangent stiffness not positive definite (lambda_1 = " + std::to_string(lambda(0)) +
                          "): unstable configuration");
    Modes out;
    out.omega = lambda.head(k).cwiseSqrt();
    out.phi = phi.leftCols(k);
    return out;
}

}  // namespace detail

/// All eigenpairs via the dense generalized solver; lowest k returned.
inline Modes lowest_modes_dense(const Matrix& k_t, const Matrix& m, Index k) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(k_t, m);
    if (es.info() != Eigen::Success) throw SolverError("dense generalized eigensolver failed");
    Modes out = detail::modes_from_eigenvalues(es.eigenvalues(), es.eigenvectors(), k);
    detail::normalize_modes(m, out);
    return out;
}

/**
 * Lowest k eigenpairs of K phi = lambda M phi by block subspace iteration on
 * K^{-1} M (shift-invert about zero). The block is re-orthonormalised and a
 * Rayleigh-Ritz projection is done every sweep.
 */
inline Modes lowest_modes_shift_invert(const Matrix& k_t, const Matrix& m, Index k, int max_sweeps = 300,
                                       double tol = 1e-12) {
    const Index n = k_t.rows();
    const Index p = std::min(n, std::max<Index>(2 * k, k + 8));
    Eigen::LLT<Matrix> llt(k_t);
    if (llt.info() != Eigen::Success) throw SolverError("tangent stiffness not positive definite: unstable configuration");

    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    Matrix x(n, p);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < n; ++i) x(i, j) = nd(rng);

    Vector lambda_prev = Vector::Constant(p, std::numeric_limits<double>::infinity());
    Vector lambda;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        Matrix y = llt.solve(m * x);
        Matrix q = Eigen::HouseholderQR<Matrix>(y).householderQ() * Matrix::Identity(n, p);
        Matrix kr = q.transpose() * k_t * q;
        Matrix mr = q.transpose() * m * q;
        Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(0.5 * (kr + kr.transpose()), 0.5 * (mr + mr.transpose()));
        lambda = es.eigenvalues();
        x = q * es.eigenvectors();
        const double change = ((lambda.head(k) - lambda_prev.head(k)).array().abs() / lambda.head(k).array().abs()).maxCoeff();
        lambda_prev = lambda;
        if (change <= tol && sweep > 1) {
            Modes out = detail::modes_from_eigenvalues(lambda, x, k);
            detail::normalize_modes(m, out);
            return out;
        }
    }
    throw SolverError("shift-invert subspace iteration did not converge");
}

/// Eigenpair residuals ||(K - w^2 M) phi|| / (||K|| ||phi||).
inline Vector eigen_residuals(const Matrix& k_t, const Matrix& m, const Modes& modes) {
    Vector r(modes.omega.size());
    const double knorm = k_t.norm();
    for (Index i = 0; i < r.size(); ++i) {
        const auto phi = modes.phi.col(i);
        r(i) = (k_t * phi - modes.omega(i) * modes.omega(i) * (m * phi)).norm() / (knorm * phi.norm());
    }
    return r;
}

/// Lowest k solutions of [K_t(u_eq, theta) - w^2 M] phi = 0, mass-normalised,
/// largest-magnitude entry positive.
inline Modes vibration_modes(const SecondOrderModel& model, const Vector& u_eq, TemperatureParam theta, Index k,
                             EigenMethod method = EigenMethod::shift_invert) {
    if (k < 1 || k > model.dof_count()) throw ContractError("vibration_modes: invalid mode count");
    const Matrix kt = model.tangent_stiffness(u_eq, theta);
    const Matrix kts = 0.5 * (kt + kt.transpose());
    if (method == EigenMethod::dense) return lowest_modes_dense(kts, model.mass(), k);
    try {
        return lowest_modes_shift_invert(kts, model.mass(), k);
    } catch (const SolverError& e) {
        if (std::string(e.what()).find("unstable") != std::string::npos) throw;
        log::warn(std::string("shift-invert failed, using dense eigensolver: ") + e.what());
        return lowest_modes_dense(kts, model.mass(), k);
    }
}

// ---------------------------------------------------------------------------
// Modal derivatives
// ---------------------------------------------------------------------------

namespace detail {

/// -(dK_t/du . phi_j) phi_i by central differences of the assembled tangent.
inline Vector md_rhs(const SecondOrderModel& model, const Vector& u_eq, TemperatureParam theta, const Vector& phi_i,
                     const Vector& phi_j) {
    const double h = 1e-5 * model.length_scale() / std::max(phi_j.cwiseAbs().maxCoeff(), 1.0);
    const Matrix dk = (model.tangent_stiffness(u_eq + h * phi_j, theta) - model.tangent_stiffness(u_eq - h * phi_j, theta)) / (2 * h);
    return -(dk * phi_i);
}

inline Eigen::LDLT<Matrix> factor_tangent(const SecondOrderModel& model, const Vector& u_eq, TemperatureParam theta) {
    Eigen::LDLT<Matrix> ldlt(model.tangent_stiffness(u_eq, theta));
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14)
        throw SolverError("modal derivative: tangent stiffness is singular");
    return ldlt;
}

}  // namespace detail

/// Static modal derivative theta_ij solving K_t theta_ij = -(dK_t/du . phi_j) phi_i.
inline Vector modal_derivative(const SecondOrderModel& model, const Vector& u_eq, TemperatureParam theta,
                               const Vector& phi_i, const Vector& phi_j) {
    const auto ldlt = detail::factor_tangent(model, u_eq, theta);
    return ldlt.solve(detail::md_rhs(model, u_eq, theta, phi_i, phi_j));
}

// ---------------------------------------------------------------------------
// Local basis
// ---------------------------------------------------------------------------

struct LocalBasisOptions {
    Index modes = 5;
    bool with_md = false;
    EigenMethod eigen = EigenMethod::shift_invert;
    NewtonOptions newton{};
};

/// Equilibrium at theta, lowest VMs and (optionally) all k(k+1)/2 modal
/// derivatives, orthonormalised into one basis.
inline LocalBasis build_local_basis(const SecondOrderModel& model, TemperatureParam theta,
                                    const LocalBasisOptions& opt = {}, std::optional<Vector> u_guess = std::nullopt) {
    if (opt.modes < 1) throw ContractError("build_local_basis: need at least one mode");
    const Vector guess = u_guess ? *u_guess : Vector(Vector::Zero(model.dof_count()));
    const auto eq = solve_equilibrium(model, theta, guess, opt.newton);
    const Modes modes = vibration_modes(model, eq.u, theta, opt.modes, opt.eigen);

    const Index k = opt.modes;
    const Index m = opt.with_md ? k + k * (k + 1) / 2 : k;
    Matrix raw(model.dof_count(), m);
    raw.leftCols(k) = modes.phi;
    if (opt.with_md) {
        const auto ldlt = detail::factor_tangent(model, eq.u, theta);
        Index col = k;
        for (Index i = 0; i < k; ++i)
            for (Index j = i; j < k; ++j)
                raw.col(col++) = ldlt.solve(detail::md_rhs(model, eq.u, theta, modes.phi.col(i), modes.phi.col(j)));
    }
    LocalBasis lb;
    lb.param = theta;
    lb.u_eq = eq.u;
    lb.frequencies = modes.omega;
    lb.kind = opt.with_md ? BasisKind::vm_md : BasisKind::vm_only;
    try {
        lb.basis = orthonormalize_columns(raw);
    } catch (const ContractError& e) {
        throw ContractError("build_local_basis at theta=" + std::to_string(theta) + ": " + e.what());
    }
    return lb;
}

}  // namespace mmsrom
