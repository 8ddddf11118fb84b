#pragma once

/**
 * @file newmark.hpp
 * @brief Implicit Newmark integration with Newton iterations, generic over the
 *        system type so full and reduced models share one integrator.
 *
 * A system S must provide
 *   Index size() const;
 *   void begin_step(double t_n, double t_np1);   // freeze step-dependent data
 *   const Matrix& mass() const;
 *   const Matrix& damping() const;
 *   void evaluate(const Vector& u, double t, Vector& f, Matrix* k);
 *   Vector load(double t) const;
 * and the integrator solves M a + C v + f(u, t) = load(t).
 */

#include <cmath>
#include <concepts>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace mmsrom {

template <class S>
concept NewmarkSystem = requires(S s, const S cs, const Vector& u, double t, Vector& f, Matrix* k) {
    { cs.size() } -> std::convertible_to<Index>;
    s.begin_step(t, t);
    { cs.mass() } -> std::convertible_to<const Matrix&>;
    { cs.damping() } -> std::convertible_to<const Matrix&>;
    s.evaluate(u, t, f, k);
    { cs.load(t) } -> std::convertible_to<Vector>;
};

struct NewmarkSettings {
    double beta = 0.25;
    double gamma = 0.5;
    double dt = 0.0;
    double newton_tol = 1e-8;
    int max_newton = 25;
    Index record_stride = 1;
    double growth_limit = 1e6;

    void validate() const {
        if (!(dt > 0)) throw ContractError("Newmark: dt must be positive");
        if (!(gamma >= 0.5 && 2 * beta >= gamma))
            throw ContractError("Newmark: need 2 beta >= gamma >= 1/2 for unconditional stability");
        if (max_newton < 1 || record_stride < 1) throw ContractError("Newmark: invalid iteration/stride settings");
    }
};

struct Trajectory {
    std::vector<double> times;
    Matrix u, v, a;  ///< one column per recorded sample
    int total_newton_iterations = 0;
    int max_newton_iterations = 0;
    double max_step_residual = 0.0;  ///< largest relative residual at acceptance

    Index samples() const { return static_cast<Index>(times.size()); }
    Index dimension() const { return u.rows(); }
};

namespace detail {

inline void record(Trajectory& tr, Index col, double t, const Vector& u, const Vector& v, const Vector& a) {
    tr.times[static_cast<size_t>(col)] = t;
    tr.u.col(col) = u;
    tr.v.col(col) = v;
    tr.a.col(col) = a;
}

}  // namespace detail

/// Integrates from (u0, v0) at t = 0 over `steps` steps of size s.dt.
template <NewmarkSystem S>
Trajectory newmark_integrate(S& sys, const Vector& u0, const Vector& v0, const NewmarkSettings& s, Index steps) {
    s.validate();
    const Index n = sys.size();
    if (u0.size() != n || v0.size() != n) throw ContractError("Newmark: initial state has wrong dimension");
    if (steps < 0) throw ContractError("Newmark: negative step count");

    const double dt = s.dt;
    const double c0 = 1.0 / (s.beta * dt * dt);
    const double c1 = s.gamma / (s.beta * dt);

    Vector u = u0, v = v0, a(n), f(n);
    Matrix k(n, n);

    // consistent initial acceleration
    sys.begin_step(0.0, 0.0);
    sys.evaluate(u, 0.0, f, nullptr);
    {
        Eigen::LDLT<Matrix> ml(sys.mass());
        if (ml.info() != Eigen::Success) throw SolverError("Newmark: mass matrix factorisation failed");
        a = ml.solve(sys.load(0.0) - sys.damping() * v - f);
    }

    const Index n_rec = steps / s.record_stride + 1;
    Trajectory tr;
    tr.times.resize(static_cast<size_t>(n_rec));
    tr.u.resize(n, n_rec);
    tr.v.resize(n, n_rec);
    tr.a.resize(n, n_rec);
    detail::record(tr, 0, 0.0, u, v, a);

    double growth_ref = u0.norm();
    Eigen::LDLT<Matrix> ldlt;
    for (Index step = 1; step <= steps; ++step) {
        const double t_n = (step - 1) * dt;
        const double t1 = step * dt;
        sys.begin_step(t_n, t1);
        const Matrix& m = sys.mass();
        const Matrix& c = sys.damping();
        const Vector p = sys.load(t1);

        const Vector u_n = u, v_n = v, a_n = a;
        auto kinematics = [&](const Vector& un1, Vector& an1, Vector& vn1) {
            an1 = c0 * (un1 - u_n - dt * v_n) - (0.5 / s.beta - 1.0) * a_n;
            vn1 = v_n + dt * ((1.0 - s.gamma) * a_n + s.gamma * an1);
        };

        // predictor: constant displacement
        kinematics(u, a, v);
        sys.evaluate(u, t1, f, &k);
        Vector r = m * a + c * v + f - p;
        double ref = std::max({p.norm(), f.norm(), (m * a).norm(), 1e-300});
        std::vector<double> history{r.norm() / ref};
        int it = 0;
        while (history.back() > s.newton_tol) {
            if (it >= s.max_newton)
                throw SolverError("Newmark: Newton did not converge at t=" + std::to_string(t1) + " (relative residual " +
                                      std::to_string(history.back()) + ")",
                                  history);
            ldlt.compute(c0 * m + c1 * c + k);
            if (ldlt.info() != Eigen::Success) throw SolverError("Newmark: effective stiffness factorisation failed", history);
            const Vector du = ldlt.solve(r);
            u -= du;
            kinematics(u, a, v);
            sys.evaluate(u, t1, f, &k);
            r = m * a + c * v + f - p;
            ref = std::max({p.norm(), f.norm(), (m * a).norm(), 1e-300});
            history.push_back(r.norm() / ref);
            ++it;
            if (!std::isfinite(history.back())) throw SolverError("Newmark: non-finite residual", history);
            // converged to round-off when the correction no longer changes u
            if (du.norm() <= 1e-14 * std::max(u.norm(), 1e-300)) break;
        }
        tr.total_newton_iterations += it;
        tr.max_newton_iterations = std::max(tr.max_newton_iterations, it);
        tr.max_step_residual = std::max(tr.max_step_residual, history.back());

        const double un = u.norm();
        if (!std::isfinite(un)) throw SolverError("Newmark: non-finite state at t=" + std::to_string(t1));
        if (growth_ref == 0.0) growth_ref = un;
        if (growth_ref > 0.0 && un > s.growth_limit * growth_ref)
            throw SolverError("Newmark: run aborted, displacement grew by more than " + std::to_string(s.growth_limit) +
                              "x (unstable) at t=" + std::to_string(t1));

        if (step % s.record_stride == 0) detail::record(tr, step / s.record_stride, t1, u, v, a);
    }
    return tr;
}

}  // namespace mmsrom
