#pragma once

/**
 * @file rom.hpp
 * @brief Full-order and reduced-order systems for the Newmark integrator:
 *        the adaptive multiple-scales ROM at O(1) and O(eps), and the
 *        constant-basis Galerkin ROM used by the stacking baselines.
 *
 * Slow time is tau = eps * rate * t. For the beam the rate is the forcing
 * frequency, so one forcing cycle advances tau by 2 pi eps.
 */

#include <cmath>
#include <functional>
#include <memory>
#include <optional>

#include "basis_db.hpp"
#include "beam.hpp"
#include "newmark.hpp"
#include "two_dof.hpp"

namespace mmsrom {

/// theta(tau) and its slow-time derivative, with tau = eps * rate * t.
struct ThermalSchedule {
    double eps = 0.0;
    double rate = 1.0;
    std::function<double(double)> theta;
    std::function<double(double)> theta_rate;

    double tau(double t) const { return eps * rate * t; }
    double at_time(double t) const { return theta(tau(t)); }
};

/// Pulse centre x_c(tau) = x0 + A sin(tau).
inline ThermalSchedule pulse_schedule(const TemperaturePulse& pulse, double eps, double rate) {
    return {eps, rate, [pulse](double tau) { return pulse_center(tau, pulse); },
            [pulse](double tau) { return pulse_center_rate(tau, pulse); }};
}

/// Temperature offset T(tau) = T_max sin(tau).
inline ThermalSchedule sine_schedule(double t_max, double eps, double rate = 1.0) {
    return {eps, rate, [t_max](double tau) { return t_max * std::sin(tau); },
            [t_max](double tau) { return t_max * std::cos(tau); }};
}

/// Constant configuration (frozen temperature).
inline ThermalSchedule frozen_schedule(double theta) {
    return {0.0, 1.0, [theta](double) { return theta; }, [](double) { return 0.0; }};
}

using LoadFunction = std::function<Vector(double)>;

inline LoadFunction zero_load(Index n) {
    return [n](double) { return Vector(Vector::Zero(n)); };
}

// ---------------------------------------------------------------------------
// Basis sources
// ---------------------------------------------------------------------------

/// Slowly varying basis V(tau) and origin u_eq(tau).
class BasisSource {
public:
    virtual ~BasisSource() = default;
    virtual BasisSample at(double tau) const = 0;
    /// d/dtau of V and u_eq.
    virtual BasisSample slope(double tau) const = 0;
};

class DatabaseBasisSource final : public BasisSource {
public:
    DatabaseBasisSource(std::shared_ptr<const BasisDatabase> db, ThermalSchedule schedule,
                        std::optional<double> delta = std::nullopt)
        : db_(std::move(db)), sched_(std::move(schedule)), delta_(delta) {
        if (!db_) throw ContractError("DatabaseBasisSource: null database");
        detail::require_interpolable(*db_);
    }
    BasisSample at(double tau) const override { return interpolate_basis(*db_, sched_.theta(tau)); }
    BasisSample slope(double tau) const override {
        auto d = slow_basis_derivative(*db_, sched_.theta(tau), delta_);
        const double r = sched_.theta_rate(tau);
        d.basis *= r;
        d.u_eq *= r;
        return d;
    }
    const BasisDatabase& database() const { return *db_; }

private:
    std::shared_ptr<const BasisDatabase> db_;
    ThermalSchedule sched_;
    std::optional<double> delta_;
};

/// Lowest mode of the two-DOF stiffness K(T(tau)), recomputed exactly; origin 0.
class TwoDofBasisSource final : public BasisSource {
public:
    TwoDofBasisSource(const TwoDofModel& model, ThermalSchedule schedule) : model_(model), sched_(std::move(schedule)) {}
    BasisSample at(double tau) const override {
        return {Matrix(model_.first_mode(sched_.theta(tau))), Vector::Zero(2)};
    }
    BasisSample slope(double tau) const override {
        const double h = 1e-6;
        const Matrix d = (Matrix(model_.first_mode(sched_.theta(tau + h))) - Matrix(model_.first_mode(sched_.theta(tau - h)))) / (2 * h);
        return {d, Vector::Zero(2)};
    }

private:
    const TwoDofModel& model_;
    ThermalSchedule sched_;
};

/// Fixed basis and origin (single-configuration sources, tests).
class ConstantBasisSource final : public BasisSource {
public:
    ConstantBasisSource(Matrix v, Vector u_eq) : s_{std::move(v), std::move(u_eq)} {}
    BasisSample at(double) const override { return s_; }
    BasisSample slope(double) const override {
        return {Matrix::Zero(s_.basis.rows(), s_.basis.cols()), Vector::Zero(s_.u_eq.size())};
    }

private:
    BasisSample s_;
};

// ---------------------------------------------------------------------------
// Systems
// ---------------------------------------------------------------------------

/// M u'' + C u' + f(u, theta(t)) = p(t).
class FullSystem {
public:
    FullSystem(const SecondOrderModel& model, ThermalSchedule schedule, LoadFunction load)
        : model_(model), sched_(std::move(schedule)), load_(std::move(load)) {}

    Index size() const { return model_.dof_count(); }
    void begin_step(double t_n, double t_np1) { damping_ = model_.damping(sched_.at_time(0.5 * (t_n + t_np1))); }
    const Matrix& mass() const { return model_.mass(); }
    const Matrix& damping() const { return damping_; }
    void evaluate(const Vector& u, double t, Vector& f, Matrix* k) {
        const double th = sched_.at_time(t);
        if (k) model_.force_and_tangent(u, th, f, *k);
        else f = model_.internal_force(u, th);
    }
    Vector load(double t) const { return load_(t); }

private:
    const SecondOrderModel& model_;
    ThermalSchedule sched_;
    LoadFunction load_;
    Matrix damping_;
};

/// Leading-order adaptive ROM: V^T M V q'' + V^T C V q' + V^T f(u_eq + V q, theta) = V^T p(t, 0),
/// with V, u_eq and theta frozen at the step-midpoint slow time.
class MmsO1System {
public:
    MmsO1System(const SecondOrderModel& model, const BasisSource& source, ThermalSchedule schedule, LoadFunction load0)
        : model_(model), src_(source), sched_(std::move(schedule)), load_(std::move(load0)) {
        freeze(0.0);
    }

    Index size() const { return frozen_.basis.cols(); }
    void begin_step(double t_n, double t_np1) { freeze(0.5 * (t_n + t_np1)); }
    const Matrix& mass() const { return m_v_; }
    const Matrix& damping() const { return c_v_; }
    void evaluate(const Vector& q, double, Vector& f, Matrix* k) {
        const Matrix& v = frozen_.basis;
        const Vector u = frozen_.u_eq + v * q;
        if (k) {
            model_.force_and_tangent(u, theta_, full_f_, full_k_);
            *k = v.transpose() * full_k_ * v;
        } else {
            full_f_ = model_.internal_force(u, theta_);
        }
        f = v.transpose() * full_f_;
    }
    Vector load(double t) const { return frozen_.basis.transpose() * load_(t); }

    const BasisSample& frozen() const { return frozen_; }
    double frozen_theta() const { return theta_; }
    const ThermalSchedule& schedule() const { return sched_; }

private:
    void freeze(double t_mid) {
        const double tau = sched_.tau(t_mid);
        frozen_ = src_.at(tau);
        theta_ = sched_.theta(tau);
        const Matrix& v = frozen_.basis;
        m_v_ = v.transpose() * model_.mass() * v;
        c_v_ = v.transpose() * model_.damping(theta_) * v;
    }

    const SecondOrderModel& model_;
    const BasisSource& src_;
    ThermalSchedule sched_;
    LoadFunction load_;
    BasisSample frozen_;
    double theta_ = 0.0;
    Matrix m_v_, c_v_;
    Vector full_f_;
    Matrix full_k_;
};

struct OepsOptions {
    double damping_cross_factor = 1.0;  ///< multiplies C du0/dtau; 2 gives the alternative expansion
    bool include_ueq_derivative = true;
};

/**
 * First-order correction, linear in q1:
 *   V^T M V q1'' + V^T C V q1' + V^T K_t(u0) V q1
 *     = V^T [dp/deps - 2 rate M V' q0' - c rate C (u_eq' + V' q0)],
 * driven by a stored O(1) solution sampled at every step (stride 1, same dt).
 */
class MmsOepsSystem {
public:
    MmsOepsSystem(const SecondOrderModel& model, const BasisSource& source, ThermalSchedule schedule,
                  LoadFunction dload_deps, const Trajectory& o1, double dt, OepsOptions opt = {})
        : model_(model), src_(source), sched_(std::move(schedule)), dload_(std::move(dload_deps)), o1_(o1), dt_(dt),
          opt_(opt) {
        if (!(dt_ > 0)) throw ContractError("MmsOepsSystem: dt must be positive");
        freeze(0.0);
    }

    Index size() const { return frozen_.basis.cols(); }
    void begin_step(double t_n, double t_np1) { freeze(0.5 * (t_n + t_np1)); }
    const Matrix& mass() const { return m_v_; }
    const Matrix& damping() const { return c_v_; }
    void evaluate(const Vector& q1, double t, Vector& f, Matrix* k) {
        const Matrix& kv = tangent(t);
        f = kv * q1;
        if (k) *k = kv;
    }
    Vector load(double t) const {
        const Index i = sample_index(t);
        const Matrix& v = frozen_.basis;
        const Vector q0 = o1_.u.col(i);
        const Vector dq0 = o1_.v.col(i);
        const double rate = sched_.rate;
        Vector du0_dtau = slope_.basis * q0;
        if (opt_.include_ueq_derivative) du0_dtau += slope_.u_eq;
        const Vector rhs = dload_(t) - 2.0 * rate * (model_.mass() * (slope_.basis * dq0)) -
                           opt_.damping_cross_factor * rate * (c_full_ * du0_dtau);
        return v.transpose() * rhs;
    }

    /// V^T K_t(u0(t)) V with the frozen basis.
    const Matrix& tangent(double t) {
        const Index i = sample_index(t);
        if (i != cached_index_ || !cache_valid_) {
            const Vector u0 = frozen_.u_eq + frozen_.basis * o1_.u.col(i);
            k_v_ = frozen_.basis.transpose() * model_.tangent_stiffness(u0, theta_) * frozen_.basis;
            cached_index_ = i;
            cache_valid_ = true;
        }
        return k_v_;
    }

    const BasisSample& frozen() const { return frozen_; }

private:
    Index sample_index(double t) const {
        const double x = t / dt_;
        const auto i = static_cast<Index>(std::llround(x));
        if (std::abs(x - static_cast<double>(i)) > 1e-6 || i < 0 || i >= o1_.samples())
            throw ContractError("MmsOepsSystem: no O(1) sample at t=" + std::to_string(t));
        return i;
    }
    void freeze(double t_mid) {
        const double tau = sched_.tau(t_mid);
        frozen_ = src_.at(tau);
        slope_ = src_.slope(tau);
        theta_ = sched_.theta(tau);
        const Matrix& v = frozen_.basis;
        c_full_ = model_.damping(theta_);
        m_v_ = v.transpose() * model_.mass() * v;
        c_v_ = v.transpose() * c_full_ * v;
        cache_valid_ = false;
    }

    const SecondOrderModel& model_;
    const BasisSource& src_;
    ThermalSchedule sched_;
    LoadFunction dload_;
    const Trajectory& o1_;
    double dt_;
    OepsOptions opt_;
    BasisSample frozen_, slope_;
    double theta_ = 0.0;
    Matrix c_full_, m_v_, c_v_, k_v_;
    Index cached_index_ = -1;
    bool cache_valid_ = false;
};

/// Galerkin ROM with a fixed basis about a fixed origin:
/// V^T [M V q'' + C V q' + f(u_ref + V q, theta(t))] = V^T p(t).
class ConstantBasisSystem {
public:
    ConstantBasisSystem(const SecondOrderModel& model, Matrix basis, Vector u_ref, ThermalSchedule schedule, LoadFunction load)
        : model_(model), v_(std::move(basis)), u_ref_(std::move(u_ref)), sched_(std::move(schedule)), load_(std::move(load)) {
        if (v_.rows() != model_.dof_count() || u_ref_.size() != model_.dof_count())
            throw ContractError("ConstantBasisSystem: dimension mismatch");
        m_v_ = v_.transpose() * model_.mass() * v_;
        c_v_ = v_.transpose() * model_.damping(sched_.at_time(0.0)) * v_;
    }

    Index size() const { return v_.cols(); }
    void begin_step(double t_n, double t_np1) {
        c_v_ = v_.transpose() * model_.damping(sched_.at_time(0.5 * (t_n + t_np1))) * v_;
    }
    const Matrix& mass() const { return m_v_; }
    const Matrix& damping() const { return c_v_; }
    void evaluate(const Vector& q, double t, Vector& f, Matrix* k) {
        const double th = sched_.at_time(t);
        const Vector u = u_ref_ + v_ * q;
        if (k) {
            model_.force_and_tangent(u, th, full_f_, full_k_);
            *k = v_.transpose() * full_k_ * v_;
        } else {
            full_f_ = model_.internal_force(u, th);
        }
        f = v_.transpose() * full_f_;
    }
    Vector load(double t) const { return v_.transpose() * load_(t); }

    const Matrix& basis() const { return v_; }
    const Vector& origin() const { return u_ref_; }

private:
    const SecondOrderModel& model_;
    Matrix v_;
    Vector u_ref_;
    ThermalSchedule sched_;
    LoadFunction load_;
    Matrix m_v_, c_v_;
    Vector full_f_;
    Matrix full_k_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Reduced O(1) residual M_V q'' + C_V q' + V^T f - V^T p(t, 0) at the currently frozen step.
inline Vector reduced_residual_o1(MmsO1System& sys, const Vector& q0, const Vector& dq0, const Vector& ddq0, double t) {
    Vector f;
    sys.evaluate(q0, t, f, nullptr);
    return sys.mass() * ddq0 + sys.damping() * dq0 + f - sys.load(t);
}

inline Vector oeps_rhs(const MmsOepsSystem& sys, double t) { return sys.load(t); }

inline Matrix reduced_tangent_oeps(MmsOepsSystem& sys, double t) { return sys.tangent(t); }

/// u = u_eq + V (q0 + eps q1).
inline Vector reconstruct(const Vector& u_eq, const Matrix& v, const Vector& q0, const Vector* q1 = nullptr, double eps = 0.0) {
    Vector q = q0;
    if (q1 && eps != 0.0) q += eps * *q1;
    return u_eq + v * q;
}

/// Full-space displacement history of an MMS solution, using V(tau(t)) at each sample.
inline Matrix reconstruct_history(const BasisSource& src, const ThermalSchedule& sched, const Trajectory& o1,
                                  const Trajectory* oeps = nullptr) {
    if (oeps && oeps->samples() != o1.samples()) throw ContractError("reconstruct_history: sample mismatch");
    const BasisSample s0 = src.at(0.0);
    Matrix u(s0.basis.rows(), o1.samples());
    for (Index i = 0; i < o1.samples(); ++i) {
        const BasisSample s = src.at(sched.tau(o1.times[static_cast<size_t>(i)]));
        if (oeps) {
            const Vector q1 = oeps->u.col(i);
            u.col(i) = reconstruct(s.u_eq, s.basis, o1.u.col(i), &q1, sched.eps);
        } else {
            u.col(i) = reconstruct(s.u_eq, s.basis, o1.u.col(i));
        }
    }
    return u;
}

/// Newton solve of V^T f(u_ref + V q, theta) = V^T p for q.
inline Vector reduced_equilibrium(const SecondOrderModel& model, const Matrix& v, const Vector& u_ref, double theta,
                                  const Vector& p, const NewtonOptions& opt = {}) {
    Vector q = Vector::Zero(v.cols());
    Vector f;
    Matrix k;
    std::vector<double> hist;
    const Vector pr = v.transpose() * p;
    model.force_and_tangent(u_ref, theta, f, k);
    Vector r = v.transpose() * f - pr;
    const double tol = opt.rel_tol * (1.0 + r.norm());
    hist.push_back(r.norm());
    int it = 0;
    while (hist.back() > tol) {
        if (it++ >= opt.max_iterations) throw SolverError("reduced equilibrium did not converge", hist);
        Eigen::LDLT<Matrix> ldlt(v.transpose() * k * v);
        q -= ldlt.solve(r);
        model.force_and_tangent(u_ref + v * q, theta, f, k);
        r = v.transpose() * f - pr;
        hist.push_back(r.norm());
        if (!std::isfinite(hist.back())) throw SolverError("reduced equilibrium diverged", hist);
    }
    return q;
}

}  // namespace mmsrom
