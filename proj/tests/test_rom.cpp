#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "mmsrom/basis_db.hpp"
#include "mmsrom/beam.hpp"
#include "mmsrom/newmark.hpp"
#include "mmsrom/rom.hpp"
#include "mmsrom/two_dof.hpp"

using namespace mmsrom;

namespace {

BeamModel curved(Kinematics kin, double tc) {
    BeamProperties p;
    p.rise = 5e-3;
    TemperaturePulse t;
    t.height = tc;
    return BeamModel(p, t, kin);
}

TwoDofModel isospectral() {
    TwoDofParams p;
    p.law = SpringLaw::isospectral;
    return TwoDofModel(p);
}

// Synthetic O(1) trajectory: q0(t) = a sin(w t), sampled every dt.
Trajectory synthetic_o1(Index m, double dt, Index samples, double amp, double w) {
    Trajectory tr;
    tr.times.resize(static_cast<size_t>(samples));
    tr.u.resize(m, samples);
    tr.v.resize(m, samples);
    tr.a.resize(m, samples);
    for (Index i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) * dt;
        tr.times[static_cast<size_t>(i)] = t;
        for (Index r = 0; r < m; ++r) {
            const double a = amp * (1.0 + 0.5 * static_cast<double>(r));
            tr.u(r, i) = a * std::sin(w * t);
            tr.v(r, i) = a * w * std::cos(w * t);
            tr.a(r, i) = -a * w * w * std::sin(w * t);
        }
    }
    return tr;
}

std::shared_ptr<const BasisDatabase> beam_database(const BeamModel& m) {
    return std::make_shared<const BasisDatabase>(build_database(m, default_grid(0.1)));
}

// V(tau) = v0 + tau v1, u_eq(tau) = tau w; not normalised, so V^T V' is nonzero.
class LinearBasisSource final : public BasisSource {
public:
    BasisSample at(double tau) const override {
        Matrix v(2, 1);
        v << 1.0 + tau, 0.5 - 2.0 * tau;
        return {v, Vector(Vector::Constant(2, 0.1 * tau))};
    }
    BasisSample slope(double) const override {
        Matrix v(2, 1);
        v << 1.0, -2.0;
        return {v, Vector(Vector::Constant(2, 0.1))};
    }
};

}  // namespace

TEST(ReducedEquilibrium, SatisfiesProjectedBalance) {
    const BeamModel m = curved(Kinematics::nonlinear, 100.0);
    const LocalBasis lb = build_local_basis(m, 0.05);
    const Vector p = m.uniform_transverse_load(1e3);
    const Vector q = reduced_equilibrium(m, lb.basis, lb.u_eq, 0.05, p);
    const Vector r = lb.basis.transpose() * (m.internal_force(lb.u_eq + lb.basis * q, 0.05) - p);
    EXPECT_LT(r.norm(), 1e-8 * (lb.basis.transpose() * p).norm());
}

TEST(ReducedEquilibrium, FullBasisMatchesFullSolve) {
    const BeamModel m = curved(Kinematics::nonlinear, 100.0);
    const Vector zero = Vector::Zero(m.dof_count());
    const Matrix v = Matrix::Identity(m.dof_count(), m.dof_count());
    const Vector q = reduced_equilibrium(m, v, zero, 0.03, zero);
    const auto eq = solve_equilibrium(m, 0.03, zero);
    EXPECT_LT((q - eq.u).norm(), 1e-8 * eq.u.norm());
}

TEST(ConstantBasis, FullOrthonormalBasisReproducesLinearModel) {
    const BeamModel m = curved(Kinematics::linear, 50.0);
    const Index n = m.dof_count();
    const Vector p = m.uniform_transverse_load(1e3);
    TemperaturePulse pulse = m.pulse();
    pulse.amplitude = 0.03;
    const ThermalSchedule sched = pulse_schedule(pulse, 0.01, 3000.0);
    const LoadFunction load = [p](double t) { return Vector(p * std::sin(2000.0 * t)); };
    FullSystem full(m, sched, load);
    ConstantBasisSystem rom(m, Matrix::Identity(n, n), Vector::Zero(n), sched, load);
    NewmarkSettings s;
    s.dt = 2e-5;
    const auto a = newmark_integrate(full, Vector::Zero(n), Vector::Zero(n), s, 100);
    const auto b = newmark_integrate(rom, Vector::Zero(n), Vector::Zero(n), s, 100);
    EXPECT_LT((a.u - b.u).norm(), 1e-10 * a.u.norm());
    EXPECT_THROW(ConstantBasisSystem(m, Matrix::Identity(n, 3), Vector::Zero(n - 1), sched, load), ContractError);
}

TEST(MmsO1, IdentityBasisEqualsFullModelWhenFrozen) {
    const TwoDofModel m = isospectral();
    const ThermalSchedule sched = frozen_schedule(0.4);
    const LoadFunction load = [](double t) { return Vector(Vector::Constant(2, std::sin(1.5 * t))); };
    const ConstantBasisSource src(Matrix::Identity(2, 2), Vector::Zero(2));
    FullSystem full(m, sched, load);
    MmsO1System rom(m, src, sched, load);
    NewmarkSettings s;
    s.dt = 0.05;
    Vector u0(2);
    u0 << 0.1, 0.2;
    const auto a = newmark_integrate(full, u0, Vector::Zero(2), s, 400);
    const auto b = newmark_integrate(rom, u0, Vector::Zero(2), s, 400);
    EXPECT_LT((a.u - b.u).norm(), 1e-12 * a.u.norm());
}

TEST(MmsO1, SingleEntryDatabaseMatchesConstantBasisRom) {
    const BeamModel m = curved(Kinematics::nonlinear, 100.0);
    auto db = std::make_shared<const BasisDatabase>(build_database(m, {0.05}));
    TemperaturePulse pulse = m.pulse();
    pulse.center0 = 0.05;
    pulse.amplitude = 0.0;
    const ThermalSchedule sched = pulse_schedule(pulse, 0.01, 3000.0);
    const Vector p = m.uniform_transverse_load(1e3);
    const LoadFunction load = [p](double t) { return Vector(p * std::sin(2500.0 * t)); };
    const DatabaseBasisSource src(db, sched);
    MmsO1System mms(m, src, sched, load);
    ConstantBasisSystem cb(m, db->entries[0].basis, db->entries[0].u_eq, sched, load);
    NewmarkSettings s;
    s.dt = 2e-5;
    const Vector z = Vector::Zero(5);
    const auto a = newmark_integrate(mms, z, z, s, 300);
    const auto b = newmark_integrate(cb, z, z, s, 300);
    EXPECT_GT(a.u.norm(), 0.0);
    EXPECT_LT((a.u - b.u).norm(), 1e-10 * a.u.norm());
}

TEST(MmsO1, ReducedResidualVanishesOnTheSolution) {
    const TwoDofModel m = isospectral();
    const ThermalSchedule sched = sine_schedule(0.9, 0.01);
    const TwoDofBasisSource src(m, sched);
    MmsO1System rom(m, src, sched, [](double t) { return Vector(Vector::Constant(2, std::sin(1.5 * t))); });
    NewmarkSettings s;
    s.dt = 0.05;
    const auto tr = newmark_integrate(rom, Vector::Constant(1, 0.1), Vector::Zero(1), s, 200);
    // the integrator leaves the last step frozen
    const Index i = tr.samples() - 1;
    const Vector r = reduced_residual_o1(rom, tr.u.col(i), tr.v.col(i), tr.a.col(i), tr.times.back());
    EXPECT_LT(r.norm(), 1e-7);
    EXPECT_DOUBLE_EQ(rom.frozen_theta(), sched.theta(sched.tau(tr.times.back() - 0.5 * s.dt)));
}

TEST(MmsOeps, RightHandSideVanishesForFrozenBasis) {
    const TwoDofModel m = isospectral();
    const ConstantBasisSource src(Matrix(m.first_mode(0.3)), Vector::Zero(2));
    const Trajectory o1 = synthetic_o1(1, 0.1, 50, 0.2, 1.0);
    const MmsOepsSystem sys(m, src, sine_schedule(0.9, 0.01), zero_load(2), o1, 0.1);
    for (Index i = 0; i < 50; ++i) EXPECT_EQ(oeps_rhs(sys, 0.1 * static_cast<double>(i)).norm(), 0.0);
}

TEST(MmsOeps, RightHandSideAtRestIsTheProjectedLoadDerivative) {
    const BeamModel m = curved(Kinematics::nonlinear, 100.0);
    auto db = beam_database(m);
    TemperaturePulse pulse = m.pulse();
    pulse.amplitude = 0.03;
    const ThermalSchedule sched = pulse_schedule(pulse, 0.01, 3000.0);
    const DatabaseBasisSource src(db, sched);
    const Vector l1 = m.uniform_transverse_load(1e3);
    const Trajectory o1 = synthetic_o1(5, 1e-5, 20, 0.0, 1.0);
    OepsOptions opt;
    opt.include_ueq_derivative = false;
    MmsOepsSystem sys(m, src, sched, [l1](double) { return l1; }, o1, 1e-5, opt);
    sys.begin_step(0.0, 1e-5);
    EXPECT_LT((oeps_rhs(sys, 1e-5) - sys.frozen().basis.transpose() * l1).norm(), 1e-12 * l1.norm());
}

TEST(MmsOeps, TwoDofRightHandSideMatchesDirectEvaluation) {
    const TwoDofModel m = isospectral();
    const double eps = 0.05, dt = 0.1;
    const ThermalSchedule sched = sine_schedule(0.9, eps);
    const LinearBasisSource src;
    const Trajectory o1 = synthetic_o1(1, dt, 100, 0.3, 1.0);
    MmsOepsSystem sys(m, src, sched, zero_load(2), o1, dt);
    for (Index step : {5, 37, 80}) {
        const double t0 = static_cast<double>(step - 1) * dt, t1 = static_cast<double>(step) * dt;
        sys.begin_step(t0, t1);
        const double tau = sched.tau(0.5 * (t0 + t1));
        const Vector v = src.at(tau).basis.col(0);
        const Vector dv = src.slope(tau).basis.col(0);
        const double q0 = o1.u(0, step), dq0 = o1.v(0, step);
        const Vector direct = -2.0 * m.mass() * dv * dq0 - m.damping(sched.theta(tau)) * (dv * q0 + src.slope(tau).u_eq);
        const double expected = v.dot(direct);
        EXPECT_GT(std::abs(expected), 1e-3);
        EXPECT_NEAR(oeps_rhs(sys, t1)(0), expected, 1e-12 * std::abs(expected)) << step;
    }
}

TEST(MmsOeps, BeamRightHandSideMatchesTwoDimensionalStencil) {
    const BeamModel m = curved(Kinematics::nonlinear, 100.0);
    auto db = beam_database(m);
    TemperaturePulse pulse = m.pulse();
    pulse.amplitude = 0.03;
    const double eps = 0.01, rate = 3000.0, w = 3000.0, amp = 1e-5;
    const ThermalSchedule sched = pulse_schedule(pulse, eps, rate);
    // step 100 is frozen where x_c sits mid-cell in [0.065, 0.070]
    const double tau_mid = std::asin(0.0175 / 0.03);
    const Index step = 100;
    const double dt = tau_mid / (eps * rate) / (static_cast<double>(step) - 0.5);
    const DatabaseBasisSource src(db, sched);
    const Trajectory o1 = synthetic_o1(5, dt, step + 1, amp, w);
    MmsOepsSystem sys(m, src, sched, zero_load(m.dof_count()), o1, dt);
    sys.begin_step((step - 1) * dt, step * dt);

    auto q0 = [&](double t) {
        Vector q(5);
        for (Index r = 0; r < 5; ++r) q(r) = amp * (1.0 + 0.5 * static_cast<double>(r)) * std::sin(w * t);
        return q;
    };
    auto u0 = [&](double t, double tau) {
        const BasisSample b = src.at(tau);
        return Vector(b.u_eq + b.basis * q0(t));
    };
    const double t = step * dt, h = 1e-7, k = 1e-4;
    const Vector d_tau = (u0(t, tau_mid + k) - u0(t, tau_mid - k)) / (2 * k);
    const Vector d_t_tau =
        (u0(t + h, tau_mid + k) - u0(t + h, tau_mid - k) - u0(t - h, tau_mid + k) + u0(t - h, tau_mid - k)) / (4 * h * k);
    const Matrix& v = sys.frozen().basis;
    const Vector expected =
        v.transpose() * (-2.0 * rate * (m.mass() * d_t_tau) - rate * (m.damping(sched.theta(tau_mid)) * d_tau));
    EXPECT_LT((oeps_rhs(sys, t) - expected).norm(), 1e-5 * expected.norm());
}

TEST(MmsOeps, OptionVariantsChangeOnlyTheirTerms) {
    const BeamModel m = curved(Kinematics::nonlinear, 100.0);
    auto db = beam_database(m);
    TemperaturePulse pulse = m.pulse();
    pulse.amplitude = 0.03;
    const double dt = 1e-5;
    const ThermalSchedule sched = pulse_schedule(pulse, 0.01, 3000.0);
    const DatabaseBasisSource src(db, sched);
    const Trajectory o1 = synthetic_o1(5, dt, 200, 1e-6, 3000.0);
    const LoadFunction none = zero_load(m.dof_count());
    OepsOptions base, cross2, no_ueq;
    cross2.damping_cross_factor = 2.0;
    no_ueq.include_ueq_derivative = false;
    MmsOepsSystem a(m, src, sched, none, o1, dt, base);
    MmsOepsSystem b(m, src, sched, none, o1, dt, cross2);
    MmsOepsSystem c(m, src, sched, none, o1, dt, no_ueq);
    const Index step = 150;
    const double t0 = (step - 1) * dt, t1 = step * dt;
    for (auto* s : {&a, &b, &c}) s->begin_step(t0, t1);
    const double tau = sched.tau(0.5 * (t0 + t1));
    const BasisSample sl = src.slope(tau);
    const Matrix& v = a.frozen().basis;
    const Matrix cmat = m.damping(sched.theta(tau));
    const Vector damp_term = -sched.rate * v.transpose() * (cmat * (sl.u_eq + sl.basis * o1.u.col(step)));
    const Vector ra = oeps_rhs(a, t1), rb = oeps_rhs(b, t1), rc = oeps_rhs(c, t1);
    EXPECT_LT((rb - ra - damp_term).norm(), 1e-10 * damp_term.norm());
    const Vector ueq_term = -sched.rate * v.transpose() * (cmat * sl.u_eq);
    EXPECT_GT(ueq_term.norm(), 0.0);
    EXPECT_LT((ra - rc - ueq_term).norm(), 1e-10 * ueq_term.norm());
}

TEST(MmsOeps, TangentIsTheProjectedStiffnessAtTheLeadingSolution) {
    const BeamModel m = curved(Kinematics::nonlinear, 100.0);
    auto db = beam_database(m);
    TemperaturePulse pulse = m.pulse();
    pulse.amplitude = 0.03;
    const double dt = 1e-5;
    const ThermalSchedule sched = pulse_schedule(pulse, 0.01, 3000.0);
    const DatabaseBasisSource src(db, sched);
    const Trajectory o1 = synthetic_o1(5, dt, 400, 2e-5, 3000.0);
    MmsOepsSystem sys(m, src, sched, zero_load(m.dof_count()), o1, dt);
    for (Index step = 1; step < 400; step += 40) {
        const double t0 = (step - 1) * dt, t1 = step * dt;
        sys.begin_step(t0, t1);
        const Matrix kv = reduced_tangent_oeps(sys, t1);
        const BasisSample& f = sys.frozen();
        const double theta = sched.theta(sched.tau(0.5 * (t0 + t1)));
        const Matrix direct = f.basis.transpose() * m.tangent_stiffness(f.u_eq + f.basis * o1.u.col(step), theta) * f.basis;
        EXPECT_LT((kv - direct).norm(), 1e-10 * direct.norm()) << step;
        EXPECT_LT(symmetry_deviation(kv), 1e-10);
        Vector f1;
        Matrix k1;
        sys.evaluate(Vector::Ones(5), t1, f1, &k1);
        EXPECT_LT((f1 - direct * Vector::Ones(5)).norm(), 1e-10 * f1.norm());
    }
}

TEST(MmsOeps, LinearModelTangentIgnoresTheLeadingSolution) {
    const BeamModel m = curved(Kinematics::linear, 50.0);
    const LocalBasis lb = build_local_basis(m, 0.05);
    const ConstantBasisSource src(lb.basis, lb.u_eq);
    const double dt = 1e-5;
    const Trajectory small = synthetic_o1(5, dt, 30, 1e-7, 3000.0);
    const Trajectory large = synthetic_o1(5, dt, 30, 1e-4, 3000.0);
    const ThermalSchedule sched = frozen_schedule(0.05);
    MmsOepsSystem a(m, src, sched, zero_load(m.dof_count()), small, dt);
    MmsOepsSystem b(m, src, sched, zero_load(m.dof_count()), large, dt);
    const Matrix ka = a.tangent(20 * dt), kb = b.tangent(20 * dt);
    EXPECT_LT((ka - kb).norm(), 1e-12 * ka.norm());
}

TEST(MmsOeps, RequiresSamplesOnTheStepGrid) {
    const TwoDofModel m = isospectral();
    const ConstantBasisSource src(Matrix(m.first_mode(0.0)), Vector::Zero(2));
    const Trajectory o1 = synthetic_o1(1, 0.1, 10, 0.1, 1.0);
    MmsOepsSystem sys(m, src, frozen_schedule(0.0), zero_load(2), o1, 0.1);
    EXPECT_THROW(sys.tangent(0.05), ContractError);
    EXPECT_THROW(sys.tangent(1.0), ContractError);
    EXPECT_NO_THROW(sys.tangent(0.9));
    EXPECT_THROW(MmsOepsSystem(m, src, frozen_schedule(0.0), zero_load(2), o1, 0.0), ContractError);
}

TEST(Reconstruct, Identities) {
    const Matrix v = Matrix::Identity(4, 2);
    const Vector ueq = Vector::Constant(4, 0.5);
    const Vector q0 = Vector::Constant(2, 1.0);
    const Vector q1 = Vector::Constant(2, 3.0);
    EXPECT_EQ(reconstruct(ueq, v, q0), reconstruct(ueq, v, q0, &q1, 0.0));
    const Vector u = reconstruct(ueq, v, q0, &q1, 0.1);
    EXPECT_DOUBLE_EQ(u(0), 0.5 + 1.0 + 0.3);
    EXPECT_DOUBLE_EQ(u(3), 0.5);
    EXPECT_EQ(reconstruct(ueq, v, Vector::Zero(2)), ueq);
}

TEST(Reconstruct, HistoryUsesTheBasisAtEachSample) {
    const TwoDofModel m = isospectral();
    const ThermalSchedule sched = sine_schedule(0.9, 0.1);
    const TwoDofBasisSource src(m, sched);
    const Trajectory o1 = synthetic_o1(1, 0.1, 30, 0.3, 1.0);
    const Trajectory o2 = synthetic_o1(1, 0.1, 30, 1.0, 2.0);
    const Matrix u = reconstruct_history(src, sched, o1, &o2);
    for (Index i = 0; i < 30; ++i) {
        const Vector phi = m.first_mode(sched.at_time(o1.times[static_cast<size_t>(i)]));
        EXPECT_LT((u.col(i) - phi * (o1.u(0, i) + 0.1 * o2.u(0, i))).norm(), 1e-14);
    }
    const Trajectory short_tr = synthetic_o1(1, 0.1, 10, 1.0, 2.0);
    EXPECT_THROW(reconstruct_history(src, sched, o1, &short_tr), ContractError);
}
