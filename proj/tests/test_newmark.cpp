#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mmsrom/newmark.hpp"
#include "mmsrom/rom.hpp"
#include "mmsrom/two_dof.hpp"

using namespace mmsrom;

namespace {

// M a + C v + K u + g u^3 = p(t)
struct SpringSystem {
    Matrix m, c, k;
    double cubic = 0.0;
    std::function<Vector(double)> p;

    explicit SpringSystem(Matrix mass, Matrix damp, Matrix stiff) : m(std::move(mass)), c(std::move(damp)), k(std::move(stiff)) {
        p = [n = m.rows()](double) { return Vector(Vector::Zero(n)); };
    }
    Index size() const { return m.rows(); }
    void begin_step(double, double) {}
    const Matrix& mass() const { return m; }
    const Matrix& damping() const { return c; }
    void evaluate(const Vector& u, double, Vector& f, Matrix* kt) {
        f = k * u + cubic * u.array().cube().matrix();
        if (kt) *kt = k + Matrix((3.0 * cubic * u.array().square()).matrix().asDiagonal());
    }
    Vector load(double t) const { return p(t); }
};

static_assert(NewmarkSystem<SpringSystem>);

SpringSystem oscillator(double omega, double zeta = 0.0) {
    return SpringSystem(Matrix::Identity(1, 1), Matrix::Constant(1, 1, 2 * zeta * omega), Matrix::Constant(1, 1, omega * omega));
}

Vector scalar(double x) { return Vector::Constant(1, x); }

double final_error(double dt) {
    auto sys = oscillator(2.0);
    NewmarkSettings s;
    s.dt = dt;
    const double t_end = 3.0;
    const auto steps = static_cast<Index>(std::llround(t_end / dt));
    const auto tr = newmark_integrate(sys, scalar(1.0), scalar(0.0), s, steps);
    return std::abs(tr.u(0, tr.samples() - 1) - std::cos(2.0 * t_end));
}

}  // namespace

TEST(Newmark, SecondOrderConvergenceOnHarmonicOscillator) {
    const double e1 = final_error(0.02), e2 = final_error(0.01), e3 = final_error(0.005);
    EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.1);
    EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.1);
}

TEST(Newmark, AverageAccelerationConservesEnergy) {
    auto sys = oscillator(3.0);
    NewmarkSettings s;
    s.dt = 0.05;
    const auto tr = newmark_integrate(sys, scalar(0.5), scalar(0.2), s, 2000);
    const double e0 = 0.5 * 0.2 * 0.2 + 0.5 * 9.0 * 0.25;
    for (Index j = 0; j < tr.samples(); ++j) {
        const double e = 0.5 * tr.v(0, j) * tr.v(0, j) + 0.5 * 9.0 * tr.u(0, j) * tr.u(0, j);
        EXPECT_NEAR(e / e0, 1.0, 1e-10);
    }
}

TEST(Newmark, StaticEquilibriumStaysPut) {
    Matrix k(2, 2);
    k << 4, -1, -1, 3;
    SpringSystem sys(Matrix::Identity(2, 2), 0.1 * k, k);
    sys.cubic = 50.0;
    Vector u_eq(2);
    u_eq << 0.3, -0.2;
    Vector f;
    sys.evaluate(u_eq, 0.0, f, nullptr);
    sys.p = [f](double) { return f; };
    NewmarkSettings s;
    s.dt = 0.01;
    const auto tr = newmark_integrate(sys, u_eq, Vector::Zero(2), s, 200);
    for (Index j = 0; j < tr.samples(); ++j) EXPECT_LT((tr.u.col(j) - u_eq).norm(), 1e-12);
    EXPECT_LT(tr.a.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Newmark, NonlinearResidualIsConverged) {
    auto sys = oscillator(1.0, 0.05);
    sys.cubic = 10.0;
    sys.p = [](double t) { return scalar(2.0 * std::sin(1.3 * t)); };
    NewmarkSettings s;
    s.dt = 0.02;
    const auto tr = newmark_integrate(sys, scalar(0.0), scalar(0.0), s, 1000);
    EXPECT_LE(tr.max_step_residual, s.newton_tol);
    EXPECT_GT(tr.total_newton_iterations, 1000);
    EXPECT_LE(tr.max_newton_iterations, 6);
}

TEST(Newmark, TwoDofIsospectralFrozenResponseIsBounded) {
    TwoDofParams p;
    p.law = SpringLaw::isospectral;
    const TwoDofModel model(p);
    FullSystem sys(model, frozen_schedule(0.88), zero_load(2));
    NewmarkSettings s;
    s.dt = 2 * std::numbers::pi / std::sqrt(41.0) / 40;
    Vector u0(2);
    u0 << 0.1, -0.05;
    const auto tr = newmark_integrate(sys, u0, Vector::Zero(2), s, 4000);
    const double peak = tr.u.cwiseAbs().maxCoeff();
    EXPECT_LE(peak, u0.cwiseAbs().maxCoeff() * 2.0);
    // damped, so it decays
    EXPECT_LT(tr.u.col(tr.samples() - 1).norm(), 0.5 * u0.norm());
}

TEST(Newmark, NewtonFailureCarriesHistory) {
    auto sys = oscillator(1.0);
    sys.cubic = 1e4;
    sys.p = [](double) { return scalar(100.0); };
    NewmarkSettings s;
    s.dt = 0.1;
    s.max_newton = 1;
    try {
        newmark_integrate(sys, scalar(0.0), scalar(0.0), s, 5);
        FAIL();
    } catch (const SolverError& e) {
        EXPECT_EQ(e.residual_history().size(), 2u);
        EXPECT_NE(std::string(e.what()).find("did not converge"), std::string::npos);
    }
}

TEST(Newmark, RunawayGrowthIsReportedAsUnstable) {
    auto sys = oscillator(1.0);
    sys.k(0, 0) = -1.0;
    NewmarkSettings s;
    s.dt = 0.1;
    try {
        newmark_integrate(sys, scalar(1e-3), scalar(0.0), s, 1000);
        FAIL();
    } catch (const SolverError& e) {
        EXPECT_NE(std::string(e.what()).find("unstable"), std::string::npos);
    }
}

TEST(Newmark, SettingsAreValidated) {
    auto sys = oscillator(1.0);
    NewmarkSettings s;
    EXPECT_THROW(newmark_integrate(sys, scalar(0), scalar(0), s, 1), ContractError);
    s.dt = 0.1;
    s.beta = 0.1;
    EXPECT_THROW(newmark_integrate(sys, scalar(0), scalar(0), s, 1), ContractError);
    s.beta = 0.25;
    s.record_stride = 0;
    EXPECT_THROW(newmark_integrate(sys, scalar(0), scalar(0), s, 1), ContractError);
    s.record_stride = 1;
    EXPECT_THROW(newmark_integrate(sys, Vector::Zero(2), scalar(0), s, 1), ContractError);
    EXPECT_THROW(newmark_integrate(sys, scalar(0), scalar(0), s, -1), ContractError);
}

TEST(Newmark, RecordStrideSubsamples) {
    auto sys = oscillator(2.0, 0.1);
    NewmarkSettings s;
    s.dt = 0.01;
    const auto full = newmark_integrate(sys, scalar(1.0), scalar(0.0), s, 10);
    s.record_stride = 3;
    const auto sub = newmark_integrate(sys, scalar(1.0), scalar(0.0), s, 10);
    ASSERT_EQ(sub.samples(), 4);
    for (Index j = 0; j < 4; ++j) {
        EXPECT_DOUBLE_EQ(sub.times[static_cast<size_t>(j)], full.times[static_cast<size_t>(3 * j)]);
        EXPECT_EQ(sub.u(0, j), full.u(0, 3 * j));
    }
    EXPECT_EQ(full.samples(), 11);
    EXPECT_DOUBLE_EQ(full.times.back(), 0.1);
}

TEST(Newmark, ZeroStepsRecordsTheInitialState) {
    auto sys = oscillator(2.0);
    NewmarkSettings s;
    s.dt = 0.1;
    const auto tr = newmark_integrate(sys, scalar(1.0), scalar(0.5), s, 0);
    ASSERT_EQ(tr.samples(), 1);
    EXPECT_EQ(tr.u(0, 0), 1.0);
    EXPECT_EQ(tr.v(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(tr.a(0, 0), -4.0);
}
