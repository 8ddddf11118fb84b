#pragma once

/**
 * @file model.hpp
 * @brief Second-order mechanical model contract M u'' + C u' + f(u, theta) = g(t).
 *
 * The temperature configuration is a single scalar parameter theta: the pulse
 * centre x_c [m] for the beam, the temperature offset T [K] for the two-DOF
 * oscillator. Product grids over several parameters would need a vector here.
 */

#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace mmsrom {

/// Scalar temperature configuration.
using TemperatureParam = double;

class SecondOrderModel {
public:
    virtual ~SecondOrderModel() = default;

    virtual Index dof_count() const = 0;
    virtual const Matrix& mass() const = 0;
    /// Damping may depend on the temperature configuration (two-DOF oscillator).
    virtual Matrix damping(TemperatureParam theta) const = 0;
    virtual Vector internal_force(const Vector& u, TemperatureParam theta) const = 0;
    virtual Matrix tangent_stiffness(const Vector& u, TemperatureParam theta) const = 0;

    /// Characteristic length [m] used to scale finite-difference steps.
    virtual double length_scale() const { return 1.0; }

    /// Internal force and tangent in one pass. Override when assembly can share work.
    virtual void force_and_tangent(const Vector& u, TemperatureParam theta, Vector& f, Matrix& k) const {
        f = internal_force(u, theta);
        k = tangent_stiffness(u, theta);
    }
};

/// Outcome of validate_model / check_model.
struct ModelReport {
    double mass_asymmetry = 0.0;
    double mass_min_eigenvalue = 0.0;
    double damping_asymmetry = 0.0;
    double damping_min_eigenvalue = 0.0;  ///< relative to the largest eigenvalue
    double tangent_deviation = 0.0;       ///< max relative FD-vs-analytic deviation
    std::vector<std::string> violations;

    bool passed() const { return violations.empty(); }
};

struct ValidationOptions {
    int trials = 3;
    double displacement_scale = 1e-3;  ///< magnitude of the random states u
    bool include_origin = true;        ///< also check u = 0
    double symmetry_tol = 1e-12;
    double tangent_tol = 1e-6;
    unsigned seed = 12345;
};

class ValidationError : public Error {
public:
    explicit ValidationError(ModelReport report)
        : Error(describe(report)), report_(std::move(report)) {}
    const ModelReport& report() const noexcept { return report_; }

private:
    static std::string describe(const ModelReport& r) {
        std::string s = "model validation failed:";
        for (const auto& v : r.violations) s += " [" + v + "]";
        return s;
    }
    ModelReport report_;
};

/// Checks the model contract on random states and returns the deviations.
inline ModelReport check_model(const SecondOrderModel& model, TemperatureParam theta,
                               const ValidationOptions& opt = {}) {
    if (opt.trials < 1) throw ContractError("check_model: trials must be >= 1");
    ModelReport rep;
    const Index n = model.dof_count();

    const Matrix& m = model.mass();
    rep.mass_asymmetry = symmetry_deviation(m);
    if (rep.mass_asymmetry > opt.symmetry_tol) rep.violations.push_back("mass symmetry");
    Eigen::SelfAdjointEigenSolver<Matrix> mes(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    rep.mass_min_eigenvalue = mes.eigenvalues()(0);
    if (rep.mass_min_eigenvalue <= 0.0) rep.violations.push_back("mass positive definiteness");

    const Matrix c = model.damping(theta);
    rep.damping_asymmetry = symmetry_deviation(c);
    if (rep.damping_asymmetry > opt.symmetry_tol) rep.violations.push_back("damping symmetry");
    Eigen::SelfAdjointEigenSolver<Matrix> ces(0.5 * (c + c.transpose()), Eigen::EigenvaluesOnly);
    const double cmax = ces.eigenvalues().cwiseAbs().maxCoeff();
    rep.damping_min_eigenvalue = cmax > 0 ? ces.eigenvalues()(0) / cmax : 0.0;
    if (rep.damping_min_eigenvalue < -1e-10) rep.violations.push_back("damping positive semi-definiteness");

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto random_vec = [&](double scale) {
        Vector v(n);
        for (Index i = 0; i < n; ++i) v(i) = scale * uni(rng);
        return v;
    };

    bool tangent_symmetric = true;
    const int total = opt.trials + (opt.include_origin ? 1 : 0);
    for (int trial = 0; trial < total; ++trial) {
        const Vector u = (opt.include_origin && trial == 0) ? Vector(Vector::Zero(n))
                                                            : random_vec(opt.displacement_scale);
        Vector du = random_vec(1.0);
        du /= du.cwiseAbs().maxCoeff();
        const double h = 1e-6 * (1.0 + u.cwiseAbs().maxCoeff());
        const Matrix kt = model.tangent_stiffness(u, theta);
        if (symmetry_deviation(kt) > opt.symmetry_tol) tangent_symmetric = false;
        const Vector fd = (model.internal_force(u + h * du, theta) - model.internal_force(u - h * du, theta)) / (2 * h);
        const Vector an = kt * du;
        const double denom = std::max(an.norm(), 1e-300);
        rep.tangent_deviation = std::max(rep.tangent_deviation, (fd - an).norm() / denom);
    }
    if (!tangent_symmetric) rep.violations.push_back("tangent symmetry");
    if (rep.tangent_deviation > opt.tangent_tol) rep.violations.push_back("tangent consistency");
    return rep;
}

/// Like check_model but throws ValidationError naming every violated check.
inline ModelReport validate_model(const SecondOrderModel& model, TemperatureParam theta,
                                  const ValidationOptions& opt = {}) {
    ModelReport rep = check_model(model, theta, opt);
    if (!rep.passed()) throw ValidationError(rep);
    return rep;
}

}  // namespace mmsrom
