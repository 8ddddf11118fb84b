#pragma once

/**
 * @file beam.hpp
 * @brief Planar von Kármán beam with an optional shallow-arch initial shape and a
 *        moving thermal pulse.
 *
 * Element: 2 nodes, DOFs (u, w, theta) per node. Axial displacement is linear,
 * transverse displacement Hermite cubic. With initial shape z0(x):
 *
 *   e     = u' + z0' w' + 1/2 w'^2       membrane strain
 *   kappa = w''                          curvature
 *   N     = E b h (e - alpha_T T(x))     axial force
 *   M     = E I kappa                    bending moment
 *
 * Temperature is uniform through the thickness, so it only enters through the
 * membrane thermal strain. Both end nodes are clamped.
 */

#include <array>
#include <cmath>
#include <numbers>

#include "model.hpp"

namespace mmsrom {

struct BeamProperties {
    double length = 0.1;             // L [m]
    double thickness = 1e-3;         // h [m]
    double width = 1e-2;             // b [m]
    double rise = 0.0;               // w, midspan rise of the initial arch [m]
    double youngs_modulus = 70e9;    // E [Pa]
    double damping_modulus = 1e8;    // kappa [Pa s]
    double density = 2700.0;         // rho [kg/m^3]
    double thermal_expansion = 23.1e-6;  // alpha_T [1/K]
    int n_elements = 60;

    double area() const { return width * thickness; }
    double inertia() const { return width * thickness * thickness * thickness / 12.0; }
};

/// Shape of the temperature pulse and the slow oscillation of its centre.
struct TemperaturePulse {
    double height = 100.0;  ///< T_c [K]
    double width = 0.02;    ///< p [m]
    double center0 = 0.05;  ///< x0, initial centre [m]
    double amplitude = 0.0; ///< A [m]
};

/// T(x) = T_c sin^2(pi (x - x0)/p) on [x_c - p/2, x_c + p/2], zero elsewhere.
inline double pulse_temperature(double x, double center, const TemperaturePulse& pulse) {
    const double x0 = center - 0.5 * pulse.width;
    const double s = x - x0;
    if (s < 0.0 || s > pulse.width) return 0.0;
    const double v = std::sin(std::numbers::pi * s / pulse.width);
    return pulse.height * v * v;
}

/// x_c(tau) = x0 + A sin(tau).
inline double pulse_center(double tau, const TemperaturePulse& pulse) {
    return pulse.center0 + pulse.amplitude * std::sin(tau);
}

/// d x_c / d tau.
inline double pulse_center_rate(double tau, const TemperaturePulse& pulse) {
    return pulse.amplitude * std::cos(tau);
}

enum class Kinematics {
    nonlinear,  ///< full von Kármán strain
    linear,     ///< f(u) = f(0, T) + K_t(0, T) u
};

namespace detail {

struct GaussRule {
    std::array<double, 4> s{};
    std::array<double, 4> w{};
    int n = 0;
};

inline GaussRule gauss3() {
    const double a = 0.5 * std::sqrt(3.0 / 5.0);
    return {{0.5 - a, 0.5, 0.5 + a, 0.0}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0, 0.0}, 3};
}

inline GaussRule gauss4() {
    const double r = std::sqrt(6.0 / 5.0);
    const double x1 = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * r), x2 = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * r);
    const double w1 = (18.0 + std::sqrt(30.0)) / 36.0, w2 = (18.0 - std::sqrt(30.0)) / 36.0;
    return {{0.5 - 0.5 * x2, 0.5 - 0.5 * x1, 0.5 + 0.5 * x1, 0.5 + 0.5 * x2},
            {0.5 * w2, 0.5 * w1, 0.5 * w1, 0.5 * w2},
            4};
}

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Shape-function rows of one element at local coordinate s in [0, 1].
struct ElementShape {
    Vec6 nu, nw;    // axial / transverse interpolation
    Vec6 bu, gw;    // du/dx, dw/dx
    Vec6 bk;        // d2w/dx2
};

inline ElementShape element_shape(double s, double len) {
    ElementShape e;
    const double s2 = s * s, s3 = s2 * s;
    const double h1 = 1 - 3 * s2 + 2 * s3, h2 = s - 2 * s2 + s3, h3 = 3 * s2 - 2 * s3, h4 = -s2 + s3;
    const double d1 = -6 * s + 6 * s2, d2 = 1 - 4 * s + 3 * s2, d3 = 6 * s - 6 * s2, d4 = -2 * s + 3 * s2;
    const double c1 = -6 + 12 * s, c2 = -4 + 6 * s, c3 = 6 - 12 * s, c4 = -2 + 6 * s;
    e.nu << 1 - s, 0, 0, s, 0, 0;
    e.nw << 0, h1, len * h2, 0, h3, len * h4;
    e.bu << -1 / len, 0, 0, 1 / len, 0, 0;
    e.gw << 0, d1 / len, d2, 0, d3 / len, d4;
    e.bk << 0, c1 / (len * len), c2 / len, 0, c3 / (len * len), c4 / len;
    return e;
}

}  // namespace detail

class BeamModel final : public SecondOrderModel {
public:
    static constexpr int kDofPerNode = 3;
    enum Component { axial = 0, transverse = 1, rotation = 2 };

    BeamModel(BeamProperties props, TemperaturePulse pulse, Kinematics kin = Kinematics::nonlinear)
        : props_(props), pulse_(pulse), kin_(kin) {
        if (props_.n_elements < 2) throw ContractError("beam needs at least 2 elements");
        if (!(props_.length > 0 && props_.thickness > 0 && props_.width > 0 && props_.youngs_modulus > 0 &&
              props_.density > 0 && props_.rise >= 0 && props_.damping_modulus >= 0))
            throw ContractError("beam properties must be positive (rise, damping >= 0)");
        if (!(pulse_.width > 0)) throw ContractError("pulse width must be positive");
        const int nn = props_.n_elements + 1;
        free_.assign(static_cast<size_t>(nn * kDofPerNode), -1);
        Index k = 0;
        for (int node = 1; node < nn - 1; ++node)
            for (int c = 0; c < kDofPerNode; ++c) free_[static_cast<size_t>(node * kDofPerNode + c)] = k++;
        nfree_ = k;
        mass_ = assemble_mass();
        stiffness_cold_ = assemble_cold_stiffness();
        damping_ = (props_.damping_modulus / props_.youngs_modulus) * stiffness_cold_;
    }

    const BeamProperties& properties() const { return props_; }
    const TemperaturePulse& pulse() const { return pulse_; }
    Kinematics kinematics() const { return kin_; }

    Index dof_count() const override { return nfree_; }
    double length_scale() const override { return props_.length; }
    int node_count() const { return props_.n_elements + 1; }
    double node_x(int node) const { return props_.length * node / props_.n_elements; }
    double initial_height(double x) const {
        const double l = props_.length;
        return 4.0 * props_.rise * x * (l - x) / (l * l);
    }
    double initial_slope(double x) const {
        const double l = props_.length;
        return 4.0 * props_.rise * (l - 2.0 * x) / (l * l);
    }

    /// Free-DOF index of (node, component), -1 if constrained.
    Index free_index(int node, int component) const {
        return free_.at(static_cast<size_t>(node * kDofPerNode + component));
    }
    /// Node closest to position x.
    int nearest_node(double x) const {
        return static_cast<int>(std::lround(x / props_.length * props_.n_elements));
    }

    const Matrix& mass() const override { return mass_; }
    /// Kelvin-Voigt damping from the cold reference configuration; independent of T.
    Matrix damping(TemperatureParam) const override { return damping_; }
    const Matrix& damping_matrix() const { return damping_; }
    /// Tangent at u = 0, T = 0 (linear elastic stiffness of the reference shape).
    const Matrix& cold_stiffness() const { return stiffness_cold_; }

    Vector internal_force(const Vector& u, TemperatureParam center) const override {
        Vector f;
        assemble(u, center, &f, nullptr);
        return f;
    }
    Matrix tangent_stiffness(const Vector& u, TemperatureParam center) const override {
        Matrix k;
        assemble(u, center, nullptr, &k);
        return k;
    }
    void force_and_tangent(const Vector& u, TemperatureParam center, Vector& f, Matrix& k) const override {
        assemble(u, center, &f, &k);
    }

    /// Stored elastic energy (thermal strain included) for energy checks.
    double strain_energy(const Vector& u, TemperatureParam center) const {
        check(u);
        if (kin_ == Kinematics::linear) {
            const Vector b = internal_force(Vector::Zero(nfree_), center);
            return b.dot(u) + 0.5 * u.dot(tangent_stiffness(Vector::Zero(nfree_), center) * u);
        }
        const double ea = props_.youngs_modulus * props_.area();
        const double ei = props_.youngs_modulus * props_.inertia();
        const auto rule = detail::gauss3();
        double energy = 0.0;
        for (int e = 0; e < props_.n_elements; ++e) {
            const detail::Vec6 ue = gather(u, e);
            const double xa = node_x(e), len = node_x(e + 1) - xa;
            for (int g = 0; g < rule.n; ++g) {
                const auto sh = detail::element_shape(rule.s[g], len);
                const double x = xa + rule.s[g] * len;
                const double wp = sh.gw.dot(ue);
                const double strain = sh.bu.dot(ue) + initial_slope(x) * wp + 0.5 * wp * wp -
                                      props_.thermal_expansion * pulse_temperature(x, center, pulse_);
                const double kap = sh.bk.dot(ue);
                energy += rule.w[g] * len * 0.5 * (ea * strain * strain + ei * kap * kap);
            }
        }
        return energy;
    }

    /// Consistent nodal load of a uniform transverse line load [N/m].
    Vector uniform_transverse_load(double density) const {
        Vector f = Vector::Zero(nfree_);
        const auto rule = detail::gauss4();
        for (int e = 0; e < props_.n_elements; ++e) {
            const double len = node_x(e + 1) - node_x(e);
            detail::Vec6 fe = detail::Vec6::Zero();
            for (int g = 0; g < rule.n; ++g) fe += rule.w[g] * len * density * detail::element_shape(rule.s[g], len).nw;
            scatter(f, e, fe);
        }
        return f;
    }

    /// Expand a free-DOF vector to all nodes (constrained entries zero).
    Vector expand(const Vector& u) const {
        check(u);
        Vector full = Vector::Zero(static_cast<Index>(free_.size()));
        for (size_t i = 0; i < free_.size(); ++i)
            if (free_[i] >= 0) full(static_cast<Index>(i)) = u(free_[i]);
        return full;
    }

    /// Mass matrix over all DOFs before constraint reduction.
    Matrix unconstrained_mass() const { return assemble_mass_full(); }

private:
    void check(const Vector& u) const {
        if (u.size() != nfree_)
            throw ContractError("beam: displacement has " + std::to_string(u.size()) + " entries, expected " +
                                std::to_string(nfree_));
    }

    detail::Vec6 gather(const Vector& u, int e) const {
        detail::Vec6 ue;
        for (int a = 0; a < 6; ++a) {
            const Index g = free_[static_cast<size_t>(e * kDofPerNode + a)];
            ue(a) = g >= 0 ? u(g) : 0.0;
        }
        return ue;
    }
    void scatter(Vector& f, int e, const detail::Vec6& fe) const {
        for (int a = 0; a < 6; ++a) {
            const Index g = free_[static_cast<size_t>(e * kDofPerNode + a)];
            if (g >= 0) f(g) += fe(a);
        }
    }
    void scatter(Matrix& k, int e, const detail::Mat6& ke) const {
        for (int a = 0; a < 6; ++a) {
            const Index ga = free_[static_cast<size_t>(e * kDofPerNode + a)];
            if (ga < 0) continue;
            for (int b = 0; b < 6; ++b) {
                const Index gb = free_[static_cast<size_t>(e * kDofPerNode + b)];
                if (gb >= 0) k(ga, gb) += ke(a, b);
            }
        }
    }

    // Element loop; fixed element order so results are bit-reproducible.
    void assemble(const Vector& u, double center, Vector* f, Matrix* k) const {
        check(u);
        if (f) f->setZero(nfree_);
        if (k) k->setZero(nfree_, nfree_);
        const bool linear = kin_ == Kinematics::linear;
        const double ea = props_.youngs_modulus * props_.area();
        const double ei = props_.youngs_modulus * props_.inertia();
        const auto rule = detail::gauss3();
        for (int e = 0; e < props_.n_elements; ++e) {
            const detail::Vec6 ue = gather(u, e);
            const double xa = node_x(e), len = node_x(e + 1) - xa;
            detail::Vec6 fe = detail::Vec6::Zero();
            detail::Mat6 ke = detail::Mat6::Zero();
            for (int g = 0; g < rule.n; ++g) {
                const auto sh = detail::element_shape(rule.s[g], len);
                const double x = xa + rule.s[g] * len;
                const double dx = rule.w[g] * len;
                const double z0p = initial_slope(x);
                const double thermal = props_.thermal_expansion * pulse_temperature(x, center, pulse_);
                if (linear) {
                    const detail::Vec6 be = sh.bu + z0p * sh.gw;
                    const double n0 = -ea * thermal;
                    const detail::Mat6 k0 = ea * be * be.transpose() + n0 * sh.gw * sh.gw.transpose() +
                                            ei * sh.bk * sh.bk.transpose();
                    if (f) fe += dx * (n0 * be + k0 * ue);
                    if (k) ke += dx * k0;
                } else {
                    const double wp = sh.gw.dot(ue);
                    const double strain = sh.bu.dot(ue) + z0p * wp + 0.5 * wp * wp;
                    const double axial = ea * (strain - thermal);
                    const double moment = ei * sh.bk.dot(ue);
                    const detail::Vec6 be = sh.bu + (z0p + wp) * sh.gw;
                    if (f) fe += dx * (axial * be + moment * sh.bk);
                    if (k)
                        ke += dx * (ea * be * be.transpose() + axial * sh.gw * sh.gw.transpose() +
                                    ei * sh.bk * sh.bk.transpose());
                }
            }
            if (f) scatter(*f, e, fe);
            if (k) scatter(*k, e, ke);
        }
    }

    // reference-configuration elastic stiffness, no thermal stress
    Matrix assemble_cold_stiffness() const {
        const double ea = props_.youngs_modulus * props_.area();
        const double ei = props_.youngs_modulus * props_.inertia();
        const auto rule = detail::gauss3();
        Matrix k = Matrix::Zero(nfree_, nfree_);
        for (int e = 0; e < props_.n_elements; ++e) {
            const double xa = node_x(e), len = node_x(e + 1) - xa;
            detail::Mat6 ke = detail::Mat6::Zero();
            for (int g = 0; g < rule.n; ++g) {
                const auto sh = detail::element_shape(rule.s[g], len);
                const detail::Vec6 be = sh.bu + initial_slope(xa + rule.s[g] * len) * sh.gw;
                ke += rule.w[g] * len * (ea * be * be.transpose() + ei * sh.bk * sh.bk.transpose());
            }
            scatter(k, e, ke);
        }
        return k;
    }

    detail::Mat6 element_mass(double len) const {
        const double rho_a = props_.density * props_.area();
        const auto rule = detail::gauss4();  // exact for the cubic x cubic product
        detail::Mat6 me = detail::Mat6::Zero();
        for (int g = 0; g < rule.n; ++g) {
            const auto sh = detail::element_shape(rule.s[g], len);
            me += rule.w[g] * len * rho_a * (sh.nu * sh.nu.transpose() + sh.nw * sh.nw.transpose());
        }
        return me;
    }

    Matrix assemble_mass() const {
        Matrix m = Matrix::Zero(nfree_, nfree_);
        for (int e = 0; e < props_.n_elements; ++e) scatter(m, e, element_mass(node_x(e + 1) - node_x(e)));
        return m;
    }

    Matrix assemble_mass_full() const {
        const Index nd = static_cast<Index>(free_.size());
        Matrix m = Matrix::Zero(nd, nd);
        for (int e = 0; e < props_.n_elements; ++e) {
            const auto me = element_mass(node_x(e + 1) - node_x(e));
            m.block<6, 6>(e * kDofPerNode, e * kDofPerNode) += me;
        }
        return m;
    }

    BeamProperties props_;
    TemperaturePulse pulse_;
    Kinematics kin_;
    std::vector<Index> free_;
    Index nfree_ = 0;
    Matrix mass_;
    Matrix stiffness_cold_;
    Matrix damping_;
};

}  // namespace mmsrom
