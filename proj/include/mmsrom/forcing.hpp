#pragma once

// Seeded perturbation loading p(t) = l0 sin(w t) + eps l1 a(t) with a(t) a
// low-pass filtered noise signal on the integrator grid.

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <vector>

#include "spectral.hpp"

namespace mmsrom {

namespace detail {

/// FFTW planning is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace detail

struct PerturbationForcing {
    Vector l0;
    Vector l1;
    Vector a;             ///< samples a(k dt), k = 0..N-1, in [0, 1]
    double dt = 0.0;
    double omega_c = 0.0; ///< carrier frequency [rad/s]
    double cutoff = 0.0;  ///< filter cutoff [rad/s]

    /// a(t), linear between samples, held constant past the last sample.
    double noise(double t) const {
        if (a.size() == 0) return 0.0;
        const double x = t / dt;
        if (x <= 0) return a(0);
        const auto i = static_cast<Index>(std::floor(x));
        if (i >= a.size() - 1) return a(a.size() - 1);
        const double s = x - static_cast<double>(i);
        return (1.0 - s) * a(i) + s * a(i + 1);
    }
    Vector leading(double t) const { return l0 * std::sin(omega_c * t); }
    Vector perturbation(double t) const { return l1 * noise(t); }
    Vector total(double t, double eps) const { return leading(t) + eps * perturbation(t); }
};

/// Zero-phase brick-wall low-pass: removes every DFT bin above `cutoff` [rad/s].
inline Vector lowpass_filter(const Vector& x, double dt, double cutoff) {
    const int n = static_cast<int>(x.size());
    if (n == 0) return x;
    std::vector<double> in(x.data(), x.data() + n);
    const int nc = n / 2 + 1;
    fftw_complex* spec = fftw_alloc_complex(static_cast<size_t>(nc));
    std::unique_lock lock(detail::fftw_planner_mutex());
    fftw_plan fwd = fftw_plan_dft_r2c_1d(n, in.data(), spec, FFTW_ESTIMATE);
    lock.unlock();
    fftw_execute(fwd);
    lock.lock();
    fftw_destroy_plan(fwd);
    const double dw = 2.0 * std::numbers::pi / (n * dt);
    for (int k = 0; k < nc; ++k)
        if (k * dw > cutoff) spec[k][0] = spec[k][1] = 0.0;
    std::vector<double> out(static_cast<size_t>(n));
    fftw_plan inv = fftw_plan_dft_c2r_1d(n, spec, out.data(), FFTW_ESTIMATE);
    lock.unlock();
    fftw_execute(inv);
    lock.lock();
    fftw_destroy_plan(inv);
    lock.unlock();
    fftw_free(spec);
    Vector y(n);
    for (int i = 0; i < n; ++i) y(i) = out[static_cast<size_t>(i)] / n;
    return y;
}

/// Fraction of signal power (DC excluded) in DFT bins above `cutoff`.
inline double power_above(const Vector& x, double dt, double cutoff) {
    const int n = static_cast<int>(x.size());
    std::vector<double> in(x.data(), x.data() + n);
    const Vector centered = x.array() - x.mean();
    for (int i = 0; i < n; ++i) in[static_cast<size_t>(i)] = centered(i);
    const int nc = n / 2 + 1;
    fftw_complex* spec = fftw_alloc_complex(static_cast<size_t>(nc));
    std::unique_lock lock(detail::fftw_planner_mutex());
    fftw_plan p = fftw_plan_dft_r2c_1d(n, in.data(), spec, FFTW_ESTIMATE);
    lock.unlock();
    fftw_execute(p);
    lock.lock();
    fftw_destroy_plan(p);
    lock.unlock();
    const double dw = 2.0 * std::numbers::pi / (n * dt);
    double above = 0.0, total = 0.0;
    for (int k = 0; k < nc; ++k) {
        const double pw = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
        total += pw;
        if (k * dw > cutoff) above += pw;
    }
    fftw_free(spec);
    return total > 0 ? above / total : 0.0;
}

/// l1 from uniformly weighted modes (rescaled to |l1| = |l0|) and a(t) from
/// per-step uniform noise, filtered at `cutoff` and rescaled to [0, 1].
inline PerturbationForcing make_perturbation(const Matrix& modes, const Vector& l0, double omega_c, double cutoff,
                                             double dt, Index samples, unsigned seed) {
    if (modes.rows() != l0.size()) throw ContractError("make_perturbation: mode/load dimension mismatch");
    if (!(dt > 0) || samples < 2) throw ContractError("make_perturbation: need dt > 0 and at least 2 samples");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    PerturbationForcing pf;
    pf.l0 = l0;
    pf.dt = dt;
    pf.omega_c = omega_c;
    pf.cutoff = cutoff;
    Vector c(modes.cols());
    for (Index i = 0; i < c.size(); ++i) c(i) = uni(rng);
    pf.l1 = modes * c;
    pf.l1 *= l0.norm() / pf.l1.norm();
    Vector raw(samples);
    for (Index i = 0; i < samples; ++i) raw(i) = uni(rng);
    Vector f = lowpass_filter(raw, dt, cutoff);
    const double lo = f.minCoeff(), hi = f.maxCoeff();
    pf.a = hi > lo ? Vector((f.array() - lo) / (hi - lo)) : Vector(Vector::Zero(samples));
    return pf;
}

}  // namespace mmsrom
