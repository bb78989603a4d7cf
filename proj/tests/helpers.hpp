#pragma once

// Shared fixtures and independent numerical oracles for the test suites.
// Oracles here must not reuse the library's evaluation path for the same
// quantity: quadrature is adaptive Simpson (the library uses Gauss-Kronrod),
// eigenvalues come from Eigen in the suites that need them.

#include "diracqed/constants.hpp"
#include "diracqed/dirac_cone.hpp"
#include "diracqed/emitter.hpp"
#include "diracqed/kernels.hpp"
#include "diracqed/lattice.hpp"
#include "diracqed/modes.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <random>

namespace testhelpers {

using diracqed::cplx;

struct Fig5Setup {
    diracqed::LatticeSpec lattice;
    diracqed::EmitterSpec emitter;
    diracqed::SystemSpec system;
    diracqed::DiracCone cone;
    diracqed::KernelParams kernel;
};

/// The reference run: Fig.5 pinned values (d21 = 100 Debye, lambda21 = 1.55 um,
/// Omega_D = omega21, delta_kappa = GammaK/10, alpha = 5.38e7 m/s, Nc = 7,
/// theta_a = 90 deg) with the synthetic config choices a = 1 um and
/// V = 1.5e-26 m^3 that place the run in the collective-coupling regime.
inline Fig5Setup fig5_setup(double V = 1.5e-26, double a = 1e-6) {
    using namespace diracqed;
    Fig5Setup s{
        LatticeSpec::triangular(a),
        EmitterSpec::from_wavelength(1.55e-6, debye_to_si(100.0), std::numbers::pi / 2.0, 0.0),
        SystemSpec(7, V),
        DiracCone(1.0, 1.0, 0.1, {}), // placeholder, rebuilt below
        KernelParams{}};
    const double dk = gamma_k_distance(s.lattice) / 10.0;
    s.cone = DiracCone(s.emitter.omega21, 5.38e7, dk, k_point_K(s.lattice));
    s.kernel = KernelParams::build(s.lattice, s.cone, s.emitter, s.system);
    return s;
}

/// Adaptive Simpson quadrature for complex integrands (test oracle).
inline cplx adaptive_simpson(const std::function<cplx(double)>& f, double a, double b,
                             double tol = 1e-12, int max_depth = 40) {
    struct Rec {
        const std::function<cplx(double)>& f;
        int max_depth;
        cplx run(double a, double b, cplx fa, cplx fm, cplx fb, cplx whole, double tol, int depth) {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const cplx flm = f(lm), frm = f(rm);
            const cplx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const cplx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth >= max_depth || std::abs(left + right - whole) < 15.0 * tol) {
                return left + right + (left + right - whole) / 15.0;
            }
            return run(a, m, fa, flm, fm, left, tol / 2.0, depth + 1) +
                   run(m, b, fm, frm, fb, right, tol / 2.0, depth + 1);
        }
    } rec{f, max_depth};
    const cplx fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return rec.run(a, b, fa, fm, fb, whole, tol, 0);
}

/// Radial kernel integrand for band sign = -1 (lower) or +1 (upper),
/// written independently of the library closed forms. Two passes: a rough
/// estimate sets the scale, the second pass integrates to a relative target.
inline cplx kernel_integral_oracle(cplx s, const diracqed::KernelParams& p, int sign,
                                   double rel_tol = 1e-11) {
    const double sg = sign;
    auto f = [&](double k) -> cplx {
        const double Om = p.omega_D + sg * p.alpha * k;
        return k / (Om * (s + cplx{0.0, 1.0} * (p.Delta_D + sg * p.alpha * k)));
    };
    const double rough_scale = p.delta_kappa * p.delta_kappa /
                               (p.omega_D * std::max(std::abs(s), p.alpha * p.delta_kappa));
    const cplx rough = adaptive_simpson(f, 0.0, p.delta_kappa, 1e-4 * rough_scale, 48);
    const cplx fine = adaptive_simpson(f, 0.0, p.delta_kappa, rel_tol * std::abs(rough), 48);
    return p.chi21 * fine;
}

/// Fixed-seed generator for reproducible random suites.
inline std::mt19937& rng() {
    static std::mt19937 gen(20240817u);
    return gen;
}

inline double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng());
}

/// Random s with Re(s) > 0, |s| log-uniform across the given decades.
inline cplx random_right_half_s(double scale, double decades_lo, double decades_hi) {
    const double mag = scale * std::pow(10.0, uniform(decades_lo, decades_hi));
    const double arg = uniform(-0.45 * std::numbers::pi, 0.45 * std::numbers::pi);
    return std::polar(mag, arg);
}

} // namespace testhelpers
