#pragma once

#include "diracqed/constants.hpp"
#include "diracqed/dirac_cone.hpp"
#include "diracqed/emitter.hpp"
#include "diracqed/lattice.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace diracqed {

/// Parameters of the memory kernel. chi21 combines dipole, lattice area and
/// mode-volume factors; chi21/alpha^2 is the collective coupling scale (rad/s).
struct KernelParams {
    // primitives
    double a = 0.0;        // supercell lattice constant (m)
    double omega21 = 0.0;  // emitter transition frequency (rad/s)
    double d21 = 0.0;      // transition dipole (C m)
    int Nc = 1;
    double V = 0.0;        // mode volume (m^3)
    // cone
    double omega_D = 0.0;
    double alpha = 0.0;
    double delta_kappa = 0.0;
    double Delta_D = 0.0;  // omega_D - omega21
    // derived
    double chi21 = 0.0;    // sqrt(3) a^2 omega21^2 d21^2 / (4 pi hbar eps0 Nc V)

    static KernelParams build(const LatticeSpec& lat, const DiracCone& cone,
                              const EmitterSpec& emitter, const SystemSpec& system) {
        KernelParams p;
        p.a = lat.a;
        p.omega21 = emitter.omega21;
        p.d21 = emitter.d21;
        p.Nc = system.Nc;
        p.V = system.V;
        p.omega_D = cone.omega_D;
        p.alpha = cone.slope;
        p.delta_kappa = cone.delta_kappa;
        p.Delta_D = cone.omega_D - emitter.omega21;
        p.chi21 = chi21_of(p);
        p.validate();
        return p;
    }

    static double chi21_of(const KernelParams& p) {
        return std::numbers::sqrt3 * p.a * p.a * p.omega21 * p.omega21 * p.d21 * p.d21 /
               (4.0 * std::numbers::pi * constants.hbar * constants.epsilon0 * p.Nc * p.V);
    }

    void validate() const {
        if (!(alpha > 0.0) || !(delta_kappa > 0.0) || !(omega_D > 0.0)) {
            throw std::invalid_argument("KernelParams: cone parameters must be positive");
        }
        if (!(alpha * delta_kappa < omega_D)) {
            throw std::invalid_argument("KernelParams: alpha*delta_kappa must stay below omega_D");
        }
        const double ref = chi21_of(*this);
        if (std::abs(chi21 - ref) > 1e-12 * std::max(std::abs(ref), 1e-300)) {
            throw std::invalid_argument("KernelParams: chi21 inconsistent with primitive parameters");
        }
        if (d21 > 0.0 && !(std::isfinite(chi21 / (alpha * alpha)) && chi21 > 0.0)) {
            throw std::invalid_argument("KernelParams: collective scale chi21/alpha^2 must be finite and positive");
        }
    }

    double collective_scale() const { return chi21 / (alpha * alpha); }
};

namespace detail {

inline void require_right_half_plane(cplx s, const char* who) {
    if (!(std::real(s) > 0.0)) {
        throw std::domain_error(std::string(who) + ": kernel evaluation requires Re(s) > 0");
    }
}

/// Principal-branch complex arctan, (i/2)[ln(1 - iz) - ln(1 + iz)].
inline cplx arctan_principal(cplx z) {
    const cplx i{0.0, 1.0};
    return 0.5 * i * (std::log(1.0 - i * z) - std::log(1.0 + i * z));
}

/// chi21 * integral_0^dk  kappa / ((omega_D -/+ alpha kappa)(s + i(Delta_D -/+ alpha kappa))) dkappa
/// for the lower (sign = -1) and upper (sign = +1) cone. Valid for any Delta_D.
inline cplx kernel_quadrature(cplx s, const KernelParams& p, int sign) {
    require_right_half_plane(s, "kernel_quadrature");
    const double sg = static_cast<double>(sign);
    auto f = [&](double k) -> cplx {
        const double Om = p.omega_D + sg * p.alpha * k;
        const cplx den = s + cplx{0.0, 1.0} * (p.Delta_D + sg * p.alpha * k);
        return k / (Om * den);
    };
    using boost::math::quadrature::gauss_kronrod;
    auto fre = [&](double k) { return std::real(f(k)); };
    auto fim = [&](double k) { return std::imag(f(k)); };
    const double re = gauss_kronrod<double, 15>::integrate(fre, 0.0, p.delta_kappa, 15, 1e-12);
    const double im = gauss_kronrod<double, 15>::integrate(fim, 0.0, p.delta_kappa, 15, 1e-12);
    return p.chi21 * cplx{re, im};
}

} // namespace detail

/// Lower-cone kernel. Closed form at Delta_D = 0 with principal branches;
/// nonzero Delta_D routes to adaptive quadrature of the radial integral.
inline cplx kernel_lower(cplx s, const KernelParams& p) {
    detail::require_right_half_plane(s, "kernel_lower");
    if (p.Delta_D != 0.0) return detail::kernel_quadrature(s, p, -1);
    const cplx i{0.0, 1.0};
    const double adk = p.alpha * p.delta_kappa;
    const cplx brace = 2.0 * p.omega_D * std::log(p.omega_D / (p.omega_D - adk)) +
                       s * (-2.0 * detail::arctan_principal(adk / s) +
                            i * std::log(s * s / (s * s + adk * adk)));
    return p.collective_scale() / (2.0 * (s - i * p.omega_D)) * brace;
}

/// Upper-cone kernel: (omega_D + alpha dk) logs and the +arctan sign.
inline cplx kernel_upper(cplx s, const KernelParams& p) {
    detail::require_right_half_plane(s, "kernel_upper");
    if (p.Delta_D != 0.0) return detail::kernel_quadrature(s, p, +1);
    const cplx i{0.0, 1.0};
    const double adk = p.alpha * p.delta_kappa;
    const cplx brace = 2.0 * p.omega_D * std::log(p.omega_D / (p.omega_D + adk)) +
                       s * (+2.0 * detail::arctan_principal(adk / s) +
                            i * std::log(s * s / (s * s + adk * adk)));
    return p.collective_scale() / (2.0 * (s - i * p.omega_D)) * brace;
}

/// Combined kernel over both cones. Equals kernel_lower + kernel_upper; at
/// Delta_D = 0 the arctan terms cancel and the combined closed form is used.
inline cplx kernel_total(cplx s, const KernelParams& p) {
    detail::require_right_half_plane(s, "kernel_total");
    if (p.Delta_D != 0.0) {
        return detail::kernel_quadrature(s, p, -1) + detail::kernel_quadrature(s, p, +1);
    }
    const cplx i{0.0, 1.0};
    const double adk = p.alpha * p.delta_kappa;
    const cplx num = p.omega_D * std::log(p.omega_D * p.omega_D / (p.omega_D * p.omega_D - adk * adk)) +
                     i * s * std::log(s * s / (s * s + adk * adk));
    return p.collective_scale() * num / (s - i * p.omega_D);
}

/// Laplace image of the excited-state amplitude, C2(s) = c2(0) / (s + K(s)).
inline cplx c2_laplace(cplx s, const KernelParams& p, cplx c2_0) {
    detail::require_right_half_plane(s, "c2_laplace");
    return c2_0 / (s + kernel_total(s, p));
}

} // namespace diracqed
