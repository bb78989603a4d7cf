#pragma once

#include "diracqed/constants.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace diracqed {

/// omega21 = 2 pi c / lambda21.
inline double transition_frequency(double lambda21) {
    if (!(lambda21 > 0.0)) throw std::domain_error("transition_frequency: wavelength must be positive");
    return 2.0 * std::numbers::pi * constants.c / lambda21;
}

/// Two-level emitter at the cavity center (r0 = 0), dipole in the mode plane.
struct EmitterSpec {
    double lambda21 = 0.0;  // transition wavelength (m)
    double omega21 = 0.0;   // transition frequency (rad/s)
    double d21 = 0.0;       // transition dipole magnitude (C m)
    double dipole_axis_x = 1.0;
    double dipole_axis_y = 0.0;
    double theta_a = 0.0;   // initial-state polar angle (rad)
    double phi_a = 0.0;     // initial-state phase (rad)

    static EmitterSpec from_wavelength(double lambda21, double d21,
                                       double theta_a, double phi_a,
                                       double axis_x = 1.0, double axis_y = 0.0) {
        EmitterSpec e;
        e.lambda21 = lambda21;
        e.omega21 = transition_frequency(lambda21);
        e.d21 = d21;
        e.theta_a = theta_a;
        e.phi_a = phi_a;
        e.dipole_axis_x = axis_x;
        e.dipole_axis_y = axis_y;
        e.validate();
        return e;
    }

    static EmitterSpec from_frequency(double omega21, double d21,
                                      double theta_a, double phi_a,
                                      double axis_x = 1.0, double axis_y = 0.0) {
        if (!(omega21 > 0.0)) throw std::domain_error("EmitterSpec: omega21 must be positive");
        EmitterSpec e;
        e.omega21 = omega21;
        e.lambda21 = 2.0 * std::numbers::pi * constants.c / omega21;
        e.d21 = d21;
        e.theta_a = theta_a;
        e.phi_a = phi_a;
        e.dipole_axis_x = axis_x;
        e.dipole_axis_y = axis_y;
        e.validate();
        return e;
    }

    void validate() const {
        if (d21 < 0.0) throw std::invalid_argument("EmitterSpec: d21 must be non-negative");
        const double an = std::hypot(dipole_axis_x, dipole_axis_y);
        if (std::abs(an - 1.0) > 1e-9) throw std::invalid_argument("EmitterSpec: dipole_axis must be a unit vector");
        if (theta_a < 0.0 || theta_a > std::numbers::pi / 2.0 + 1e-12) {
            throw std::invalid_argument("EmitterSpec: theta_a must lie in [0, pi/2]");
        }
    }
};

/// Coupled-cavity count and single-cavity effective mode volume.
struct SystemSpec {
    int Nc = 1;      // number of coupled cavities
    double V = 0.0;  // effective mode volume (m^3)

    SystemSpec(int Nc_, double V_) : Nc(Nc_), V(V_) {
        if (Nc < 1) throw std::invalid_argument("SystemSpec: Nc must be a positive integer");
        if (!(V > 0.0)) throw std::invalid_argument("SystemSpec: mode volume must be positive");
    }
};

/// Per-mode Rabi magnitude:
/// |g| = (omega21/hbar) sqrt(hbar / (2 eps0 Omega Nc V)) sqrt(b_sq) overlap d21.
/// The dipole-parallel-to-mode-1 alignment corresponds to overlap = 1.
inline double rabi_magnitude(const EmitterSpec& emitter, const SystemSpec& system,
                             double Omega, double b_sq, double polarization_overlap) {
    if (!(Omega > 0.0)) throw std::domain_error("rabi_magnitude: mode frequency must be positive");
    if (b_sq < 0.0) throw std::domain_error("rabi_magnitude: |b|^2 must be non-negative");
    if (polarization_overlap < 0.0 || polarization_overlap > 1.0) {
        throw std::domain_error("rabi_magnitude: polarization overlap must lie in [0,1]");
    }
    const double root = std::sqrt(constants.hbar /
                                  (2.0 * constants.epsilon0 * Omega * system.Nc * system.V));
    return emitter.omega21 / constants.hbar * root * std::sqrt(b_sq) * polarization_overlap * emitter.d21;
}

} // namespace diracqed
