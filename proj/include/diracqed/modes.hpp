#pragma once

#include "diracqed/angular_profile.hpp"
#include "diracqed/dirac_cone.hpp"
#include "diracqed/emitter.hpp"
#include "diracqed/lattice.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace diracqed {

/// One point of the midpoint-rule polar grid on the disc.
struct DiscPoint {
    double kappa = 0.0;  // radial distance from K (1/m)
    double phi = 0.0;    // azimuth (rad)
    double weight = 0.0; // k-space cell area (1/m^2)
};

/// Midpoint-rule polar grid over a disc of radius delta_kappa.
/// The weights partition the disc area pi delta_kappa^2 exactly up to
/// rounding, and no point sits at the apex kappa = 0.
inline std::vector<DiscPoint> sample_disc(double delta_kappa, int n_radial, int n_azimuthal) {
    if (!(delta_kappa > 0.0)) throw std::invalid_argument("sample_disc: delta_kappa must be positive");
    if (n_radial < 1 || n_azimuthal < 1) throw std::invalid_argument("sample_disc: grid counts must be >= 1");
    const double dr = delta_kappa / n_radial;
    const double dphi = 2.0 * std::numbers::pi / n_azimuthal;
    std::vector<DiscPoint> pts;
    pts.reserve(static_cast<std::size_t>(n_radial) * static_cast<std::size_t>(n_azimuthal));
    for (int i = 0; i < n_radial; ++i) {
        const double r = (i + 0.5) * dr;
        for (int j = 0; j < n_azimuthal; ++j) {
            pts.push_back({r, (j + 0.5) * dphi, r * dr * dphi});
        }
    }
    return pts;
}

/// One discretized Dirac mode.
struct Mode {
    double kappa = 0.0;  // radial offset from K (1/m)
    double phi = 0.0;    // azimuth (rad)
    int band = 0;        // 1 = lower cone, 2 = upper cone
    double Omega = 0.0;  // mode frequency (rad/s)
    double Delta = 0.0;  // detuning Omega - omega21 (rad/s)
    double g = 0.0;      // coupling magnitude (rad/s); phases are zero by convention
    double weight = 0.0; // k-space cell area (1/m^2)
};

struct ModeSetProvenance {
    DiracCone cone;
    EmitterSpec emitter;
    SystemSpec system;
    int n_radial = 0;
    int n_azimuthal = 0;
};

/// Discretized bath: the S' disc sampled once per band. The K/K' disc
/// multiplicity is already carried by the closed-form kernel normalization
/// this set is built to reproduce (see kernels.hpp), so the weights of each
/// band sum to pi delta_kappa^2.
struct ModeSet {
    std::vector<Mode> modes;
    ModeSetProvenance provenance;

    double total_weight() const {
        double w = 0.0;
        for (const auto& m : modes) w += m.weight;
        return w;
    }

    double coupling_sq_sum() const {
        double s = 0.0;
        for (const auto& m : modes) s += m.g * m.g;
        return s;
    }
};

/// Discrete image of the continuum bath: for each disc point and band,
/// |g_j|^2 = [S/(2 pi)^2] w_j (omega21^2 d21^2 / (2 hbar eps0 Omega_j Nc V)) |b_p(phi_j)|^2.
inline ModeSet build_mode_set(const DiracCone& cone,
                              const LatticeSpec& lat,
                              const EmitterSpec& emitter,
                              const SystemSpec& system,
                              const AngularProfile& profile,
                              int n_radial, int n_azimuthal) {
    if (!(cone.slope * cone.delta_kappa < cone.omega_D)) {
        throw std::invalid_argument("build_mode_set: lower band reaches zero on the disc");
    }
    const auto pts = sample_disc(cone.delta_kappa, n_radial, n_azimuthal);
    ModeSet set{{}, {cone, emitter, system, n_radial, n_azimuthal}};
    set.modes.resize(2 * pts.size());
    const double cell_factor = lat.S / (4.0 * std::numbers::pi * std::numbers::pi);

    const auto np = static_cast<long>(pts.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long idx = 0; idx < np; ++idx) {
        const auto& p = pts[static_cast<std::size_t>(idx)];
        for (int band = 1; band <= 2; ++band) {
            const double Omega = linearized_frequency(cone, p.kappa, band);
            const double b_sq = profile(p.phi, band);
            const double g1 = rabi_magnitude(emitter, system, Omega, b_sq, 1.0);
            Mode m;
            m.kappa = p.kappa;
            m.phi = p.phi;
            m.band = band;
            m.Omega = Omega;
            m.Delta = Omega - emitter.omega21;
            m.weight = p.weight;
            m.g = g1 * std::sqrt(cell_factor * p.weight);
            set.modes[static_cast<std::size_t>(idx) * 2 + static_cast<std::size_t>(band - 1)] = m;
        }
    }
    return set;
}

/// Discrete resolvent sum over the whole set, sum_j |g_j|^2 / (s + i Delta_j).
inline cplx discrete_kernel_sum(const ModeSet& set, cplx s) {
    cplx acc{0.0, 0.0};
    for (const auto& m : set.modes) {
        acc += m.g * m.g / (s + cplx{0.0, 1.0} * m.Delta);
    }
    return acc;
}

/// CSV export, one row per mode: "kappa,phi,band,omega,delta,g_abs,weight".
inline void write_mode_set_csv(const ModeSet& set, std::ostream& out) {
    out << "kappa,phi,band,omega,delta,g_abs,weight\n";
    char buf[40];
    for (const auto& m : set.modes) {
        const double cols[6] = {m.kappa, m.phi, m.Omega, m.Delta, m.g, m.weight};
        std::snprintf(buf, sizeof(buf), "%.17g", cols[0]);
        out << buf;
        std::snprintf(buf, sizeof(buf), "%.17g", cols[1]);
        out << ',' << buf << ',' << m.band;
        for (int c = 2; c < 6; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", cols[c]);
            out << ',' << buf;
        }
        out << "\n";
    }
}

} // namespace diracqed
