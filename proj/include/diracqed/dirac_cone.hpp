#pragma once

#include "diracqed/lattice.hpp"
#include "diracqed/tight_binding.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace diracqed {

struct ConeFitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Linearized bath dispersion around the zone corner:
/// Omega_p(kappa) = omega_D -/+ slope * kappa on a disc of radius delta_kappa.
struct DiracCone {
    double omega_D = 0.0;     // apex frequency (rad/s)
    double slope = 0.0;       // cone gradient (m/s)
    double delta_kappa = 0.0; // disc radius (1/m)
    Vec2 K{};                 // zone corner the disc is centered on

    DiracCone(double omega_D_, double slope_, double delta_kappa_, Vec2 K_ = {})
        : omega_D(omega_D_), slope(slope_), delta_kappa(delta_kappa_), K(K_) {
        if (!(slope > 0.0)) throw std::invalid_argument("DiracCone: slope must be positive");
        if (!(delta_kappa > 0.0)) throw std::invalid_argument("DiracCone: delta_kappa must be positive");
        if (!(slope * delta_kappa < omega_D)) {
            throw std::invalid_argument("DiracCone: slope*delta_kappa must stay below omega_D "
                                        "(lower band would reach zero on the disc)");
        }
    }
};

/// Frequency of band p (1 = lower, 2 = upper) at radial distance kappa from K.
inline double linearized_frequency(const DiracCone& cone, double kappa_radial, int band) {
    if (kappa_radial < 0.0 || kappa_radial > cone.delta_kappa) {
        throw std::out_of_range("linearized_frequency: kappa outside [0, delta_kappa]");
    }
    if (band == 1) return cone.omega_D - cone.slope * kappa_radial;
    if (band == 2) return cone.omega_D + cone.slope * kappa_radial;
    throw std::invalid_argument("linearized_frequency: band must be 1 or 2");
}

struct ConeFitResult {
    DiracCone cone;
    double max_residual = 0.0;   // rad/s, worst |omega - fit|
    bool residual_warning = false;
};

struct ConeSample {
    double kappa = 0.0;
    double omega1 = 0.0;
    double omega2 = 0.0;
};

struct ConeLineFit {
    double slope = 0.0;
    double max_residual = 0.0;
};

/// Least-squares slope of omega_p(kappa) ~ omega_D -/+ slope*kappa with the
/// apex pinned; minimizes both bands' residuals jointly.
inline ConeLineFit fit_cone_samples(const std::vector<ConeSample>& samples, double omega_D) {
    if (samples.empty()) throw std::invalid_argument("fit_cone_samples: no samples");
    double skk = 0.0, sko = 0.0;
    for (const auto& s : samples) {
        skk += 2.0 * s.kappa * s.kappa;
        sko += s.kappa * ((s.omega2 - omega_D) - (s.omega1 - omega_D));
    }
    ConeLineFit fit;
    fit.slope = sko / skk;
    for (const auto& s : samples) {
        fit.max_residual = std::max(fit.max_residual,
                                    std::abs(s.omega1 - (omega_D - fit.slope * s.kappa)));
        fit.max_residual = std::max(fit.max_residual,
                                    std::abs(s.omega2 - (omega_D + fit.slope * s.kappa)));
    }
    return fit;
}

/// Linear cone fit over radial samples around K. omega_D is pinned to the
/// band mean at K; the bands must be degenerate there within degeneracy_tol
/// (relative to nu).
inline ConeFitResult fit_dirac_cone(const TightBindingModel& model,
                                    const LatticeSpec& lat,
                                    const Vec2& K,
                                    double fit_radius,
                                    int n_radial,
                                    int n_directions = 12,
                                    double degeneracy_tol = 1e-6,
                                    double residual_warn_fraction = 0.01) {
    if (!(fit_radius > 0.0) || n_radial < 1 || n_directions < 1) {
        throw std::invalid_argument("fit_dirac_cone: invalid sampling parameters");
    }
    const auto atK = solve_supercell_bands(model, lat, K);
    const double gap = atK[1].omega - atK[0].omega;
    if (gap > degeneracy_tol * model.nu()) {
        throw ConeFitError("fit_dirac_cone: bands not degenerate at K (gap " +
                           std::to_string(gap) + " rad/s exceeds tolerance)");
    }
    const double omega_D = 0.5 * (atK[0].omega + atK[1].omega);

    std::vector<ConeSample> samples;
    samples.reserve(static_cast<std::size_t>(n_radial) * static_cast<std::size_t>(n_directions));
    for (int d = 0; d < n_directions; ++d) {
        const double phi = 2.0 * std::numbers::pi * d / n_directions;
        const Vec2 dir{std::cos(phi), std::sin(phi)};
        for (int i = 1; i <= n_radial; ++i) {
            const double k = fit_radius * i / n_radial;
            const auto bands = solve_supercell_bands(model, lat, K + dir * k);
            samples.push_back({k, bands[0].omega, bands[1].omega});
        }
    }
    const auto fit = fit_cone_samples(samples, omega_D);
    if (!(fit.slope > 0.0)) {
        throw ConeFitError("fit_dirac_cone: fitted slope is not positive");
    }
    // a cone must explain far more band spread than it leaves behind;
    // flat (or merely noisy) degenerate bands land here
    if (fit.slope * fit_radius <= 3.0 * fit.max_residual) {
        throw ConeFitError("fit_dirac_cone: no resolvable linear crossing at K "
                           "(fitted spread is comparable to the residual)");
    }
    return ConeFitResult{DiracCone(omega_D, fit.slope, fit_radius, K), fit.max_residual,
                         fit.max_residual > residual_warn_fraction * fit.slope * fit_radius};
}

} // namespace diracqed
