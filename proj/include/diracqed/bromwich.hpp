#pragma once

#include "diracqed/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace diracqed {

struct InversionAccuracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InversionOptions {
    double tolerance = 1e-5;      // requested absolute consistency tolerance
    int gauss_points = 12;        // Gauss-Legendre nodes per panel
    int max_refine_depth = 30;
    double sigma_perturb = 1.15;  // abscissa factor for the consistency rerun
    double moment_scale = 0.0;    // 0: auto, else abscissa for the large-s moment fit
    std::size_t max_panels = 4000000;
};

struct InversionResult {
    std::vector<double> t;
    std::vector<cplx> values;
    std::vector<double> err_est; // sigma-consistency + truncation estimate, absolute
};

namespace detail {

// 12-point Gauss-Legendre nodes/weights on [-1, 1]
inline constexpr std::array<double, 6> gl12_x{0.1252334085114689, 0.3678314989981802,
                                              0.5873179542866175, 0.7699026741943047,
                                              0.9041172563704749, 0.9815606342467192};
inline constexpr std::array<double, 6> gl12_w{0.2491470458134028, 0.2334925365383548,
                                              0.2031674267230659, 0.1600783285433462,
                                              0.1069393259953184, 0.0471753363865118};

struct PanelGrid {
    std::vector<double> omega;
    std::vector<double> weight;
    std::vector<cplx> f; // remainder transform values on the nodes
};

/// Large-s expansion F ~ c0/s + c1/s^2 + c2/s^3, fitted at three real
/// abscissae. The split is exact for any fitted values; the moments only
/// control how fast the remainder decays along the Bromwich line.
struct Moments {
    cplx c0{}, c1{}, c2{};
};

template <class F>
Moments fit_moments(const F& fun, double scale) {
    const double s0 = scale;
    const std::array<double, 3> s{s0, 2.0 * s0, 4.0 * s0};
    std::array<cplx, 3> rhs;
    for (int i = 0; i < 3; ++i) rhs[static_cast<std::size_t>(i)] = fun(cplx{s[static_cast<std::size_t>(i)], 0.0});
    // solve [[1/s,1/s^2,1/s^3]] c = F by elimination in x = 1/s
    std::array<std::array<cplx, 3>, 3> A;
    for (int i = 0; i < 3; ++i) {
        const double x = 1.0 / s[static_cast<std::size_t>(i)];
        A[static_cast<std::size_t>(i)] = {cplx{x}, cplx{x * x}, cplx{x * x * x}};
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                std::abs(A[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)])) piv = r;
        }
        std::swap(A[static_cast<std::size_t>(col)], A[static_cast<std::size_t>(piv)]);
        std::swap(rhs[static_cast<std::size_t>(col)], rhs[static_cast<std::size_t>(piv)]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const cplx f = A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                           A[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
            for (int c = col; c < 3; ++c) {
                A[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    f * A[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
            }
            rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(col)];
        }
    }
    Moments m;
    m.c0 = rhs[0] / A[0][0];
    m.c1 = rhs[1] / A[1][1];
    m.c2 = rhs[2] / A[2][2];
    return m;
}

template <class F>
void refine_panel(const F& frem, double lo, double hi, cplx flo, cplx fhi, double fscale,
                  int depth, int max_depth, PanelGrid& grid, std::size_t max_panels) {
    const double mid = 0.5 * (lo + hi);
    const cplx fmid = frem(mid);
    const double ref = std::max({std::abs(flo), std::abs(fhi), std::abs(fmid)});
    const bool smooth = std::abs(fmid - 0.5 * (flo + fhi)) <= 0.02 * ref + 1e-7 * fscale;
    if (!smooth && depth < max_depth) {
        refine_panel(frem, lo, mid, flo, fmid, fscale, depth + 1, max_depth, grid, max_panels);
        refine_panel(frem, mid, hi, fmid, fhi, fscale, depth + 1, max_depth, grid, max_panels);
        return;
    }
    if (grid.omega.size() > 12 * max_panels) {
        throw InversionAccuracyError("invert_laplace: panel budget exhausted during refinement");
    }
    const double h = 0.5 * (hi - lo);
    const double c = 0.5 * (hi + lo);
    for (int k = 0; k < 6; ++k) {
        for (int sgn : {-1, +1}) {
            grid.omega.push_back(c + sgn * h * gl12_x[static_cast<std::size_t>(k)]);
            grid.weight.push_back(h * gl12_w[static_cast<std::size_t>(k)]);
        }
    }
}

template <class F>
PanelGrid build_grid(const F& frem, double omega_lo, double omega_hi, double base_width,
                     const InversionOptions& opt) {
    const int nseg = std::max(1, static_cast<int>(std::ceil((omega_hi - omega_lo) / base_width)));
    if (static_cast<std::size_t>(nseg) > opt.max_panels) {
        throw InversionAccuracyError("invert_laplace: base panel count exceeds budget; "
                                     "reduce omega_max or enlarge t spacing");
    }
    std::vector<double> edges(static_cast<std::size_t>(nseg) + 1);
    for (int i = 0; i <= nseg; ++i) {
        edges[static_cast<std::size_t>(i)] = omega_lo + (omega_hi - omega_lo) * i / nseg;
    }
    std::vector<cplx> fe(edges.size());
    const auto ne = static_cast<long>(edges.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long i = 0; i < ne; ++i) fe[static_cast<std::size_t>(i)] = frem(edges[static_cast<std::size_t>(i)]);
    double fscale = 0.0;
    for (const auto& v : fe) fscale = std::max(fscale, std::abs(v));

    PanelGrid grid;
    grid.omega.reserve(static_cast<std::size_t>(nseg) * 12);
    grid.weight.reserve(static_cast<std::size_t>(nseg) * 12);
    for (int i = 0; i < nseg; ++i) {
        refine_panel(frem, edges[static_cast<std::size_t>(i)], edges[static_cast<std::size_t>(i) + 1],
                     fe[static_cast<std::size_t>(i)], fe[static_cast<std::size_t>(i) + 1], fscale, 0,
                     opt.max_refine_depth, grid, opt.max_panels);
    }
    grid.f.resize(grid.omega.size());
    const auto nn = static_cast<long>(grid.omega.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long i = 0; i < nn; ++i) grid.f[static_cast<std::size_t>(i)] = frem(grid.omega[static_cast<std::size_t>(i)]);
    return grid;
}

/// exp(sigma t)/(2 pi) * integral of f_rem(omega) e^{i omega t} over the grid.
inline cplx grid_sum(const PanelGrid& g, double sigma, double t) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < g.omega.size(); ++i) {
        acc += g.weight[i] * g.f[i] * std::polar(1.0, g.omega[i] * t);
    }
    return std::exp(sigma * t) / (2.0 * std::numbers::pi) * acc;
}

} // namespace detail

/// Numerical Bromwich inversion,
///   c(t) = (e^{sigma t} / 2 pi) Integral_{-Omega}^{Omega} F(sigma + i w) e^{i w t} dw,
/// by Gauss-Legendre panels (base width <= pi/(4 t_max)) with refinement where
/// the integrand has structure. The large-s tail c0/s + c1/s^2 + c2/s^3 is
/// split off and inverted exactly, so truncation at finite Omega acts only on
/// a remainder decaying at least like |s|^-4. The error estimate combines the
/// Omega -> 2 Omega extension with a sigma-perturbation rerun; if the two
/// sigma runs disagree beyond the requested tolerance the inversion aborts.
template <class F>
InversionResult invert_laplace(const F& fun, const std::vector<double>& t_grid, double sigma,
                               double omega_max, const InversionOptions& opt = {}) {
    if (t_grid.empty()) throw std::invalid_argument("invert_laplace: empty time grid");
    if (!(sigma > 0.0)) throw std::invalid_argument("invert_laplace: sigma must be positive");
    if (!(omega_max > 0.0)) throw std::invalid_argument("invert_laplace: omega_max must be positive");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
            throw std::invalid_argument("invert_laplace: t grid must be positive ascending");
        }
    }
    const double t_max = t_grid.back();
    const double base_width = std::numbers::pi / (4.0 * t_max);

    const double mscale = opt.moment_scale > 0.0
                              ? opt.moment_scale
                              : 1e3 * std::max(sigma, omega_max / 100.0);
    const auto mom = detail::fit_moments(fun, mscale);

    auto run = [&](double sig) {
        auto frem = [&](double w) {
            const cplx s{sig, w};
            return fun(s) - mom.c0 / s - mom.c1 / (s * s) - mom.c2 / (s * s * s);
        };
        auto core = detail::build_grid(frem, -omega_max, omega_max, base_width, opt);
        auto ext_lo = detail::build_grid(frem, -2.0 * omega_max, -omega_max, base_width, opt);
        auto ext_hi = detail::build_grid(frem, omega_max, 2.0 * omega_max, base_width, opt);
        return std::tuple{std::move(core), std::move(ext_lo), std::move(ext_hi)};
    };

    auto [core, ext_lo, ext_hi] = run(sigma);
    const double sigma2 = sigma * opt.sigma_perturb;
    auto [core2, ext_lo2, ext_hi2] = run(sigma2);

    InversionResult res;
    res.t = t_grid;
    res.values.resize(t_grid.size());
    res.err_est.resize(t_grid.size());

    const auto nt = static_cast<long>(t_grid.size());
    double worst_sigma_diff = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : worst_sigma_diff)
#endif
    for (long i = 0; i < nt; ++i) {
        const double t = t_grid[static_cast<std::size_t>(i)];
        const cplx analytic = mom.c0 + mom.c1 * t + 0.5 * mom.c2 * t * t;
        const cplx ext = detail::grid_sum(ext_lo, sigma, t) + detail::grid_sum(ext_hi, sigma, t);
        const cplx v1 = analytic + detail::grid_sum(core, sigma, t) + ext;
        const cplx ext_b = detail::grid_sum(ext_lo2, sigma2, t) + detail::grid_sum(ext_hi2, sigma2, t);
        const cplx v2 = analytic + detail::grid_sum(core2, sigma2, t) + ext_b;
        const double sdiff = std::abs(v1 - v2);
        worst_sigma_diff = std::max(worst_sigma_diff, sdiff);
        res.values[static_cast<std::size_t>(i)] = v1;
        res.err_est[static_cast<std::size_t>(i)] = sdiff + std::abs(ext);
    }
    if (worst_sigma_diff > opt.tolerance) {
        throw InversionAccuracyError("invert_laplace: sigma-consistency check failed (discrepancy " +
                                     std::to_string(worst_sigma_diff) + " exceeds tolerance " +
                                     std::to_string(opt.tolerance) + ")");
    }
    return res;
}

// ---------------------------------------------------------------------------
// Batched driver for long time windows
// ---------------------------------------------------------------------------

struct BromwichDriverOptions {
    double sigma_t = 14.0;        // abscissa rule sigma = sigma_t / t_hi per batch
    double tolerance = 1e-5;      // absolute target per sample
    double sigma_override = 0.0;  // > 0: fixed abscissa for every batch
    double omega_override = 0.0;  // > 0: fixed truncation for every batch
};

/// Inverts F on an ascending positive grid in geometric batches [t_hi/2, t_hi],
/// choosing per batch the abscissa sigma = sigma_t/t_hi and a truncation grown
/// until the remainder tail bound meets the tolerance.
template <class F>
InversionResult invert_laplace_batched(const F& fun, const std::vector<double>& t_grid,
                                       double feature_scale,
                                       const BromwichDriverOptions& dopt = {},
                                       InversionOptions opt = {}) {
    if (t_grid.empty()) throw std::invalid_argument("invert_laplace_batched: empty grid");
    opt.tolerance = dopt.tolerance;

    InversionResult all;
    all.t = t_grid;
    all.values.resize(t_grid.size());
    all.err_est.resize(t_grid.size());

    std::size_t hi_idx = t_grid.size();
    while (hi_idx > 0) {
        const double t_hi = t_grid[hi_idx - 1];
        std::size_t lo_idx = hi_idx;
        while (lo_idx > 0 && t_grid[lo_idx - 1] > 0.5 * t_hi) --lo_idx;
        std::vector<double> batch(t_grid.begin() + static_cast<long>(lo_idx),
                                  t_grid.begin() + static_cast<long>(hi_idx));

        const double sigma = dopt.sigma_override > 0.0 ? dopt.sigma_override : dopt.sigma_t / t_hi;
        double omega = dopt.omega_override;
        if (omega <= 0.0) {
            // grow the truncation until the remainder tail bound is below target
            const double mscale = 1e3 * std::max(sigma, feature_scale);
            const auto mom = detail::fit_moments(fun, mscale);
            auto frem_abs = [&](double w) {
                const cplx s{sigma, w};
                return std::abs(fun(s) - mom.c0 / s - mom.c1 / (s * s) - mom.c2 / (s * s * s));
            };
            omega = 4.0 * std::max(feature_scale, sigma);
            const double t_lo = batch.front();
            while (omega < 1e9 * feature_scale) {
                const double tail = std::exp(sigma * t_hi) *
                                    std::max(frem_abs(omega), frem_abs(-omega)) /
                                    (std::numbers::pi * t_lo);
                if (tail <= 0.2 * dopt.tolerance) break;
                omega *= 2.0;
            }
            opt.moment_scale = mscale;
        }
        auto part = invert_laplace(fun, batch, sigma, omega, opt);
        for (std::size_t k = 0; k < batch.size(); ++k) {
            all.values[lo_idx + k] = part.values[k];
            all.err_est[lo_idx + k] = part.err_est[k];
        }
        hi_idx = lo_idx;
    }
    return all;
}

/// The kernel's spectral extent plus the collective coupling scale; used to
/// size the truncation window for resolvent inversions.
inline double kernel_feature_scale(const KernelParams& p) {
    const double adk = p.alpha * p.delta_kappa;
    const cplx s_big{1e3 * (adk + p.omega_D + std::abs(p.Delta_D)), 0.0};
    const double g_coll = std::sqrt(std::abs(s_big * kernel_total(s_big, p)));
    return adk + std::abs(p.Delta_D) + 3.0 * g_coll;
}

} // namespace diracqed
