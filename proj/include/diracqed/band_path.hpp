#pragma once

#include "diracqed/lattice.hpp"
#include "diracqed/tight_binding.hpp"

#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace diracqed {

struct BandPathRow {
    double arclength = 0.0; // cumulative |d kappa| along the path (1/m)
    Vec2 kappa{};
    double omega1 = 0.0;
    double omega2 = 0.0;
};

/// Dense band sampling along a polyline of k-points (e.g. Gamma-M-K-Gamma).
/// Vertices must lie in the first Brillouin zone. A single vertex yields one row.
inline std::vector<BandPathRow> band_path(const TightBindingModel& model,
                                          const LatticeSpec& lat,
                                          const std::vector<Vec2>& vertices,
                                          int samples_per_segment) {
    if (vertices.empty()) throw std::invalid_argument("band_path: empty path");
    if (samples_per_segment < 1) throw std::invalid_argument("band_path: samples_per_segment must be >= 1");
    for (const auto& v : vertices) {
        if (!in_first_brillouin_zone(lat, v)) {
            throw std::invalid_argument("band_path: path vertex outside first Brillouin zone");
        }
    }

    std::vector<BandPathRow> rows;
    rows.push_back({0.0, vertices.front(), 0.0, 0.0});
    double arc = 0.0;
    for (std::size_t seg = 0; seg + 1 < vertices.size(); ++seg) {
        const Vec2 a = vertices[seg];
        const Vec2 b = vertices[seg + 1];
        const double len = norm(b - a);
        for (int i = 1; i <= samples_per_segment; ++i) {
            const double f = static_cast<double>(i) / samples_per_segment;
            rows.push_back({arc + f * len, a + (b - a) * f, 0.0, 0.0});
        }
        arc += len;
    }

    const auto n = static_cast<long>(rows.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long i = 0; i < n; ++i) {
        auto& r = rows[static_cast<std::size_t>(i)];
        const auto bands = solve_supercell_bands(model, lat, r.kappa);
        r.omega1 = bands[0].omega;
        r.omega2 = bands[1].omega;
    }
    return rows;
}

} // namespace diracqed
