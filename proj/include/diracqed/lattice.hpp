#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace diracqed {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& u, const Vec2& v) { return u.x * v.x + u.y * v.y; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline double cross(const Vec2& u, const Vec2& v) { return u.x * v.y - u.y * v.x; }

/// Reciprocal basis of a 2D lattice, b_i . a_j = 2 pi delta_ij.
inline std::array<Vec2, 2> reciprocal_basis(const Vec2& a1, const Vec2& a2) {
    const double det = cross(a1, a2);
    const double scale = std::max(norm(a1), norm(a2));
    if (std::abs(det) < 1e-12 * scale * scale) {
        throw std::invalid_argument("reciprocal_basis: primitive vectors are (nearly) collinear");
    }
    const double f = 2.0 * std::numbers::pi / det;
    Vec2 b1{a2.y * f, -a2.x * f};
    Vec2 b2{-a1.y * f, a1.x * f};
    return {b1, b2};
}

/// Triangular supercell geometry. The unit-cell area follows the
/// supercell convention S = 2 sqrt(3) a^2.
struct LatticeSpec {
    double a = 0.0; // lattice constant (m)
    Vec2 a1, a2;    // primitive vectors (m)
    Vec2 b1, b2;    // reciprocal vectors (1/m)
    double S = 0.0; // unit-cell area (m^2)

    static LatticeSpec triangular(double a) {
        if (!(a > 0.0)) {
            throw std::invalid_argument("LatticeSpec: lattice constant must be positive");
        }
        LatticeSpec lat;
        lat.a = a;
        lat.a1 = {a, 0.0};
        lat.a2 = {a / 2.0, a * std::numbers::sqrt3 / 2.0};
        auto [b1, b2] = reciprocal_basis(lat.a1, lat.a2);
        lat.b1 = b1;
        lat.b2 = b2;
        lat.S = 2.0 * std::numbers::sqrt3 * a * a;
        lat.validate();
        return lat;
    }

    void validate() const {
        if (!(a > 0.0)) throw std::invalid_argument("LatticeSpec: a must be positive");
        const double two_pi = 2.0 * std::numbers::pi;
        const std::array<std::pair<Vec2, Vec2>, 4> pairs{
            std::pair{b1, a1}, {b1, a2}, {b2, a1}, {b2, a2}};
        const std::array<double, 4> expect{two_pi, 0.0, 0.0, two_pi};
        for (std::size_t i = 0; i < 4; ++i) {
            if (std::abs(dot(pairs[i].first, pairs[i].second) - expect[i]) > 1e-12 * two_pi) {
                throw std::invalid_argument("LatticeSpec: duality b_i.a_j = 2 pi delta_ij violated");
            }
        }
        if (std::abs(S - 2.0 * std::numbers::sqrt3 * a * a) > 1e-12 * S) {
            throw std::invalid_argument("LatticeSpec: unit-cell area must equal 2 sqrt(3) a^2");
        }
    }
};

/// Corner of the first Brillouin zone, |K| = 4 pi / (3a).
inline Vec2 k_point_K(const LatticeSpec& lat) {
    return (lat.b1 * 2.0 + lat.b2) * (1.0 / 3.0);
}

/// Edge midpoint of the first Brillouin zone.
inline Vec2 k_point_M(const LatticeSpec& lat) {
    return (lat.b1 + lat.b2) * 0.5;
}

inline Vec2 k_point_Gamma(const LatticeSpec&) { return {0.0, 0.0}; }

/// Distance from Gamma to K, the scale used for disc radii.
inline double gamma_k_distance(const LatticeSpec& lat) { return norm(k_point_K(lat)); }

/// True when kappa lies in the first Brillouin zone (closest to Gamma among
/// all reciprocal-lattice translates; boundary points allowed).
inline bool in_first_brillouin_zone(const LatticeSpec& lat, const Vec2& kappa, double rel_tol = 1e-9) {
    const double d0 = norm(kappa);
    const double scale = norm(lat.b1);
    for (int n = -1; n <= 1; ++n) {
        for (int m = -1; m <= 1; ++m) {
            if (n == 0 && m == 0) continue;
            const Vec2 g = lat.b1 * static_cast<double>(n) + lat.b2 * static_cast<double>(m);
            if (norm(kappa - g) < d0 - rel_tol * scale) return false;
        }
    }
    return true;
}

} // namespace diracqed
