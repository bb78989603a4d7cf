#pragma once

#include "diracqed/lattice.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

namespace diracqed {

using cplx = std::complex<double>;

/// 2x2 complex matrix, row-major.
struct Mat2 {
    std::array<cplx, 4> m{};

    cplx& operator()(int r, int c) { return m[static_cast<std::size_t>(2 * r + c)]; }
    const cplx& operator()(int r, int c) const { return m[static_cast<std::size_t>(2 * r + c)]; }

    static Mat2 identity() {
        Mat2 out;
        out(0, 0) = 1.0;
        out(1, 1) = 1.0;
        return out;
    }

    Mat2& operator+=(const Mat2& o) {
        for (std::size_t i = 0; i < 4; ++i) m[i] += o.m[i];
        return *this;
    }

    Mat2 scaled(cplx f) const {
        Mat2 out;
        for (std::size_t i = 0; i < 4; ++i) out.m[i] = m[i] * f;
        return out;
    }

    double frobenius() const {
        double s = 0.0;
        for (const auto& v : m) s += std::norm(v);
        return std::sqrt(s);
    }

    double hermiticity_defect() const {
        double d = std::abs((*this)(0, 1) - std::conj((*this)(1, 0)));
        d = std::max(d, std::abs(std::imag((*this)(0, 0))));
        d = std::max(d, std::abs(std::imag((*this)(1, 1))));
        return d;
    }

    /// Positive definiteness for a Hermitian 2x2.
    bool positive_definite() const {
        const double d00 = std::real((*this)(0, 0));
        const double d11 = std::real((*this)(1, 1));
        const double det = d00 * d11 - std::norm((*this)(0, 1));
        return d00 > 0.0 && det > 0.0;
    }
};

/// Overlap tensors of the truncated Bloch expansion, n,m in {-1,0,1},
/// k,l in {1,2}, stored as alpha[n+1][m+1] 2x2 blocks. nu is the
/// single-cavity resonance (rad/s).
class TightBindingModel {
  public:
    TightBindingModel(double nu,
                      std::array<std::array<Mat2, 3>, 3> alpha,
                      std::array<std::array<Mat2, 3>, 3> beta,
                      double normalization_tol = 1e-9)
        : nu_(nu), alpha_(std::move(alpha)), beta_(std::move(beta)) {
        if (!(nu_ > 0.0)) throw std::invalid_argument("TightBindingModel: nu must be positive");
        check_normalized(alpha_[1][1], "alpha", normalization_tol);
        check_normalized(beta_[1][1], "beta", normalization_tol);
    }

    double nu() const { return nu_; }
    const Mat2& alpha(int n, int m) const { return alpha_[static_cast<std::size_t>(n + 1)][static_cast<std::size_t>(m + 1)]; }
    const Mat2& beta(int n, int m) const { return beta_[static_cast<std::size_t>(n + 1)][static_cast<std::size_t>(m + 1)]; }

    /// Truncated phase sums A(kappa) = sum_nm e^{-i(n k.a1 + m k.a2)} alpha_nm,
    /// and likewise B(kappa). Hermiticity and positive definiteness of B are
    /// checked here; violations indicate an unphysical tensor file.
    std::pair<Mat2, Mat2> assemble(const LatticeSpec& lat, const Vec2& kappa) const {
        Mat2 A, B;
        for (int n = -1; n <= 1; ++n) {
            for (int m = -1; m <= 1; ++m) {
                const double phase = -(n * dot(kappa, lat.a1) + m * dot(kappa, lat.a2));
                const cplx f = std::polar(1.0, phase);
                A += alpha(n, m).scaled(f);
                B += beta(n, m).scaled(f);
            }
        }
        const double tol = 1e-10;
        if (A.hermiticity_defect() > tol * (A.frobenius() + 1.0) ||
            B.hermiticity_defect() > tol * (B.frobenius() + 1.0)) {
            throw std::runtime_error("TightBindingModel: assembled matrices are not Hermitian");
        }
        if (!B.positive_definite()) {
            throw std::runtime_error("TightBindingModel: assembled B(kappa) is not positive definite");
        }
        return {A, B};
    }

    static TightBindingModel identity_preset(double nu) {
        std::array<std::array<Mat2, 3>, 3> a{}, b{};
        a[1][1] = Mat2::identity();
        b[1][1] = Mat2::identity();
        return TightBindingModel(nu, a, b);
    }

    /// Synthetic two-mode preset with honeycomb-consistent bond matrices on
    /// the six nearest neighbors. Values are not derived from any cavity
    /// field computation; they are chosen to produce a clean degeneracy at K.
    static TightBindingModel symmetric_preset(double nu,
                                              double t_sigma = -0.04,
                                              double t_pi = 0.012,
                                              double beta_scale = 0.15) {
        std::array<std::array<Mat2, 3>, 3> a{}, b{};
        a[1][1] = Mat2::identity();
        b[1][1] = Mat2::identity();
        const LatticeSpec unit = LatticeSpec::triangular(1.0);
        const std::array<std::pair<int, int>, 6> nbrs{
            std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};
        for (const auto& [n, m] : nbrs) {
            const Vec2 d = unit.a1 * static_cast<double>(n) + unit.a2 * static_cast<double>(m);
            const double dn = norm(d);
            const double nx = d.x / dn, ny = d.y / dn;
            Mat2 bond;
            bond(0, 0) = t_pi + (t_sigma - t_pi) * nx * nx;
            bond(0, 1) = (t_sigma - t_pi) * nx * ny;
            bond(1, 0) = bond(0, 1);
            bond(1, 1) = t_pi + (t_sigma - t_pi) * ny * ny;
            a[static_cast<std::size_t>(n + 1)][static_cast<std::size_t>(m + 1)] = bond;
            b[static_cast<std::size_t>(n + 1)][static_cast<std::size_t>(m + 1)] = bond.scaled(beta_scale);
        }
        return TightBindingModel(nu, a, b);
    }

    static TightBindingModel from_json(const nlohmann::json& j);
    static TightBindingModel load(const std::string& path);
    nlohmann::json to_json() const;

  private:
    static void check_normalized(const Mat2& m00, const char* which, double tol) {
        const Mat2 id = Mat2::identity();
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) {
                if (std::abs(m00(r, c) - id(r, c)) > tol) {
                    throw std::invalid_argument(std::string("TightBindingModel: ") + which +
                                                "[0,0] must equal the identity (normalized modes)");
                }
            }
        }
    }

    double nu_;
    std::array<std::array<Mat2, 3>, 3> alpha_;
    std::array<std::array<Mat2, 3>, 3> beta_;
};

/// One Bloch solution at fixed kappa: frequency and coefficient pair,
/// normalized so b^dag B b = 1, leading nonzero component real positive.
struct BlochEigenpair {
    double omega = 0.0;
    std::array<cplx, 2> b{};
};

namespace detail {

inline std::array<cplx, 2> eigenvector_for(const Mat2& A, const Mat2& B, double nu2, double lambda) {
    // rows of (nu^2 A - lambda B); use the better-conditioned one
    const cplx r0a = nu2 * A(0, 0) - lambda * B(0, 0);
    const cplx r0b = nu2 * A(0, 1) - lambda * B(0, 1);
    const cplx r1a = nu2 * A(1, 0) - lambda * B(1, 0);
    const cplx r1b = nu2 * A(1, 1) - lambda * B(1, 1);
    std::array<cplx, 2> v{};
    const double n0 = std::abs(r0a) + std::abs(r0b);
    const double n1 = std::abs(r1a) + std::abs(r1b);
    if (n0 >= n1 && n0 > 0.0) {
        v = {-r0b, r0a};
    } else if (n1 > 0.0) {
        v = {-r1b, r1a};
    } else {
        v = {1.0, 0.0}; // pencil row vanished: any vector solves
    }
    if (std::abs(v[0]) < 1e-14 * (std::abs(v[0]) + std::abs(v[1]))) v[0] = 0.0;
    return v;
}

inline void b_normalize(std::array<cplx, 2>& v, const Mat2& B) {
    const cplx q = std::conj(v[0]) * (B(0, 0) * v[0] + B(0, 1) * v[1]) +
                   std::conj(v[1]) * (B(1, 0) * v[0] + B(1, 1) * v[1]);
    const double nrm = std::sqrt(std::real(q));
    if (!(nrm > 0.0)) throw std::runtime_error("solve_supercell_bands: degenerate eigenvector norm");
    v[0] /= nrm;
    v[1] /= nrm;
    // phase convention: first nonzero component real positive
    const cplx lead = (std::abs(v[0]) > 1e-12) ? v[0] : v[1];
    const cplx ph = std::abs(lead) > 0.0 ? std::conj(lead) / std::abs(lead) : cplx{1.0, 0.0};
    v[0] *= ph;
    v[1] *= ph;
}

} // namespace detail

/// Both solutions of nu^2 A(kappa) b = omega^2 B(kappa) b, ascending in omega.
/// B is Cholesky-reduced to a standard 2x2 Hermitian problem whose
/// discriminant (dA00 - dA11)^2 + 4|dA01|^2 is a sum of squares, so exact
/// degeneracies survive rounding instead of picking up sqrt(eps) splittings.
inline std::array<BlochEigenpair, 2> solve_supercell_bands(const TightBindingModel& model,
                                                           const LatticeSpec& lat,
                                                           const Vec2& kappa) {
    const auto [A, B] = model.assemble(lat, kappa);
    const double nu2 = model.nu() * model.nu();

    // B = L L^dag
    const double b00 = std::real(B(0, 0));
    if (!(b00 > 0.0)) throw std::runtime_error("solve_supercell_bands: B is not positive definite");
    const double l11 = std::sqrt(b00);
    const cplx l21 = B(1, 0) / l11;
    const double l22sq = std::real(B(1, 1)) - std::norm(l21);
    if (!(l22sq > 0.0)) throw std::runtime_error("solve_supercell_bands: B is not positive definite");
    const double l22 = std::sqrt(l22sq);

    // standard-form matrix L^-1 (nu^2 A) L^-dag
    const cplx m00 = nu2 * A(0, 0);
    const cplx m01 = nu2 * A(0, 1);
    const cplx m11 = nu2 * A(1, 1);
    const double t00 = std::real(m00) / (l11 * l11);
    const cplx t01 = (m01 - m00 * std::conj(l21) / l11) / (l11 * l22);
    const double t11 = (std::real(m11) - 2.0 * std::real(l21 * m01) / l11 +
                        std::norm(l21) * std::real(m00) / (l11 * l11)) /
                       l22sq;

    const double half_diff = 0.5 * (t00 - t11);
    const double rad = std::sqrt(half_diff * half_diff + std::norm(t01));
    const double mid = 0.5 * (t00 + t11);
    double lam_lo = mid - rad;
    double lam_hi = mid + rad;

    for (double lam : {lam_lo, lam_hi}) {
        if (lam < -1e-12 * nu2) {
            throw std::runtime_error("solve_supercell_bands: negative omega^2 beyond tolerance");
        }
    }
    lam_lo = std::max(lam_lo, 0.0);
    lam_hi = std::max(lam_hi, 0.0);

    std::array<BlochEigenpair, 2> out;
    const double rel_gap = std::abs(lam_hi - lam_lo) / (std::abs(lam_hi) + std::abs(lam_lo) + 1e-300);
    if (rel_gap < 1e-13) {
        // exact degeneracy: fix the basis deterministically by B-orthonormalizing e1, e2
        std::array<cplx, 2> v0{1.0, 0.0}, v1{0.0, 1.0};
        detail::b_normalize(v0, B);
        // Gram-Schmidt in the B inner product
        const cplx ov = std::conj(v0[0]) * (B(0, 0) * v1[0] + B(0, 1) * v1[1]) +
                        std::conj(v0[1]) * (B(1, 0) * v1[0] + B(1, 1) * v1[1]);
        v1[0] -= ov * v0[0];
        v1[1] -= ov * v0[1];
        detail::b_normalize(v1, B);
        out[0] = {std::sqrt(lam_lo), v0};
        out[1] = {std::sqrt(lam_hi), v1};
        return out;
    }

    auto v_lo = detail::eigenvector_for(A, B, nu2, lam_lo);
    auto v_hi = detail::eigenvector_for(A, B, nu2, lam_hi);
    detail::b_normalize(v_lo, B);
    detail::b_normalize(v_hi, B);
    out[0] = {std::sqrt(lam_lo), v_lo};
    out[1] = {std::sqrt(lam_hi), v_hi};
    return out;
}

// ---------------------------------------------------------------------------
// JSON overlap-tensor files: {"nu": float, "alpha": [...], "beta": [...]},
// entries indexed [n+1][m+1][k-1][l-1], complex numbers as [re, im].
// ---------------------------------------------------------------------------

inline TightBindingModel TightBindingModel::from_json(const nlohmann::json& j) {
    if (!j.contains("nu") || !j["nu"].is_number()) {
        throw std::runtime_error("overlap file: missing numeric field 'nu'");
    }
    const double nu = j["nu"].get<double>();

    auto read_tensor = [](const nlohmann::json& arr, const char* name) {
        std::array<std::array<Mat2, 3>, 3> out{};
        if (!arr.is_array() || arr.size() != 3) {
            throw std::runtime_error(std::string("overlap file: '") + name +
                                     "' must be a 3-element array over n (truncation |n|<=1)");
        }
        for (std::size_t ni = 0; ni < 3; ++ni) {
            const auto& row = arr[ni];
            if (!row.is_array() || row.size() != 3) {
                throw std::runtime_error(std::string("overlap file: '") + name + "'[" +
                                         std::to_string(ni) + "] must have 3 entries over m");
            }
            for (std::size_t mi = 0; mi < 3; ++mi) {
                const auto& blk = row[mi];
                if (!blk.is_array() || blk.size() != 2) {
                    throw std::runtime_error(std::string("overlap file: '") + name + "'[" +
                                             std::to_string(ni) + "][" + std::to_string(mi) +
                                             "] must be a 2x2 block");
                }
                for (std::size_t k = 0; k < 2; ++k) {
                    if (!blk[k].is_array() || blk[k].size() != 2) {
                        throw std::runtime_error(std::string("overlap file: '") + name + "'[" +
                                                 std::to_string(ni) + "][" + std::to_string(mi) +
                                                 "][" + std::to_string(k) + "] must have 2 entries");
                    }
                    for (std::size_t l = 0; l < 2; ++l) {
                        const auto& z = blk[k][l];
                        if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
                            throw std::runtime_error(std::string("overlap file: '") + name + "'[" +
                                                     std::to_string(ni) + "][" + std::to_string(mi) +
                                                     "][" + std::to_string(k) + "][" + std::to_string(l) +
                                                     "] must be a [re, im] pair");
                        }
                        out[ni][mi](static_cast<int>(k), static_cast<int>(l)) =
                            cplx{z[0].get<double>(), z[1].get<double>()};
                    }
                }
            }
        }
        return out;
    };

    if (!j.contains("alpha")) throw std::runtime_error("overlap file: missing field 'alpha'");
    if (!j.contains("beta")) throw std::runtime_error("overlap file: missing field 'beta'");
    return TightBindingModel(nu, read_tensor(j["alpha"], "alpha"), read_tensor(j["beta"], "beta"));
}

inline TightBindingModel TightBindingModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("overlap file: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("overlap file '" + path + "': " + e.what());
    }
    return from_json(j);
}

inline nlohmann::json TightBindingModel::to_json() const {
    auto dump_tensor = [this](bool is_alpha) {
        nlohmann::json arr = nlohmann::json::array();
        for (int n = -1; n <= 1; ++n) {
            nlohmann::json row = nlohmann::json::array();
            for (int m = -1; m <= 1; ++m) {
                const Mat2& blk = is_alpha ? alpha(n, m) : beta(n, m);
                nlohmann::json b2 = nlohmann::json::array();
                for (int k = 0; k < 2; ++k) {
                    nlohmann::json r = nlohmann::json::array();
                    for (int l = 0; l < 2; ++l) {
                        r.push_back({std::real(blk(k, l)), std::imag(blk(k, l))});
                    }
                    b2.push_back(r);
                }
                row.push_back(b2);
            }
            arr.push_back(row);
        }
        return arr;
    };
    return nlohmann::json{{"nu", nu_}, {"alpha", dump_tensor(true)}, {"beta", dump_tensor(false)}};
}

} // namespace diracqed
