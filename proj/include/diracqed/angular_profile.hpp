#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace diracqed {

/// Azimuthal weight |b_{1,p}(phi)|^2 of the dipole-coupled cavity mode in
/// band p, normalized so the integral over [0, 2pi) equals pi.
class AngularProfile {
  public:
    /// The unique constant profile satisfying the normalization.
    static AngularProfile constant() { return AngularProfile(); }

    static AngularProfile tabulated(std::vector<double> phi,
                                    std::vector<double> band1,
                                    std::vector<double> band2,
                                    double norm_tol = 1e-6) {
        if (phi.size() < 2 || phi.size() != band1.size() || phi.size() != band2.size()) {
            throw std::invalid_argument("AngularProfile: tables need matching sizes >= 2");
        }
        for (std::size_t i = 1; i < phi.size(); ++i) {
            if (!(phi[i] > phi[i - 1])) throw std::invalid_argument("AngularProfile: phi must be ascending");
        }
        if (phi.front() < 0.0 || phi.back() >= 2.0 * std::numbers::pi) {
            throw std::invalid_argument("AngularProfile: phi must lie in [0, 2pi)");
        }
        AngularProfile p;
        p.phi_ = std::move(phi);
        p.val_[0] = std::move(band1);
        p.val_[1] = std::move(band2);
        for (int b = 1; b <= 2; ++b) {
            const double I = p.integral(b);
            if (std::abs(I - std::numbers::pi) > norm_tol * std::numbers::pi) {
                throw std::invalid_argument("AngularProfile: band " + std::to_string(b) +
                                            " integral deviates from pi by more than tolerance");
            }
        }
        return p;
    }

    /// CSV "phi,b1sq_band1,b1sq_band2", phi in radians on [0, 2pi).
    static AngularProfile load_csv(const std::string& path, double norm_tol = 1e-6) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("AngularProfile: cannot open '" + path + "'");
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("AngularProfile: empty file '" + path + "'");
        std::vector<double> phi, b1, b2;
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            std::istringstream ss(line);
            std::string tok;
            double v[3];
            for (int c = 0; c < 3; ++c) {
                if (!std::getline(ss, tok, ',')) {
                    throw std::runtime_error("AngularProfile: '" + path + "' line " +
                                             std::to_string(lineno) + ": expected 3 columns");
                }
                v[c] = std::stod(tok);
            }
            phi.push_back(v[0]);
            b1.push_back(v[1]);
            b2.push_back(v[2]);
        }
        return tabulated(std::move(phi), std::move(b1), std::move(b2), norm_tol);
    }

    /// |b_{1,band}(phi)|^2, periodic linear interpolation for tabulated data.
    double operator()(double phi, int band) const {
        if (band != 1 && band != 2) throw std::invalid_argument("AngularProfile: band must be 1 or 2");
        if (phi_.empty()) return 0.5;
        const auto& v = val_[static_cast<std::size_t>(band - 1)];
        const double two_pi = 2.0 * std::numbers::pi;
        double x = std::fmod(phi, two_pi);
        if (x < 0.0) x += two_pi;
        // wrap-around segment [phi.back(), phi.front()+2pi)
        if (x < phi_.front() || x >= phi_.back()) {
            const double span = phi_.front() + two_pi - phi_.back();
            double f = (x >= phi_.back()) ? (x - phi_.back()) : (x + two_pi - phi_.back());
            return v.back() + (v.front() - v.back()) * f / span;
        }
        auto it = std::upper_bound(phi_.begin(), phi_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - phi_.begin()) - 1;
        const double f = (x - phi_[i]) / (phi_[i + 1] - phi_[i]);
        return v[i] + (v[i + 1] - v[i]) * f;
    }

    bool is_constant() const { return phi_.empty(); }

    /// Integral over one period (trapezoid with periodic closure).
    double integral(int band) const {
        if (phi_.empty()) return std::numbers::pi;
        const auto& v = val_[static_cast<std::size_t>(band - 1)];
        double I = 0.0;
        for (std::size_t i = 0; i + 1 < phi_.size(); ++i) {
            I += 0.5 * (v[i] + v[i + 1]) * (phi_[i + 1] - phi_[i]);
        }
        I += 0.5 * (v.back() + v.front()) * (phi_.front() + 2.0 * std::numbers::pi - phi_.back());
        return I;
    }

  private:
    AngularProfile() = default;
    std::vector<double> phi_;        // empty for the constant profile
    std::vector<double> val_[2];
};

} // namespace diracqed
