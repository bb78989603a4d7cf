#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace diracqed {

struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EstimatorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FrequencyReport {
    double zero_crossing_rad_s = 0.0;
    double spectrum_peak_rad_s = 0.0;
    double agreement = 0.0; // relative discrepancy between the two estimates
};

namespace detail {

/// Peak of the discrete Fourier magnitude over positive frequencies, refined
/// by parabolic interpolation of the log magnitude.
inline double spectrum_peak(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
    const std::size_t n_half = n / 2;
    std::vector<double> mag(n_half, 0.0);
    for (std::size_t k = 1; k < n_half; ++k) {
        std::complex<double> acc{0.0, 0.0};
        const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / (static_cast<double>(n) * dt);
        for (std::size_t j = 0; j < n; ++j) {
            acc += y[j] * std::polar(1.0, -w * (t[j] - t.front()));
        }
        mag[k] = std::abs(acc);
    }
    std::size_t kbest = 1;
    for (std::size_t k = 2; k < n_half; ++k) {
        if (mag[k] > mag[kbest]) kbest = k;
    }
    double delta = 0.0;
    if (kbest > 1 && kbest + 1 < n_half && mag[kbest] > 0.0) {
        const double lm = std::log(std::max(mag[kbest - 1], 1e-300));
        const double lc = std::log(mag[kbest]);
        const double lp = std::log(std::max(mag[kbest + 1], 1e-300));
        const double den = lm - 2.0 * lc + lp;
        if (den < 0.0) delta = 0.5 * (lm - lp) / den;
    }
    return 2.0 * std::numbers::pi * (static_cast<double>(kbest) + delta) /
           (static_cast<double>(n) * dt);
}

} // namespace detail

/// Oscillation frequency of a sampled signal from the zero-crossing intervals
/// of the detrended signal, cross-checked against the discrete-spectrum peak.
/// The two estimates must agree within 5%.
inline FrequencyReport estimate_oscillation_frequency(const std::vector<double>& t,
                                                      const std::vector<double>& signal) {
    if (t.size() != signal.size() || t.size() < 8) {
        throw std::invalid_argument("estimate_oscillation_frequency: need matching samples (>= 8)");
    }
    double mean = 0.0;
    for (double v : signal) mean += v;
    mean /= static_cast<double>(signal.size());
    std::vector<double> y(signal.size());
    for (std::size_t i = 0; i < signal.size(); ++i) y[i] = signal[i] - mean;

    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        if (y[i] == 0.0) continue;
        if (y[i] * y[i + 1] < 0.0) {
            const double f = y[i] / (y[i] - y[i + 1]);
            crossings.push_back(t[i] + f * (t[i + 1] - t[i]));
        }
    }
    if (crossings.size() < 3) {
        throw InsufficientDataError("estimate_oscillation_frequency: fewer than 3 zero crossings");
    }
    // consecutive crossings are half periods
    const double mean_half = (crossings.back() - crossings.front()) /
                             static_cast<double>(crossings.size() - 1);
    FrequencyReport rep;
    rep.zero_crossing_rad_s = std::numbers::pi / mean_half;
    rep.spectrum_peak_rad_s = detail::spectrum_peak(t, y);
    rep.agreement = std::abs(rep.zero_crossing_rad_s - rep.spectrum_peak_rad_s) /
                    rep.zero_crossing_rad_s;
    if (rep.agreement > 0.05) {
        throw EstimatorError("estimate_oscillation_frequency: zero-crossing and spectrum estimates "
                             "disagree by more than 5%");
    }
    return rep;
}

} // namespace diracqed
