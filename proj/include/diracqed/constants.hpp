#pragma once

#include <stdexcept>

namespace diracqed {

/// CODATA values used throughout. All quantities SI.
struct PhysicalConstants {
    double hbar = 1.054571817e-34;      // J s
    double epsilon0 = 8.8541878128e-12; // F/m
    double c = 299792458.0;             // m/s
    double debye = 3.33564e-30;         // C m per Debye
};

inline constexpr PhysicalConstants constants{};

/// Dipole moment conversion, Debye -> C m.
inline double debye_to_si(double d_debye) {
    if (d_debye < 0.0) {
        throw std::domain_error("debye_to_si: negative dipole moment");
    }
    return d_debye * constants.debye;
}

} // namespace diracqed
