// Physical drive parameters for the four-level charged quantum dot.
#pragma once

#include <complex>

#include "flq/error.hpp"

namespace flq {

// All frequencies are f = omega/2pi in GHz.  The far-detuned dressing laser
// is sigma+ polarized with real non-negative Rabi frequency omega1p; the
// sigma- component of that laser is identically zero.  The near-resonant
// read-out laser has complex Rabi components omega2p / omega2m.
struct DriveParams {
    double bx_tesla = 0.0;  // in-plane (Voigt) magnetic field, >= 0
    double g_ex = 0.24;     // electron in-plane g-factor
    double g_hx = 0.47;     // hole in-plane g-factor
    double omega1p_ghz = 0.0; // dressing-laser Rabi frequency, real >= 0
    double delta1_ghz = 0.0;  // dressing-laser detuning omega0 - omega1
    std::complex<double> omega2p_ghz{0.0, 0.0}; // read-out Rabi, sigma+
    std::complex<double> omega2m_ghz{0.0, 0.0}; // read-out Rabi, sigma-
    double delta2_ghz = 0.0;  // read-out detuning omega0 - omega2

    // |omega1p / delta1|; the perturbative state-mixing parameter.
    double mixing_ratio() const;

    // True when mixing_ratio() > 0.2 and the dispersive treatment of the
    // dressing laser becomes questionable.  Advisory only, never fatal.
    bool large_mixing_warning() const { return mixing_ratio() > 0.2; }

    // Throws ValidationError on out-of-range fields.
    void validate() const;

    bool operator==(const DriveParams&) const = default;
};

} // namespace flq
