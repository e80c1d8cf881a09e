// Unit conventions.
//
// All user-facing frequencies are f = omega/2pi in GHz, matching how drive
// strengths and detunings are usually quoted.  Internally everything is an
// angular frequency in rad/ns with hbar = 1, so energies and rates live on
// the same scale and time is in ns.
#pragma once

#include <numbers>

namespace flq::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Bohr magneton over Planck constant, GHz/T.
// mu_B = 9.2740100783e-24 J/T, h = 6.62607015e-34 J s  ->  13.996245 GHz/T.
inline constexpr double mu_b_over_h_ghz_per_tesla = 13.996245;

// f in GHz -> omega in rad/ns
inline constexpr double angular(double f_ghz) { return two_pi * f_ghz; }

// omega in rad/ns -> f in GHz
inline constexpr double to_ghz(double w_rad_ns) { return w_rad_ns / two_pi; }

// Zeeman energy mu_B * B * g as an angular frequency (rad/ns).
inline constexpr double zeeman_angular(double b_tesla, double g) {
    return angular(mu_b_over_h_ghz_per_tesla * b_tesla * g);
}

} // namespace flq::units
