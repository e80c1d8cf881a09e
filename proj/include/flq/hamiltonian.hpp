// Rotating-frame Hamiltonians of the driven four-level system and their
// eigensystems in the Zeeman-only, dressing-only, and combined
// (pseudo-Faraday) configurations.
//
// Basis ordering throughout: |e,z+>, |e,z->, |t,z+>, |t,z->  (electron
// spin-up, electron spin-down, trion spin-up, trion spin-down).
#pragma once

#include <array>
#include <string>

#include "flq/linalg.hpp"
#include "flq/params.hpp"

namespace flq {

enum class Manifold { Electron, Trion };
enum class SpinSign { Plus, Minus };

struct StateLabel {
    Manifold manifold;
    SpinSign spin;
    bool x_basis = false; // true for the Voigt (x-projection) labels

    bool operator==(const StateLabel&) const = default;
};

std::string to_string(const StateLabel& label);

struct LabeledState {
    double value;              // eigenvalue, rad/ns
    Eigen::Vector4cd vector;   // eigenvector in the z basis, unit norm
    StateLabel label;
};

// Four labeled eigenpairs of the 4x4 system Hamiltonian.  Labels are
// bijective by construction; vectors are normalized and, for Hermitian
// input, mutually orthogonal.
struct LabeledEigensystem {
    std::array<LabeledState, 4> states;

    const LabeledState& find(Manifold m, SpinSign s) const;
};

// 4x4 rotating-frame Hamiltonian of the statically driven system (Voigt
// field plus sigma+ dressing laser), rad/ns.  Hermitian and traceless.
CMatrix build_H0(const DriveParams& p);

// Oscillatory read-out drive: H(t) = H0 + Hp e^{i nu t} + Hm e^{-i nu t}
// with Hm = Hp^dagger and nu = 2pi (delta2 - delta1).
struct DriveBlocks {
    CMatrix h_plus;   // 4x4, entries (3,1) and (4,2) carry conj(omega2)/2
    CMatrix h_minus;  // Hermitian conjugate of h_plus
    double nu;        // rad/ns
};
DriveBlocks build_H1(const DriveParams& p);

// Analytic Zeeman-limit eigensystem (dressing laser ignored): x-projection
// states split by +-mu_B B g.  At bx = 0 returns the z basis.
LabeledEigensystem zeeman_eigensystem(const DriveParams& p);

// Dressing-only limit (magnetic field ignored).
struct ACStarkEigensystem {
    LabeledEigensystem exact;       // eigenvalues {-W/2, -D/2, +W/2, +D/2}
    double w1;                      // generalized Rabi frequency sqrt(D^2+O^2), rad/ns
    // First order in omega1p/delta1: energies after undoing the rotating
    // frame (electron absolute, trion relative to omega0), and the leading
    // mixed vectors.  Vectors are normalized only to first order.
    double e1_first_order;          // rad/ns, = -O^2/(4 D)
    double e2_first_order;          // 0
    double e3_first_order_rel;      // rad/ns relative to omega0, = +O^2/(4 D)
    double e4_first_order_rel;      // 0
    Eigen::Vector4cd v1_first_order;
    Eigen::Vector4cd v3_first_order;
};

// Throws DegenerateDetuning when delta1 = 0 (the first-order expansion in
// omega1p/delta1 has no meaning there).
ACStarkEigensystem acstark_eigensystem(const DriveParams& p);

// Numerical eigensystem of build_H0 with states labeled by their dominant
// overlap with the z basis.  Throws AmbiguousLabeling when no assignment
// reaches squared overlap 0.5 on every state.
LabeledEigensystem pseudo_faraday_eigensystem(const DriveParams& p);

// Absolute energies: adds (omega0+omega1)/2 to trion-like and
// (omega0-omega1)/2 to electron-like eigenvalues.  Result order matches
// es.states.
std::array<double, 4> rotating_frame_energies(const LabeledEigensystem& es,
                                              double omega0, double omega1);

// Read-out laser detuning delta2 (GHz) that puts omega2 exactly on the
// cycling transition between the electron-like and trion-like states of
// the requested spin, in absolute frequency.
double resonant_detuning_for_readout(const DriveParams& p, SpinSign target);

// Electron spin precession timescale hbar / (2 mu_B g B), ns.  Sets the
// adiabaticity requirement for switching the dressing laser on.
double spin_precession_time_ns(double bx_tesla, double g);

} // namespace flq
