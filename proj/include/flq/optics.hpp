// Dipole operator in the circular (Faraday) basis, transition dipole
// moments between dressed eigenstates, branching ratio of the cycling
// transition, and the orthogonality check that justifies treating the two
// decay channels from each trion state as independent.
#pragma once

#include "flq/hamiltonian.hpp"
#include "flq/linalg.hpp"
#include "flq/params.hpp"

namespace flq {

// Cartesian components of the electric dipole operator, 4x4 each, in units
// of the scalar dipole moment (set to 1).  The z component vanishes for
// heavy-hole circular selection rules.
struct DipoleOperator {
    CMatrix x, y, z;
};

const DipoleOperator& dipole_operator();

// Complex transition dipole vector <psi_i| d |psi_j>.
struct TransitionDipole {
    Eigen::Vector3cd p;

    double squared_norm() const { return p.squaredNorm(); }
};

// Both vectors must be normalized to 1e-10; throws NotNormalized.
TransitionDipole transition_dipole(const Eigen::Vector4cd& psi_i,
                                   const Eigen::Vector4cd& psi_j);

// Spin-flipping over spin-preserving emission strength of the trion z-
// state: |<e,z+|d|t,z->|^2 / |<e,z-|d|t,z->|^2 in the labeled eigenbasis
// of build_H0.  Throws DivisionByZero if the spin-preserving dipole
// vanishes and propagates AmbiguousLabeling.
double branching_ratio(const DriveParams& p);

// Overlap conj(P_e4) . P_e3 of the two transition dipoles that share the
// chosen electron-like eigenstate.  Its vanishing rules out spontaneously
// generated coherence between the trion states.
Complex beta_coupling(const DriveParams& p, SpinSign electron_spin = SpinSign::Plus);

// Angular part of the free-space emission integral:
// integral over emission directions of (u.eps)(v.eps), averaged over the
// two transverse polarizations, = (4pi/3) u.v (plain, unconjugated dot).
Complex angular_overlap_integral(const Eigen::Vector3cd& u, const Eigen::Vector3cd& v);

} // namespace flq
