// Liouville-space machinery: density-matrix vectorization, the
// relaxation/dephasing dissipator, and the 16x16 supermatrix blocks that
// generate the open-system evolution.
#pragma once

#include <Eigen/Dense>

#include "flq/linalg.hpp"

namespace flq {

struct DmTolerances {
    double hermiticity = 1e-10;
    double trace = 1e-10;
    double positivity = 1e-8; // min eigenvalue >= -positivity
};

// 4x4 density matrix with validated invariants: Hermitian, unit trace,
// positive up to numerical slop.
class DensityMatrix {
  public:
    explicit DensityMatrix(CMatrix rho, const DmTolerances& tol = {});

    // Projector |psi><psi| from a normalized state vector.
    static DensityMatrix pure(const Eigen::Vector4cd& psi);
    static DensityMatrix basis_state(int index);

    const CMatrix& matrix() const { return rho_; }
    double population(int k) const { return rho_(k, k).real(); }

  private:
    CMatrix rho_;
};

// Population relaxation rates relax(a,b) = rate a -> b (ns^-1, zero
// diagonal) and symmetric pure-dephasing rates deph(a,b) for the coherence
// between a and b.
struct RateMatrices {
    Eigen::Matrix4d relax = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d deph = Eigen::Matrix4d::Zero();

    static RateMatrices zero() { return {}; }
    // Typical InGaAs quantum-dot rates: fast trion recombination, weak
    // spin-flipping recombination, slow electron spin decay, trion and
    // electron-spin pure dephasing.
    static RateMatrices qd_typical();

    RateMatrices scaled(double factor) const;
    void validate() const; // throws ValidationError
};

// Row-major flattening: (a,b) -> 4a+b, so rho(3,4) in 1-based index
// language lands at flat index 11.
CVector vectorize(const CMatrix& rho);
CMatrix devectorize(const CVector& v);

// Action of the dissipator on rho: diagonal entries gain
// sum_q(-relax(a,q) rho_aa + relax(q,a) rho_qq); off-diagonal entries
// decay at half the total depopulation rate of both states plus the pure
// dephasing rate.
CMatrix lindblad_apply(const RateMatrices& rates, const CMatrix& rho);

// Static Liouville supermatrix: commutator with h0 plus i * dissipator,
// so that -i L0 acting on vec(rho) gives -i[h0,rho] + dissipator(rho).
CMatrix build_L0(const CMatrix& h0, const RateMatrices& rates);

// Commutator supermatrix of one oscillatory Hamiltonian block (no
// dissipative part).
CMatrix build_L1(const CMatrix& h_pm);

} // namespace flq
