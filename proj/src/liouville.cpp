#include "flq/liouville.hpp"

#include <cmath>
#include <string>

namespace flq {

DensityMatrix::DensityMatrix(CMatrix rho, const DmTolerances& tol) : rho_(std::move(rho)) {
    if (rho_.rows() != 4 || rho_.cols() != 4)
        throw ValidationError("DensityMatrix: expected 4x4");
    const double herm = max_abs(rho_ - rho_.adjoint());
    if (herm > tol.hermiticity)
        throw ValidationError("DensityMatrix: Hermiticity deviation " + std::to_string(herm));
    const double tr_err = std::abs(rho_.trace() - Complex(1.0, 0.0));
    if (tr_err > tol.trace)
        throw ValidationError("DensityMatrix: trace deviates from 1 by " + std::to_string(tr_err));
    Eigen::SelfAdjointEigenSolver<CMatrix> es((rho_ + rho_.adjoint()) / 2.0);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -tol.positivity)
        throw ValidationError("DensityMatrix: negative eigenvalue " + std::to_string(min_eig));
}

DensityMatrix DensityMatrix::pure(const Eigen::Vector4cd& psi) {
    if (std::abs(psi.norm() - 1.0) > 1e-10)
        throw NotNormalized("DensityMatrix::pure: state vector must be unit norm");
    return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix DensityMatrix::basis_state(int index) {
    return pure(Eigen::Vector4cd::Unit(index));
}

RateMatrices RateMatrices::qd_typical() {
    RateMatrices r;
    r.relax(2, 0) = 1.54;    // trion z+ -> electron z+
    r.relax(3, 1) = 1.54;    // trion z- -> electron z-
    r.relax(3, 0) = 3.42e-3; // weakly allowed, spin-flipping
    r.relax(2, 1) = 3.42e-3;
    r.relax(1, 0) = 5.0e-8;  // electron spin decay
    r.relax(0, 1) = 5.0e-8;
    // Trion dephasing: the trion level jitters as a whole, so every
    // electron-trion coherence dephases at the same rate (leaving any of
    // the four entries at zero makes the generator non-completely-positive
    // and the state transiently dips to eigenvalues ~ -1e-4).
    r.deph(2, 0) = r.deph(0, 2) = 1.72;
    r.deph(3, 1) = r.deph(1, 3) = 1.72;
    r.deph(3, 0) = r.deph(0, 3) = 1.72;
    r.deph(2, 1) = r.deph(1, 2) = 1.72;
    r.deph(0, 1) = r.deph(1, 0) = 1.26e-2; // electron spin dephasing
    return r;
}

RateMatrices RateMatrices::scaled(double factor) const {
    RateMatrices out = *this;
    out.relax *= factor;
    out.deph *= factor;
    return out;
}

void RateMatrices::validate() const {
    for (int a = 0; a < 4; ++a) {
        if (relax(a, a) != 0.0 || deph(a, a) != 0.0)
            throw ValidationError("RateMatrices: diagonal entries must be zero");
        for (int b = 0; b < 4; ++b) {
            if (!(relax(a, b) >= 0.0) || !(deph(a, b) >= 0.0))
                throw ValidationError("RateMatrices: rates must be finite and >= 0");
            if (deph(a, b) != deph(b, a))
                throw ValidationError("RateMatrices: dephasing matrix must be symmetric");
        }
    }
}

CVector vectorize(const CMatrix& rho) {
    CVector v(16);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) v[4 * a + b] = rho(a, b);
    return v;
}

CMatrix devectorize(const CVector& v) {
    CMatrix rho(4, 4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) rho(a, b) = v[4 * a + b];
    return rho;
}

CMatrix lindblad_apply(const RateMatrices& rates, const CMatrix& rho) {
    rates.validate();
    CMatrix out = CMatrix::Zero(4, 4);
    for (int a = 0; a < 4; ++a) {
        for (int q = 0; q < 4; ++q)
            out(a, a) += -rates.relax(a, q) * rho(a, a) + rates.relax(q, a) * rho(q, q);
        for (int b = 0; b < 4; ++b) {
            if (a == b) continue;
            double decay = rates.deph(a, b);
            for (int q = 0; q < 4; ++q) decay += 0.5 * (rates.relax(a, q) + rates.relax(b, q));
            out(a, b) = -decay * rho(a, b);
        }
    }
    return out;
}

CMatrix build_L0(const CMatrix& h0, const RateMatrices& rates) {
    rates.validate();
    const double herm = max_abs(h0 - h0.adjoint());
    if (herm > 1e-10 * std::max(1.0, max_abs(h0)))
        throw NotHermitian("build_L0: h0 must be Hermitian");

    // Row (a,b), column (m,n).  The Hamiltonian enters as the commutator
    // h0(a,m) d_bn - h0(n,b) d_am; the dissipator enters multiplied by i so
    // that the physical generator is -i * L0.
    const Complex i(0.0, 1.0);
    CMatrix l = CMatrix::Zero(16, 16);
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const int row = 4 * a + b;
            for (int m = 0; m < 4; ++m) {
                l(row, 4 * m + b) += h0(a, m);
                l(row, 4 * a + m) -= h0(m, b);
            }
            if (a == b) {
                for (int m = 0; m < 4; ++m) l(row, 4 * m + m) += i * rates.relax(m, a);
                for (int q = 0; q < 4; ++q) l(row, row) -= i * rates.relax(a, q);
            } else {
                double decay = rates.deph(a, b);
                for (int q = 0; q < 4; ++q)
                    decay += 0.5 * (rates.relax(a, q) + rates.relax(b, q));
                l(row, row) -= i * decay;
            }
        }
    }
    return l;
}

CMatrix build_L1(const CMatrix& h_pm) {
    if (h_pm.rows() != 4 || h_pm.cols() != 4)
        throw Error("build_L1: expected 4x4 Hamiltonian block");
    CMatrix l = CMatrix::Zero(16, 16);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const int row = 4 * a + b;
            for (int m = 0; m < 4; ++m) {
                l(row, 4 * m + b) += h_pm(a, m);
                l(row, 4 * a + m) -= h_pm(m, b);
            }
        }
    return l;
}

} // namespace flq
