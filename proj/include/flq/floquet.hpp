// Truncated Floquet-Liouville supermatrix: a time-independent generator on
// Fourier-harmonic copies of Liouville space whose exponential propagates
// the periodically driven open system to arbitrary times without step-by-
// step integration.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "flq/linalg.hpp"
#include "flq/liouville.hpp"

namespace flq {

class FloquetOperator {
  public:
    // Assembles the block-tridiagonal supermatrix for harmonics m = +M..-M
    // (top to bottom): diagonal blocks l0 + m*nu*I, super-diagonal l1,
    // sub-diagonal lm1.  The spectral factorization is computed eagerly;
    // if its eigenvector condition exceeds cond_threshold the operator
    // transparently falls back to scaling-and-squaring exponentials.
    FloquetOperator(const CMatrix& l0, const CMatrix& l1, const CMatrix& lm1,
                    double nu, int order, double cond_threshold = 1e8);

    int order() const { return order_; }
    double nu() const { return nu_; }
    const CMatrix& matrix() const { return lf_; }
    bool spectral() const { return spectral_.has_value(); }
    double condition_estimate() const;

    // Density matrix at time t (ns): embeds rho0 in the zeroth Fourier
    // slot, applies exp(-i L_F t), and projects back with the harmonic
    // phase sum.  The result is re-Hermitized and trace-renormalized;
    // throws TraceDrift if the raw trace deviates from 1 by more than 1e-6.
    DensityMatrix propagate(const DensityMatrix& rho0, double t_ns) const;

    // Same results as repeated propagate calls (bit-identical on the
    // spectral path); one factorization amortized over all times.  Times
    // must be sorted ascending and non-negative.
    std::vector<DensityMatrix> propagate_batch(const DensityMatrix& rho0,
                                               std::span<const double> times) const;

    // Raw projected supervector before cleanup, for invariant checks.
    CMatrix propagate_raw(const DensityMatrix& rho0, double t_ns) const;

  private:
    struct Spectral {
        CVector values;
        CMatrix vectors;
        Eigen::PartialPivLU<CMatrix> lu;
        double cond;
    };

    CVector embed(const DensityMatrix& rho0) const;
    CMatrix project(const CVector& y, double t_ns) const;
    std::vector<CMatrix> evolve_raw(const DensityMatrix& rho0,
                                    std::span<const double> times) const;

    int order_;
    double nu_;
    CMatrix lf_;
    std::optional<Spectral> spectral_;
};

inline FloquetOperator build_LF(const CMatrix& l0, const CMatrix& l1, const CMatrix& lm1,
                                double nu, int order) {
    return FloquetOperator(l0, l1, lm1, nu, order);
}

// Smallest truncation order M <= m_max for which the propagated state at
// every probe time changes by at most tol (max over matrix elements) when
// going to M+1.  Throws NoConvergence if m_max is not enough.
int converge_truncation(const CMatrix& l0, const CMatrix& l1, const CMatrix& lm1,
                        double nu, const DensityMatrix& rho0,
                        std::span<const double> probe_times, double tol = 1e-8,
                        int m_max = 6);

} // namespace flq
