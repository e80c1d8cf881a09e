// Brute-force propagator for the time-dependent Liouville equation:
// adaptive Dormand-Prince 5(4) integration with the step size tied to the
// drive oscillation period.  Exists to cross-validate the Floquet engine
// on short horizons.
#pragma once

#include <span>
#include <vector>

#include "flq/liouville.hpp"
#include "flq/params.hpp"

namespace flq {

struct IntegratorStats {
    long steps_accepted = 0;
    long steps_rejected = 0;
    double max_step = 0.0; // largest accepted step, ns
};

struct Trajectory {
    std::vector<double> times; // ns, sorted
    std::vector<DensityMatrix> states;
    IntegratorStats stats;
};

struct OdeOptions {
    double rel_tol = 1e-8;       // must lie in [1e-12, 1e-4]
    double abs_tol = 1e-12;
    double t_end_cap = 10.0;     // ns; CapExceeded beyond unless overridden
    bool override_cap = false;
    double min_step = 1e-9;      // ns; StepUnderflow below
};

// Integrates d(vec rho)/dt = -i (l0 + l1 e^{i nu t} + lm1 e^{-i nu t}) vec rho
// and samples the solution at the given sorted times via 4th-order dense
// output.  The step size is additionally capped at one twentieth of the
// oscillation period 2pi/|nu|.
Trajectory integrate(const CMatrix& l0, const CMatrix& l1, const CMatrix& lm1,
                     double nu, const DensityMatrix& rho0,
                     std::span<const double> sample_times, const OdeOptions& opts = {});

// Same trajectory computed without supermatrices: d rho/dt = -i[H(t), rho]
// + dissipator(rho) assembled directly from the 4x4 Hamiltonian blocks.
// Used to cross-check the supermatrix construction.
Trajectory integrate_direct(const CMatrix& h0, const CMatrix& h_plus, const CMatrix& h_minus,
                            double nu, const RateMatrices& rates, const DensityMatrix& rho0,
                            std::span<const double> sample_times, const OdeOptions& opts = {});

} // namespace flq
