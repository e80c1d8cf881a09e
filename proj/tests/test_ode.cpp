#include <doctest.h>

#include "flq/hamiltonian.hpp"
#include "flq/ode.hpp"
#include "flq/units.hpp"
#include "oracles.hpp"

using namespace flq;

namespace {

std::vector<double> grid(double t_end, int n) {
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) out[k] = t_end * k / (n - 1);
    return out;
}

} // namespace

TEST_SUITE("ode") {

TEST_CASE("no drive, no rates: the state is frozen") {
    const CMatrix zero = CMatrix::Zero(16, 16);
    const auto rho0 = DensityMatrix::basis_state(0);
    const auto traj = integrate(zero, zero, zero, 0.0, rho0, grid(5.0, 11));
    for (const auto& st : traj.states)
        CHECK(max_abs(st.matrix() - rho0.matrix()) < 1e-12);
}

TEST_CASE("pure relaxation matches the closed-form cascade") {
    RateMatrices r;
    r.relax(2, 0) = 1.54;    // 3 -> 1
    r.relax(2, 1) = 3.42e-3; // 3 -> 2
    const CMatrix l0 = build_L0(CMatrix::Zero(4, 4), r);
    const CMatrix zero = CMatrix::Zero(16, 16);
    const auto rho0 = DensityMatrix::basis_state(2);
    OdeOptions opts;
    opts.rel_tol = 1e-10;
    const auto times = grid(3.0, 31);
    const auto traj = integrate(l0, zero, zero, 0.0, rho0, times, opts);
    for (size_t k = 0; k < times.size(); ++k) {
        const auto ref = oracles::cascade(1.54, 3.42e-3, times[k]);
        CHECK(std::abs(traj.states[k].population(2) - ref.rho33) < 1e-8);
        CHECK(std::abs(traj.states[k].population(0) - ref.rho11) < 1e-8);
    }
}

TEST_CASE("resonant two-level drive performs textbook Rabi flopping") {
    // only the z- transition is driven; B = 0 keeps the manifolds closed
    DriveParams p;
    p.delta1_ghz = 50.0;
    p.omega2m_ghz = {0.5, 0.0}; // |Omega| = pi rad/ns, period 2 ns
    p.delta2_ghz = resonant_detuning_for_readout(p, SpinSign::Minus);
    CHECK(std::abs(p.delta2_ghz) < 1e-12);

    const auto blocks = build_H1(p);
    const CMatrix l0 = build_L0(build_H0(p), RateMatrices::zero());
    const CMatrix l1 = build_L1(blocks.h_plus);
    const CMatrix lm1 = build_L1(blocks.h_minus);
    const auto rho0 = DensityMatrix::basis_state(1);

    OdeOptions opts;
    opts.rel_tol = 1e-9;
    const double omega = units::angular(0.5);
    const auto times = grid(2.0, 81);
    const auto traj = integrate(l0, l1, lm1, blocks.nu, rho0, times, opts);

    double top = 0.0, bottom = 1.0;
    for (size_t k = 0; k < times.size(); ++k) {
        const double expected = std::pow(std::sin(omega * times[k] / 2.0), 2);
        const double got = traj.states[k].population(3);
        CHECK(std::abs(got - expected) < 1e-6);
        top = std::max(top, got);
        bottom = std::min(bottom, got);
    }
    CHECK(top - bottom >= 0.999); // full-contrast oscillation at |Omega2|
}

TEST_CASE("trace is conserved to the requested tolerance") {
    DriveParams p;
    p.bx_tesla = 0.1;
    p.g_ex = 0.24;
    p.g_hx = 0.47;
    p.omega1p_ghz = 200.0;
    p.delta1_ghz = 2000.0;
    p.omega2p_ghz = p.omega2m_ghz = Complex(0.5, 0.0);
    p.delta2_ghz = resonant_detuning_for_readout(p, SpinSign::Minus);
    const auto blocks = build_H1(p);
    const CMatrix l0 = build_L0(build_H0(p), RateMatrices::qd_typical());
    const CMatrix l1 = build_L1(blocks.h_plus);
    const CMatrix lm1 = build_L1(blocks.h_minus);
    const auto es = pseudo_faraday_eigensystem(p);
    const auto rho0 = DensityMatrix::pure(es.find(Manifold::Electron, SpinSign::Minus).vector);

    OdeOptions opts;
    opts.rel_tol = 1e-8;
    const auto traj = integrate(l0, l1, lm1, blocks.nu, rho0, grid(1.0, 21), opts);
    for (const auto& st : traj.states)
        CHECK(std::abs(st.matrix().trace() - Complex(1, 0)) < 10.0 * opts.rel_tol);
    CHECK(traj.stats.steps_accepted > 0);
    CHECK(traj.stats.max_step <= (units::two_pi / std::abs(blocks.nu)) / 20.0 + 1e-15);
}

TEST_CASE("self-convergence: tightening rel_tol gains at least 4th-order accuracy") {
    DriveParams p;
    p.bx_tesla = 0.1;
    p.g_ex = 0.24;
    p.g_hx = 0.47;
    p.omega1p_ghz = 200.0;
    p.delta1_ghz = 2000.0;
    p.omega2p_ghz = p.omega2m_ghz = Complex(0.5, 0.0);
    p.delta2_ghz = resonant_detuning_for_readout(p, SpinSign::Minus);
    const auto blocks = build_H1(p);
    const CMatrix l0 = build_L0(build_H0(p), RateMatrices::qd_typical());
    const CMatrix l1 = build_L1(blocks.h_plus);
    const CMatrix lm1 = build_L1(blocks.h_minus);
    const auto es = pseudo_faraday_eigensystem(p);
    const auto rho0 = DensityMatrix::pure(es.find(Manifold::Electron, SpinSign::Minus).vector);
    const auto times = grid(1.0, 6);

    auto deviation = [&](double rtol) {
        OdeOptions run, ref;
        run.rel_tol = rtol;
        ref.rel_tol = rtol / 100.0;
        const auto a = integrate(l0, l1, lm1, blocks.nu, rho0, times, run);
        const auto b = integrate(l0, l1, lm1, blocks.nu, rho0, times, ref);
        double dev = 0.0;
        for (size_t k = 0; k < times.size(); ++k)
            dev = std::max(dev, max_abs(a.states[k].matrix() - b.states[k].matrix()));
        return dev;
    };
    const double coarse = deviation(1e-6);
    const double fine = deviation(1e-7);
    CHECK(fine < coarse);
    // adaptive steps scale as tol^(1/5), so order >= 4 means a factor-10
    // tolerance tightening must shrink the error by >= 10^(4/5) ~ 6.3
    CHECK(coarse / fine >= 4.0);
}

TEST_CASE("direct-commutator mode tracks the supermatrix mode") {
    DriveParams p;
    p.bx_tesla = 0.1;
    p.g_ex = 0.24;
    p.g_hx = 0.47;
    p.omega1p_ghz = 200.0;
    p.delta1_ghz = 2000.0;
    p.omega2p_ghz = p.omega2m_ghz = Complex(0.5, 0.0);
    p.delta2_ghz = resonant_detuning_for_readout(p, SpinSign::Minus);
    const CMatrix h0 = build_H0(p);
    const auto blocks = build_H1(p);
    const RateMatrices rates = RateMatrices::qd_typical();
    const CMatrix l0 = build_L0(h0, rates);
    const CMatrix l1 = build_L1(blocks.h_plus);
    const CMatrix lm1 = build_L1(blocks.h_minus);
    const auto es = pseudo_faraday_eigensystem(p);
    const auto rho0 = DensityMatrix::pure(es.find(Manifold::Electron, SpinSign::Minus).vector);

    OdeOptions opts;
    opts.rel_tol = 1e-9;
    const auto times = grid(0.5, 6);
    const auto super = integrate(l0, l1, lm1, blocks.nu, rho0, times, opts);
    const auto direct = integrate_direct(h0, blocks.h_plus, blocks.h_minus, blocks.nu,
                                         rates, rho0, times, opts);
    for (size_t k = 0; k < times.size(); ++k)
        CHECK(max_abs(super.states[k].matrix() - direct.states[k].matrix()) < 1e-6);
}

TEST_CASE("guard rails: horizon cap, tolerance range, ordering") {
    const CMatrix zero = CMatrix::Zero(16, 16);
    const auto rho0 = DensityMatrix::basis_state(0);
    CHECK_THROWS_AS(integrate(zero, zero, zero, 0.0, rho0, grid(20.0, 5)), CapExceeded);

    OdeOptions loose;
    loose.rel_tol = 1e-3;
    CHECK_THROWS_AS(integrate(zero, zero, zero, 0.0, rho0, grid(1.0, 5), loose), Error);

    const std::vector<double> unsorted = {1.0, 0.5};
    CHECK_THROWS_AS(integrate(zero, zero, zero, 0.0, rho0, unsorted), Error);

    OdeOptions overridden;
    overridden.override_cap = true;
    CHECK_NOTHROW(integrate(zero, zero, zero, 0.0, rho0, grid(20.0, 5), overridden));
}

} // TEST_SUITE
