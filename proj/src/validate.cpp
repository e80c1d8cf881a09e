#include "flq/validate.hpp"

#include <algorithm>
#include <cmath>

#include "flq/floquet.hpp"
#include "flq/hamiltonian.hpp"
#include "flq/ode.hpp"
#include "flq/units.hpp"

namespace flq::check {

CMatrix lindblad_jump_form(const RateMatrices& rates, const CMatrix& rho) {
    CMatrix out = CMatrix::Zero(4, 4);
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const double rate = rates.relax(a, b);
            if (rate == 0.0) continue;
            // J = |b><a|: J rho J^dag - (1/2){J^dag J, rho}
            CMatrix j = CMatrix::Zero(4, 4);
            j(b, a) = 1.0;
            const CMatrix jdj = j.adjoint() * j;
            out += rate * (j * rho * j.adjoint() - 0.5 * (jdj * rho + rho * jdj));
        }
    }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            if (a != b) out(a, b) -= rates.deph(a, b) * rho(a, b);
    return out;
}

CMatrix random_density_matrix(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    CMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return rho;
}

namespace {

CheckResult make_result(std::string name, double metric, double bound, std::string detail = "") {
    CheckResult r;
    r.name = std::move(name);
    r.metric = metric;
    r.bound = bound;
    r.passed = metric <= bound;
    r.detail = std::move(detail);
    return r;
}

struct Blocks {
    CMatrix h0, l0, l1, lm1;
    DriveBlocks drive;
    DriveParams params;
};

Blocks assemble(const RunConfig& cfg, bool tune_delta2) {
    Blocks b;
    b.params = cfg.drive;
    if (tune_delta2)
        b.params.delta2_ghz = resonant_detuning_for_readout(b.params, cfg.target);
    b.h0 = build_H0(b.params);
    b.drive = build_H1(b.params);
    const RateMatrices rates = cfg.readout_config().rates;
    b.l0 = build_L0(b.h0, rates);
    b.l1 = build_L1(b.drive.h_plus);
    b.lm1 = build_L1(b.drive.h_minus);
    return b;
}

CheckResult check_lindblad_oracle(const RunConfig& cfg, std::mt19937_64& rng) {
    const RateMatrices rates = cfg.readout_config().rates;
    double dev = 0.0;
    for (int n = 0; n < 100; ++n) {
        const CMatrix rho = random_density_matrix(rng);
        dev = std::max(dev, max_abs(lindblad_apply(rates, rho) - lindblad_jump_form(rates, rho)));
    }
    return make_result("lindblad-vs-jump-oracle", dev, 1e-12,
                       "dissipator action on 100 random states");
}

CheckResult check_liouville_action(const RunConfig& cfg, std::mt19937_64& rng) {
    const auto b = assemble(cfg, true);
    const RateMatrices rates = cfg.readout_config().rates;
    const Complex i(0.0, 1.0);
    // The two routes share every elementary product, so agreement is
    // demanded at 1e-12 relative to the generator scale.
    const double scale =
        std::max(1.0, max_abs(b.l0) + max_abs(b.l1) + max_abs(b.lm1));
    double dev = 0.0;
    std::uniform_real_distribution<double> tdist(0.0, 1.0);
    for (int n = 0; n < 50; ++n) {
        const CMatrix rho = random_density_matrix(rng);
        const double t = tdist(rng);
        const Complex ph = std::exp(i * (b.drive.nu * t));
        const CMatrix lt = b.l0 + ph * b.l1 + std::conj(ph) * b.lm1;
        const CMatrix via_super = devectorize(CVector(-i * (lt * vectorize(rho))));
        const CMatrix ht = b.h0 + ph * b.drive.h_plus + std::conj(ph) * b.drive.h_minus;
        const CMatrix direct = -i * (ht * rho - rho * ht) + lindblad_apply(rates, rho);
        dev = std::max(dev, max_abs(via_super - direct) / scale);
    }
    return make_result("supermatrix-vs-direct-action", dev, 1e-12,
                       "relative to the generator norm");
}

CheckResult check_floquet_vs_ode(const RunConfig& cfg) {
    const auto b = assemble(cfg, true);
    const auto es = pseudo_faraday_eigensystem(b.params);
    const auto rho0 =
        DensityMatrix::pure(es.find(Manifold::Electron, cfg.target).vector);

    std::vector<double> times;
    for (int k = 0; k <= 20; ++k) times.push_back(2.0 * k / 20.0);

    OdeOptions opts;
    opts.rel_tol = cfg.engine.ode_rel_tol;
    const Trajectory traj = integrate(b.l0, b.l1, b.lm1, b.drive.nu, rho0, times, opts);

    const double probes[] = {1.0, 10.0, 100.0};
    const int m = cfg.engine.m_override >= 0
                      ? cfg.engine.m_override
                      : converge_truncation(b.l0, b.l1, b.lm1, b.drive.nu, rho0, probes,
                                            cfg.engine.truncation_tol);
    const FloquetOperator f(b.l0, b.l1, b.lm1, b.drive.nu, m);
    const auto fl = f.propagate_batch(rho0, times);

    double dev = 0.0;
    for (size_t k = 0; k < times.size(); ++k)
        dev = std::max(dev, max_abs(fl[k].matrix() - traj.states[k].matrix()));
    return make_result("floquet-vs-ode", dev, 1e-4,
                       "max elementwise deviation over [0,2] ns, M=" + std::to_string(m));
}

CheckResult check_trajectory_invariants(const RunConfig& cfg) {
    const auto b = assemble(cfg, true);
    const auto es = pseudo_faraday_eigensystem(b.params);
    const auto rho0 =
        DensityMatrix::pure(es.find(Manifold::Electron, cfg.target).vector);
    const double probes[] = {1.0, 10.0, 100.0};
    const int m = cfg.engine.m_override >= 0
                      ? cfg.engine.m_override
                      : converge_truncation(b.l0, b.l1, b.lm1, b.drive.nu, rho0, probes,
                                            cfg.engine.truncation_tol);
    const FloquetOperator f(b.l0, b.l1, b.lm1, b.drive.nu, m);

    double worst = 0.0;
    const int samples = 200;
    for (int k = 0; k < samples; ++k) {
        const double t = cfg.t_max_ns * k / (samples - 1);
        const CMatrix raw = f.propagate_raw(rho0, t);
        const double tr = std::abs(raw.trace() - Complex(1.0, 0.0)) / 1e-8;
        const double he = max_abs(raw - raw.adjoint()) / 1e-8;
        Eigen::SelfAdjointEigenSolver<CMatrix> eig((raw + raw.adjoint()) / 2.0);
        const double pos = std::max(0.0, -eig.eigenvalues().minCoeff()) / 1e-6;
        worst = std::max({worst, tr, he, pos});
    }
    return make_result("trajectory-invariants", worst, 1.0,
                       "trace/hermiticity/positivity as fractions of their bounds");
}

CheckResult check_closed_system_spectrum(const RunConfig& cfg) {
    const auto b = assemble(cfg, true);
    const CMatrix l0_closed = build_L0(b.h0, RateMatrices::zero());
    const Complex i(0.0, 1.0);
    const auto gen = eig_general(CMatrix(-i * l0_closed), 1e12);
    const auto h_eig = eig_hermitian(b.h0);

    std::vector<Complex> expected;
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
            expected.push_back(-i * Complex(h_eig.values[j] - h_eig.values[k], 0.0));

    // Greedy nearest matching of the two multisets.
    std::vector<bool> used(16, false);
    double dev = 0.0;
    for (const Complex& e : expected) {
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 16; ++k) {
            if (used[k]) continue;
            const double d = std::abs(gen.values[k] - e);
            if (d < bd) {
                bd = d;
                best = k;
            }
        }
        used[best] = true;
        dev = std::max(dev, bd);
    }
    return make_result("closed-system-spectrum", dev, 1e-9,
                       "eigenvalues of -iL0 vs differences of H0 eigenvalues");
}

CheckResult check_grid_doubling(const RunConfig& cfg) {
    ReadoutConfig rc = cfg.readout_config();
    const ReadoutResult coarse = run_readout(rc);
    rc.grid = 2 * rc.grid;
    const ReadoutResult fine = run_readout(rc);
    // evaluate both grids at the same window so the comparison measures
    // trapezoid accuracy rather than the (flat-maximum) jitter of T*
    const double t_fix = coarse.t_star;
    const double dc = detected_photons(coarse.times, coarse.r_minus, rc.epsilon, t_fix);
    const double df = detected_photons(fine.times, fine.r_minus, rc.epsilon, t_fix);
    const double rel = std::abs(dc - df) / std::max(1e-12, std::abs(df));
    return make_result("grid-doubling-dstar", rel, 1e-3,
                       "relative change of D(T*) when the time grid doubles");
}

} // namespace

std::vector<CheckResult> run_validation_suite(const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.engine.seed);
    std::vector<CheckResult> out;
    out.push_back(check_lindblad_oracle(cfg, rng));
    out.push_back(check_liouville_action(cfg, rng));
    out.push_back(check_closed_system_spectrum(cfg));
    out.push_back(check_floquet_vs_ode(cfg));
    out.push_back(check_trajectory_invariants(cfg));
    out.push_back(check_grid_doubling(cfg));
    return out;
}

} // namespace flq::check
