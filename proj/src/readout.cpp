#include "flq/readout.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include "flq/optics.hpp"
#include "flq/units.hpp"

namespace flq {

void ReadoutConfig::validate() const {
    drive.validate();
    rates.validate();
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw ValidationError("ReadoutConfig: epsilon must lie in [0,1]");
    if (!(t_max_ns > 0.0))
        throw ValidationError("ReadoutConfig: t_max_ns must be > 0");
    if (grid < 16)
        throw ValidationError("ReadoutConfig: grid must be >= 16");
    if (!(truncation_tol > 0.0))
        throw ValidationError("ReadoutConfig: truncation_tol must be > 0");
}

double emission_rate(const DensityMatrix& rho, const RateMatrices& rates) {
    const Complex r = rates.relax(2, 0) * rho.matrix()(2, 2) +
                      rates.relax(3, 1) * rho.matrix()(3, 3);
    if (std::abs(r.imag()) > 1e-10)
        throw Error("emission_rate: imaginary residue " + std::to_string(r.imag()));
    return r.real();
}

double detected_photons(std::span<const double> times, std::span<const double> rate,
                        double epsilon, double t) {
    if (times.size() != rate.size() || times.size() < 2)
        throw Error("detected_photons: need matching time/rate series of length >= 2");
    if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
        throw OutOfRange("detected_photons: t = " + std::to_string(t) +
                         " outside sampled interval");
    t = std::clamp(t, times.front(), times.back());

    double acc = 0.0;
    for (size_t k = 1; k < times.size(); ++k) {
        if (t <= times[k]) {
            const double dt = times[k] - times[k - 1];
            const double frac = dt > 0.0 ? (t - times[k - 1]) / dt : 0.0;
            const double r_t = rate[k - 1] + frac * (rate[k] - rate[k - 1]);
            acc += 0.5 * (rate[k - 1] + r_t) * (t - times[k - 1]);
            break;
        }
        acc += 0.5 * (rate[k - 1] + rate[k]) * (times[k] - times[k - 1]);
    }
    return epsilon * acc;
}

double detection_probability(double d, ProbabilityModel model) {
    if (!(d >= 0.0)) throw Error("detection_probability: mean count must be >= 0");
    switch (model) {
        case ProbabilityModel::Poisson: return -std::expm1(-d);
        case ProbabilityModel::CappedLinear: return std::min(d, 1.0);
    }
    throw Error("detection_probability: unknown model");
}

double fidelity(double p_plus, double p_minus) {
    return (1.0 - p_plus + p_minus) / 2.0;
}

namespace {

// Golden-section maximization of f on [a,b] to the given x tolerance.
double golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return (a + b) / 2.0;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k)
        out[k] = n > 1 ? lo + (hi - lo) * double(k) / double(n - 1) : lo;
    return out;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& times,
                                         const std::vector<double>& y, double scale) {
    std::vector<double> out(times.size(), 0.0);
    for (size_t k = 1; k < times.size(); ++k)
        out[k] = out[k - 1] + scale * 0.5 * (y[k - 1] + y[k]) * (times[k] - times[k - 1]);
    return out;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    threads = std::max(1, std::min(threads, n));
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace

ReadoutResult run_readout(const ReadoutConfig& cfg) {
    cfg.validate();

    DriveParams p = cfg.drive;
    p.delta2_ghz = resonant_detuning_for_readout(p, cfg.target);

    const CMatrix h0 = build_H0(p);
    const DriveBlocks drive = build_H1(p);
    const CMatrix l0 = build_L0(h0, cfg.rates);
    const CMatrix l1 = build_L1(drive.h_plus);
    const CMatrix lm1 = build_L1(drive.h_minus);

    const auto es = pseudo_faraday_eigensystem(p);
    const auto rho0_minus =
        DensityMatrix::pure(es.find(Manifold::Electron, SpinSign::Minus).vector);
    const auto rho0_plus =
        DensityMatrix::pure(es.find(Manifold::Electron, SpinSign::Plus).vector);

    ReadoutResult res;
    res.delta2_ghz = p.delta2_ghz;

    int m = cfg.m_override;
    if (m < 0) {
        const double probes[] = {1.0, 10.0, 100.0};
        m = converge_truncation(l0, l1, lm1, drive.nu,
                                cfg.target == SpinSign::Minus ? rho0_minus : rho0_plus,
                                probes, cfg.truncation_tol);
    }
    res.m_used = m;

    const FloquetOperator f(l0, l1, lm1, drive.nu, m);
    res.times = linspace(0.0, cfg.t_max_ns, cfg.grid);

    const auto traj_minus = f.propagate_batch(rho0_minus, res.times);
    const auto traj_plus = f.propagate_batch(rho0_plus, res.times);

    res.r_minus.resize(cfg.grid);
    res.r_plus.resize(cfg.grid);
    for (int k = 0; k < cfg.grid; ++k) {
        res.r_minus[k] = emission_rate(traj_minus[k], cfg.rates);
        res.r_plus[k] = emission_rate(traj_plus[k], cfg.rates);
    }
    res.d_minus = cumulative_trapezoid(res.times, res.r_minus, cfg.epsilon);
    res.d_plus = cumulative_trapezoid(res.times, res.r_plus, cfg.epsilon);

    // Detection of the addressed transition confirms the target state.
    const bool target_minus = cfg.target == SpinSign::Minus;
    const auto& d_addr = target_minus ? res.d_minus : res.d_plus;
    const auto& d_other = target_minus ? res.d_plus : res.d_minus;

    res.fidelity_curve.resize(cfg.grid);
    for (int k = 0; k < cfg.grid; ++k)
        res.fidelity_curve[k] = fidelity(detection_probability(d_other[k], cfg.prob_model),
                                         detection_probability(d_addr[k], cfg.prob_model));

    int k_star = 0;
    for (int k = 1; k < cfg.grid; ++k)
        if (res.fidelity_curve[k] > res.fidelity_curve[k_star]) k_star = k;

    const auto& rate_addr = target_minus ? res.r_minus : res.r_plus;
    const auto& rate_other = target_minus ? res.r_plus : res.r_minus;
    auto f_of_t = [&](double t) {
        const double da = detected_photons(res.times, rate_addr, cfg.epsilon, t);
        const double doth = detected_photons(res.times, rate_other, cfg.epsilon, t);
        return fidelity(detection_probability(doth, cfg.prob_model),
                        detection_probability(da, cfg.prob_model));
    };
    const double lo = res.times[std::max(0, k_star - 1)];
    const double hi = res.times[std::min(cfg.grid - 1, k_star + 1)];
    res.t_star = lo < hi ? golden_max(f_of_t, lo, hi, 0.1) : res.times[k_star];
    res.f_star = f_of_t(res.t_star);
    res.d_star = detected_photons(res.times, rate_addr, cfg.epsilon, res.t_star);
    return res;
}

namespace {

struct ManifoldFrequencies {
    double e_lower, e_upper;       // GHz, absolute
    double t_lower_rel, t_upper_rel; // GHz, relative to omega0
};

// Classifies numeric eigenpairs by electron/trion weight and removes the
// rotating-frame offsets, so traces are comparable across a sweep even
// where z labels are undefined (the Voigt limit).
ManifoldFrequencies manifold_frequencies(const DriveParams& p) {
    const auto eig = eig_hermitian(build_H0(p));
    const double half_d1 = units::angular(p.delta1_ghz) / 2.0;
    std::vector<double> e, t;
    for (int i = 0; i < 4; ++i) {
        const double w_e = std::norm(eig.vectors(0, i)) + std::norm(eig.vectors(1, i));
        if (w_e >= 0.5)
            e.push_back(eig.values[i] + half_d1);
        else
            t.push_back(eig.values[i] - half_d1);
    }
    if (e.size() != 2 || t.size() != 2)
        throw AmbiguousLabeling("manifold classification failed: mixing exceeds 1/2");
    std::sort(e.begin(), e.end());
    std::sort(t.begin(), t.end());
    return {units::to_ghz(e[0]), units::to_ghz(e[1]), units::to_ghz(t[0]),
            units::to_ghz(t[1])};
}

} // namespace

Table fig2_zeeman(DriveParams p, double bx_max_tesla, int points) {
    Table tab;
    tab.columns = {"Bx_T", "f_e_xminus_GHz", "f_e_xplus_GHz", "f_t_xplus_rel_GHz",
                   "f_t_xminus_rel_GHz"};
    for (double bx : linspace(0.0, bx_max_tesla, points)) {
        p.bx_tesla = bx;
        const auto es = zeeman_eigensystem(p);
        tab.rows.push_back({bx, units::to_ghz(es.states[0].value),
                            units::to_ghz(es.states[1].value),
                            units::to_ghz(es.states[2].value),
                            units::to_ghz(es.states[3].value)});
    }
    return tab;
}

Table fig2_acstark(DriveParams p, double omega_max_ghz, int points) {
    Table tab;
    tab.columns = {"Omega1p_GHz", "f_e_zplus_GHz", "f_e_zminus_GHz", "f_t_zplus_rel_GHz",
                   "f_t_zminus_rel_GHz"};
    p.bx_tesla = 0.0;
    for (double om : linspace(0.0, omega_max_ghz, points)) {
        p.omega1p_ghz = om;
        const auto ac = acstark_eigensystem(p);
        const double half_d1 = units::angular(p.delta1_ghz) / 2.0;
        auto rel = [&](Manifold m, SpinSign s) {
            const auto& st = ac.exact.find(m, s);
            return units::to_ghz(m == Manifold::Electron ? st.value + half_d1
                                                         : st.value - half_d1);
        };
        tab.rows.push_back({om, rel(Manifold::Electron, SpinSign::Plus),
                            rel(Manifold::Electron, SpinSign::Minus),
                            rel(Manifold::Trion, SpinSign::Plus),
                            rel(Manifold::Trion, SpinSign::Minus)});
    }
    return tab;
}

Table fig3_bfield(DriveParams p, double bx_max_tesla, int points) {
    Table tab;
    tab.columns = {"Bx_T", "f_e_lower_GHz", "f_e_upper_GHz", "f_t_lower_rel_GHz",
                   "f_t_upper_rel_GHz"};
    p.omega1p_ghz = 0.0;
    for (double bx : linspace(0.0, bx_max_tesla, points)) {
        p.bx_tesla = bx;
        const auto mf = manifold_frequencies(p);
        tab.rows.push_back({bx, mf.e_lower, mf.e_upper, mf.t_lower_rel, mf.t_upper_rel});
    }
    return tab;
}

Table fig3_rabi(DriveParams p, double omega_max_ghz, int points) {
    Table tab;
    tab.columns = {"Omega1p_GHz", "f_e_lower_GHz", "f_e_upper_GHz", "f_t_lower_rel_GHz",
                   "f_t_upper_rel_GHz"};
    for (double om : linspace(0.0, omega_max_ghz, points)) {
        p.omega1p_ghz = om;
        const auto mf = manifold_frequencies(p);
        tab.rows.push_back({om, mf.e_lower, mf.e_upper, mf.t_lower_rel, mf.t_upper_rel});
    }
    return tab;
}

Table fig4(DriveParams p, double omega_max_ghz, int points) {
    Table tab;
    tab.columns = {"Omega1p_GHz", "r_B"};
    for (double om : linspace(0.0, omega_max_ghz, points)) {
        p.omega1p_ghz = om;
        tab.rows.push_back({om, branching_ratio(p)});
    }
    return tab;
}

Table fig5(const ReadoutConfig& cfg, ReadoutResult* result_out) {
    const ReadoutResult res = run_readout(cfg);
    Table tab;
    tab.columns = {"T_ns", "R_minus", "R_plus", "D_minus", "D_plus", "F"};
    for (size_t k = 0; k < res.times.size(); ++k)
        tab.rows.push_back({res.times[k], res.r_minus[k], res.r_plus[k], res.d_minus[k],
                            res.d_plus[k], res.fidelity_curve[k]});
    if (result_out) *result_out = res;
    return tab;
}

std::string to_csv(const Table& t) {
    std::string out;
    for (size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out += ',';
        out += t.columns[c];
    }
    out += '\n';
    char buf[40];
    for (const auto& row : t.rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            std::snprintf(buf, sizeof buf, "%.17g", row[c]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

Table sweep_readout(const ReadoutConfig& base, const std::string& param_label,
                    const ParamSetter& set, double from, double to, int points,
                    int threads) {
    if (points < 1) throw ValidationError("sweep: points must be >= 1");
    const auto values = linspace(from, to, points);
    std::vector<std::vector<double>> rows(points);
    parallel_for(points, threads, [&](int i) {
        ReadoutConfig cfg = base;
        set(cfg, values[i]);
        const ReadoutResult res = run_readout(cfg);
        const double rb = branching_ratio(cfg.drive);
        rows[i] = {values[i], rb, res.f_star, res.t_star, res.d_star};
    });
    Table tab;
    tab.columns = {param_label, "r_B", "F_star", "T_star_ns", "D_star"};
    tab.rows = std::move(rows);
    return tab;
}

} // namespace flq
