#include "flq/ode.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "flq/units.hpp"

namespace flq {

namespace {

const Complex kImag(0.0, 1.0);

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights, for the error estimate.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output coefficients (4th-order continuous extension).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

using Rhs = std::function<CVector(double, const CVector&)>;

struct DenseSegment {
    double t0 = 0.0, h = 0.0;
    CVector r1, r2, r3, r4, r5;

    CVector eval(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
    }
};

// Adaptive integration from t = 0 to t_end; on_segment fires after each
// accepted step so the caller can pull dense-output samples.
IntegratorStats dopri5(const Rhs& rhs, double t_end, CVector y, const OdeOptions& opts,
                       double max_step_cap,
                       const std::function<void(const DenseSegment&)>& on_segment) {
    if (opts.rel_tol < 1e-12 || opts.rel_tol > 1e-4)
        throw Error("integrate: rel_tol must lie in [1e-12, 1e-4]");

    IntegratorStats stats;
    if (t_end <= 0.0) return stats;

    const auto error_norm = [&](const CVector& err, const CVector& y0, const CVector& y1) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < err.size(); ++i) {
            const double scale =
                opts.abs_tol + opts.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
            const double q = std::abs(err[i]) / scale;
            acc += q * q;
        }
        return std::sqrt(acc / static_cast<double>(err.size()));
    };

    double t = 0.0;
    double h = std::min(max_step_cap, t_end / 100.0);
    double err_prev = 1.0;
    CVector k1 = rhs(t, y);

    const double t_done = t_end * (1.0 - 1e-14);
    while (t < t_done) {
        h = std::min(h, max_step_cap);
        // A tiny step is only an error when the controller demands it; a
        // short final step to land on t_end is fine.
        if (h < opts.min_step)
            throw StepUnderflow("integrate: required step " + std::to_string(h) +
                                " ns below minimum " + std::to_string(opts.min_step));
        const double hs = std::min(h, t_end - t);

        const CVector k2 = rhs(t + c2 * hs, y + hs * (a21 * k1));
        const CVector k3 = rhs(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        const CVector k4 = rhs(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const CVector k5 =
            rhs(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const CVector k6 =
            rhs(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const CVector y1 =
            y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const CVector k7 = rhs(t + hs, y1);

        const CVector err =
            hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err_n = error_norm(err, y, y1);

        if (err_n <= 1.0) {
            DenseSegment seg;
            seg.t0 = t;
            seg.h = hs;
            seg.r1 = y;
            seg.r2 = y1 - y;
            seg.r3 = hs * k1 - seg.r2;
            seg.r4 = seg.r2 - hs * k7 - seg.r3;
            seg.r5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            on_segment(seg);

            stats.steps_accepted++;
            stats.max_step = std::max(stats.max_step, hs);
            t += hs;
            y = y1;
            k1 = k7; // first-same-as-last

            const double fac =
                0.9 * std::pow(std::max(err_n, 1e-10), -0.17) * std::pow(err_prev, 0.04);
            h = hs * std::clamp(fac, 0.2, 5.0);
            err_prev = std::max(err_n, 1e-10);
        } else {
            stats.steps_rejected++;
            h = hs * std::clamp(0.9 * std::pow(err_n, -0.2), 0.1, 1.0);
        }
    }
    return stats;
}

Trajectory run(const Rhs& rhs, double nu, const DensityMatrix& rho0,
               std::span<const double> sample_times, const OdeOptions& opts) {
    Trajectory traj;
    traj.times.assign(sample_times.begin(), sample_times.end());
    if (!std::is_sorted(traj.times.begin(), traj.times.end()))
        throw Error("integrate: sample times must be sorted ascending");
    if (!traj.times.empty() && traj.times.front() < 0.0)
        throw Error("integrate: sample times must be >= 0");

    const double t_end = traj.times.empty() ? 0.0 : traj.times.back();
    if (t_end > opts.t_end_cap && !opts.override_cap)
        throw CapExceeded("integrate: t_end " + std::to_string(t_end) + " ns exceeds cap " +
                          std::to_string(opts.t_end_cap) + " ns (set override to run anyway)");

    const double osc_cap = nu != 0.0 ? (units::two_pi / std::abs(nu)) / 20.0
                                     : std::numeric_limits<double>::infinity();

    const DmTolerances relaxed{1e-7, 1e-7, 1e-3};
    const CVector y0 = vectorize(rho0.matrix());

    size_t next = 0;
    while (next < traj.times.size() && traj.times[next] == 0.0) {
        traj.states.emplace_back(rho0.matrix(), relaxed);
        ++next;
    }

    DenseSegment last;
    auto collect = [&](const DenseSegment& seg) {
        const double reach = seg.t0 + seg.h * (1.0 + 1e-12);
        while (next < traj.times.size() && traj.times[next] <= reach) {
            traj.states.emplace_back(devectorize(seg.eval(traj.times[next])), relaxed);
            ++next;
        }
        last = seg;
    };

    traj.stats = dopri5(rhs, t_end, y0, opts, osc_cap, collect);

    // Samples at t_end can be missed by a hair of rounding; they belong to
    // the final segment.
    while (next < traj.times.size() && last.h > 0.0) {
        traj.states.emplace_back(devectorize(last.eval(traj.times[next])), relaxed);
        ++next;
    }
    if (traj.states.size() != traj.times.size())
        throw Error("integrate: dense output failed to cover all sample times");
    return traj;
}

} // namespace

Trajectory integrate(const CMatrix& l0, const CMatrix& l1, const CMatrix& lm1,
                     double nu, const DensityMatrix& rho0,
                     std::span<const double> sample_times, const OdeOptions& opts) {
    const CMatrix a0 = -kImag * l0;
    const CMatrix a1 = -kImag * l1;
    const CMatrix am = -kImag * lm1;
    Rhs rhs = [&a0, &a1, &am, nu](double t, const CVector& y) -> CVector {
        const Complex ph = std::exp(kImag * (nu * t));
        return a0 * y + ph * (a1 * y) + std::conj(ph) * (am * y);
    };
    return run(rhs, nu, rho0, sample_times, opts);
}

Trajectory integrate_direct(const CMatrix& h0, const CMatrix& h_plus, const CMatrix& h_minus,
                            double nu, const RateMatrices& rates, const DensityMatrix& rho0,
                            std::span<const double> sample_times, const OdeOptions& opts) {
    rates.validate();
    Rhs rhs = [&h0, &h_plus, &h_minus, &rates, nu](double t, const CVector& y) -> CVector {
        const Complex ph = std::exp(kImag * (nu * t));
        const CMatrix rho = devectorize(y);
        const CMatrix h = h0 + ph * h_plus + std::conj(ph) * h_minus;
        const CMatrix drho = -kImag * (h * rho - rho * h) + lindblad_apply(rates, rho);
        return vectorize(drho);
    };
    return run(rhs, nu, rho0, sample_times, opts);
}

} // namespace flq
