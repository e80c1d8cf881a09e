#include "flq/floquet.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace flq {

namespace {
constexpr int kBlock = 16;
const Complex kImag(0.0, 1.0);
} // namespace

FloquetOperator::FloquetOperator(const CMatrix& l0, const CMatrix& l1, const CMatrix& lm1,
                                 double nu, int order, double cond_threshold)
    : order_(order), nu_(nu) {
    if (order < 0) throw Error("FloquetOperator: truncation order must be >= 0");
    if (l0.rows() != kBlock || l0.cols() != kBlock || l1.rows() != kBlock ||
        l1.cols() != kBlock || lm1.rows() != kBlock || lm1.cols() != kBlock)
        throw Error("FloquetOperator: blocks must be 16x16");

    const int nb = 2 * order + 1;
    const int n = kBlock * nb;
    lf_ = CMatrix::Zero(n, n);
    const CMatrix id = CMatrix::Identity(kBlock, kBlock);
    for (int b = 0; b < nb; ++b) {
        const int m = order - b; // harmonic index, +M at the top
        lf_.block(kBlock * b, kBlock * b, kBlock, kBlock) = l0 + (m * nu) * id;
        if (b + 1 < nb) {
            lf_.block(kBlock * b, kBlock * (b + 1), kBlock, kBlock) = l1;
            lf_.block(kBlock * (b + 1), kBlock * b, kBlock, kBlock) = lm1;
        }
    }

    try {
        auto eig = eig_general(lf_, cond_threshold);
        Spectral s;
        s.values = std::move(eig.values);
        s.vectors = std::move(eig.right_vectors);
        s.cond = eig.condition_estimate;
        s.lu = Eigen::PartialPivLU<CMatrix>(s.vectors);
        spectral_ = std::move(s);
    } catch (const IllConditioned&) {
        spectral_.reset();
    } catch (const NoConvergence&) {
        spectral_.reset();
    }
}

double FloquetOperator::condition_estimate() const {
    return spectral_ ? spectral_->cond : std::numeric_limits<double>::infinity();
}

CVector FloquetOperator::embed(const DensityMatrix& rho0) const {
    CVector x0 = CVector::Zero(lf_.rows());
    x0.segment(kBlock * order_, kBlock) = vectorize(rho0.matrix()); // m = 0 slot
    return x0;
}

CMatrix FloquetOperator::project(const CVector& y, double t_ns) const {
    // rho_vec(t) = sum_m e^{i m nu t} y_m with m = order - block_index
    CVector rho_vec = CVector::Zero(kBlock);
    const int nb = 2 * order_ + 1;
    for (int b = 0; b < nb; ++b) {
        const int m = order_ - b;
        rho_vec += std::exp(kImag * (m * nu_ * t_ns)) * y.segment(kBlock * b, kBlock);
    }
    return devectorize(rho_vec);
}

std::vector<CMatrix> FloquetOperator::evolve_raw(const DensityMatrix& rho0,
                                                 std::span<const double> times) const {
    for (size_t k = 0; k < times.size(); ++k) {
        if (times[k] < 0.0) throw Error("propagate: time must be >= 0");
        if (k > 0 && times[k] < times[k - 1])
            throw Error("propagate_batch: times must be sorted ascending");
    }

    std::vector<CMatrix> out;
    out.reserve(times.size());

    if (spectral_) {
        const CVector w = spectral_->lu.solve(embed(rho0));
        CVector phases(lf_.rows());
        for (double t : times) {
            for (Eigen::Index k = 0; k < phases.size(); ++k)
                phases[k] = std::exp(-kImag * spectral_->values[k] * t);
            const CVector y = spectral_->vectors * phases.cwiseProduct(w).eval();
            out.push_back(project(y, t));
        }
        return out;
    }

    // expm fallback: step incrementally, caching the step propagator for
    // each distinct time increment (one expm total on uniform grids).
    std::map<double, CMatrix> step_cache;
    CVector y = embed(rho0);
    double t_prev = 0.0;
    for (double t : times) {
        const double dt = t - t_prev;
        if (dt > 0.0) {
            auto it = step_cache.find(dt);
            if (it == step_cache.end())
                it = step_cache.emplace(dt, expm(CMatrix(-kImag * dt * lf_))).first;
            y = it->second * y;
        }
        t_prev = t;
        out.push_back(project(y, t));
    }
    return out;
}

CMatrix FloquetOperator::propagate_raw(const DensityMatrix& rho0, double t_ns) const {
    const double times[1] = {t_ns};
    return evolve_raw(rho0, times)[0];
}

namespace {

DensityMatrix cleanup(const CMatrix& raw) {
    const double tr_err = std::abs(raw.trace() - Complex(1.0, 0.0));
    if (tr_err > 1e-6)
        throw TraceDrift("propagate: |trace - 1| = " + std::to_string(tr_err) +
                         "; increase the truncation order or check conditioning");
    CMatrix rho = (raw + raw.adjoint()) / 2.0;
    rho /= rho.trace().real();
    // Loose positivity guard: non-completely-positive dephasing patterns
    // can dip an eigenvalue to ~1e-4 during transients; only gross
    // breakdown of the propagation is caught here.
    return DensityMatrix(std::move(rho), DmTolerances{1e-9, 1e-9, 1e-3});
}

} // namespace

DensityMatrix FloquetOperator::propagate(const DensityMatrix& rho0, double t_ns) const {
    return cleanup(propagate_raw(rho0, t_ns));
}

std::vector<DensityMatrix> FloquetOperator::propagate_batch(
    const DensityMatrix& rho0, std::span<const double> times) const {
    const auto raws = evolve_raw(rho0, times);
    std::vector<DensityMatrix> out;
    out.reserve(raws.size());
    for (const auto& raw : raws) out.push_back(cleanup(raw));
    return out;
}

int converge_truncation(const CMatrix& l0, const CMatrix& l1, const CMatrix& lm1,
                        double nu, const DensityMatrix& rho0,
                        std::span<const double> probe_times, double tol, int m_max) {
    if (!(tol > 0.0)) throw Error("converge_truncation: tol must be > 0");

    std::vector<double> times(probe_times.begin(), probe_times.end());
    std::sort(times.begin(), times.end());

    // Raw (pre-cleanup) states: intermediate truncation orders may be
    // unphysical, which is exactly what the scan needs to see.
    auto evaluate = [&](int order) {
        FloquetOperator f(l0, l1, lm1, nu, order);
        std::vector<CMatrix> out;
        for (double t : times) out.push_back(f.propagate_raw(rho0, t));
        return out;
    };

    std::vector<CMatrix> prev = evaluate(0);
    for (int m = 0; m <= m_max; ++m) {
        std::vector<CMatrix> next = evaluate(m + 1);
        double dev = 0.0;
        for (size_t k = 0; k < times.size(); ++k)
            dev = std::max(dev, max_abs(prev[k] - next[k]));
        if (dev <= tol) return m;
        prev = std::move(next);
    }
    throw NoConvergence("converge_truncation: no M <= " + std::to_string(m_max) +
                        " meets tol " + std::to_string(tol));
}

} // namespace flq
