#include "flq/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flq/units.hpp"

namespace flq {

using units::angular;
using units::to_ghz;
using units::zeeman_angular;

double DriveParams::mixing_ratio() const {
    if (delta1_ghz == 0.0) return omega1p_ghz == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(omega1p_ghz / delta1_ghz);
}

void DriveParams::validate() const {
    if (!(bx_tesla >= 0.0))
        throw ValidationError("DriveParams: bx_tesla must be >= 0");
    if (!(omega1p_ghz >= 0.0))
        throw ValidationError("DriveParams: omega1p_ghz must be real >= 0");
    if (!std::isfinite(bx_tesla) || !std::isfinite(g_ex) || !std::isfinite(g_hx) ||
        !std::isfinite(omega1p_ghz) || !std::isfinite(delta1_ghz) ||
        !std::isfinite(delta2_ghz) || !std::isfinite(std::abs(omega2p_ghz)) ||
        !std::isfinite(std::abs(omega2m_ghz)))
        throw ValidationError("DriveParams: non-finite field");
}

std::string to_string(const StateLabel& label) {
    std::string s = label.manifold == Manifold::Electron ? "electron-like " : "trion-like ";
    s += label.x_basis ? "x" : "z";
    s += label.spin == SpinSign::Plus ? "+" : "-";
    return s;
}

const LabeledState& LabeledEigensystem::find(Manifold m, SpinSign s) const {
    for (const auto& st : states)
        if (st.label.manifold == m && st.label.spin == s) return st;
    throw Error("LabeledEigensystem: label not present");
}

namespace {

// Global-phase convention: the largest-magnitude component is made real
// and positive (lowest index wins ties), so eigenvectors are reproducible
// across runs and platforms.
Eigen::Vector4cd fix_phase(Eigen::Vector4cd v) {
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < 4; ++i) {
        const double m = std::abs(v[i]);
        if (m > best + 1e-14) {
            best = m;
            imax = i;
        }
    }
    if (best > 0.0) v *= std::conj(v[imax]) / best;
    return v;
}

const std::array<StateLabel, 4> z_labels = {{
    {Manifold::Electron, SpinSign::Plus},
    {Manifold::Electron, SpinSign::Minus},
    {Manifold::Trion, SpinSign::Plus},
    {Manifold::Trion, SpinSign::Minus},
}};

// Assigns each eigenvector one z-basis label by maximizing the total
// squared overlap over all 4! pairings.  Exact ties (the Voigt limit, where
// every overlap is 1/2) resolve to the lexicographically first optimal
// permutation, keeping the labeling deterministic.  Throws when the best
// assignment leaves any state below squared overlap 0.5.
std::array<int, 4> assign_labels_by_overlap(const CMatrix& vectors) {
    double overlap[4][4];
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            overlap[i][k] = std::norm(vectors(k, i)); // |<basis_k|psi_i>|^2

    std::array<int, 4> perm = {0, 1, 2, 3};
    std::array<int, 4> best_perm = perm;
    double best_total = -1.0;
    do {
        double total = 0.0;
        for (int i = 0; i < 4; ++i) total += overlap[i][perm[i]];
        if (total > best_total + 1e-12) {
            best_total = total;
            best_perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    for (int i = 0; i < 4; ++i) {
        if (overlap[i][best_perm[i]] < 0.5 - 1e-9)
            throw AmbiguousLabeling(
                "state " + std::to_string(i) + " has top overlap " +
                std::to_string(overlap[i][best_perm[i]]) +
                " < 0.5; eigenstates too strongly mixed to label");
    }
    return best_perm;
}

} // namespace

CMatrix build_H0(const DriveParams& p) {
    p.validate();
    const double d1 = angular(p.delta1_ghz);
    const double om = angular(p.omega1p_ghz);
    const double be = zeeman_angular(p.bx_tesla, p.g_ex);
    const double bh = zeeman_angular(p.bx_tesla, p.g_hx);

    CMatrix h = CMatrix::Zero(4, 4);
    h(0, 0) = h(1, 1) = -d1 / 2.0;
    h(2, 2) = h(3, 3) = +d1 / 2.0;
    h(0, 1) = h(1, 0) = be;
    h(0, 2) = h(2, 0) = om / 2.0;
    h(2, 3) = h(3, 2) = -bh;
    return h;
}

DriveBlocks build_H1(const DriveParams& p) {
    p.validate();
    const Complex o2p = angular(1.0) * p.omega2p_ghz;
    const Complex o2m = angular(1.0) * p.omega2m_ghz;

    CMatrix hp = CMatrix::Zero(4, 4);
    hp(2, 0) = std::conj(o2p) / 2.0;
    hp(3, 1) = std::conj(o2m) / 2.0;
    CMatrix hm = hp.adjoint();
    return DriveBlocks{std::move(hp), std::move(hm), angular(p.delta2_ghz - p.delta1_ghz)};
}

LabeledEigensystem zeeman_eigensystem(const DriveParams& p) {
    p.validate();
    const double be = zeeman_angular(p.bx_tesla, p.g_ex);
    const double bh = zeeman_angular(p.bx_tesla, p.g_hx);
    const double r = 1.0 / std::numbers::sqrt2;

    LabeledEigensystem es;
    if (p.bx_tesla == 0.0) {
        // Degenerate: return the z basis, with the x labels kept in their
        // conventional order for reproducibility.
        for (int i = 0; i < 4; ++i) {
            es.states[i].value = 0.0;
            es.states[i].vector = Eigen::Vector4cd::Unit(i);
        }
    } else {
        es.states[0] = {-be, {r, -r, 0, 0}, {}};
        es.states[1] = {+be, {r, +r, 0, 0}, {}};
        es.states[2] = {-bh, {0, 0, r, +r}, {}};
        es.states[3] = {+bh, {0, 0, r, -r}, {}};
    }
    es.states[0].label = {Manifold::Electron, SpinSign::Minus, true};
    es.states[1].label = {Manifold::Electron, SpinSign::Plus, true};
    es.states[2].label = {Manifold::Trion, SpinSign::Plus, true};
    es.states[3].label = {Manifold::Trion, SpinSign::Minus, true};
    return es;
}

namespace {

// Numerically stable eigenvectors of the 2x2 dressed block
// [[-d/2, o/2], [o/2, +d/2]]; returns the pair for eigenvalues -w/2, +w/2.
std::pair<Eigen::Vector2d, Eigen::Vector2d> dressed_pair(double d, double o, double w) {
    Eigen::Vector2d lo, hi;
    if (d >= 0.0) {
        lo << -(d + w), o; // eigenvalue -w/2
        hi << o, d + w;    // eigenvalue +w/2
    } else {
        lo << o, d - w;
        hi << w - d, o;
    }
    if (lo.norm() == 0.0) lo << 1, 0; // o = 0, d = 0
    if (hi.norm() == 0.0) hi << 0, 1;
    return {lo.normalized(), hi.normalized()};
}

} // namespace

ACStarkEigensystem acstark_eigensystem(const DriveParams& p) {
    p.validate();
    if (p.delta1_ghz == 0.0)
        throw DegenerateDetuning("acstark_eigensystem: first-order expansion requires delta1 != 0");

    const double d1 = angular(p.delta1_ghz);
    const double om = angular(p.omega1p_ghz);
    const double w = std::hypot(d1, om);
    const auto [lo, hi] = dressed_pair(d1, om, w);

    ACStarkEigensystem out;
    out.w1 = w;
    auto& st = out.exact.states;
    st[0] = {-w / 2.0, fix_phase({lo[0], 0, lo[1], 0}), {}};
    st[1] = {-d1 / 2.0, {0, 1, 0, 0}, {}};
    st[2] = {+w / 2.0, fix_phase({hi[0], 0, hi[1], 0}), {}};
    st[3] = {+d1 / 2.0, {0, 0, 0, 1}, {}};

    CMatrix vecs(4, 4);
    for (int i = 0; i < 4; ++i) vecs.col(i) = st[i].vector;
    const auto perm = assign_labels_by_overlap(vecs);
    for (int i = 0; i < 4; ++i) st[i].label = z_labels[perm[i]];

    const double shift = om * om / (4.0 * d1);
    out.e1_first_order = -shift;
    out.e2_first_order = 0.0;
    out.e3_first_order_rel = +shift;
    out.e4_first_order_rel = 0.0;
    out.v1_first_order = {1, 0, -om / (2.0 * d1), 0};
    out.v3_first_order = {om / (2.0 * d1), 0, 1, 0};
    return out;
}

LabeledEigensystem pseudo_faraday_eigensystem(const DriveParams& p) {
    const auto eig = eig_hermitian(build_H0(p));
    const auto perm = assign_labels_by_overlap(eig.vectors);

    LabeledEigensystem es;
    for (int i = 0; i < 4; ++i) {
        es.states[i].value = eig.values[i];
        es.states[i].vector = fix_phase(eig.vectors.col(i));
        es.states[i].label = z_labels[perm[i]];
    }
    return es;
}

std::array<double, 4> rotating_frame_energies(const LabeledEigensystem& es,
                                              double omega0, double omega1) {
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i) {
        const double shift = es.states[i].label.manifold == Manifold::Trion
                                 ? (omega0 + omega1) / 2.0
                                 : (omega0 - omega1) / 2.0;
        out[i] = es.states[i].value + shift;
    }
    return out;
}

double resonant_detuning_for_readout(const DriveParams& p, SpinSign target) {
    const auto es = pseudo_faraday_eigensystem(p);
    const double gap = es.find(Manifold::Trion, target).value -
                       es.find(Manifold::Electron, target).value;
    // omega2 = omega1 + gap  <=>  delta2 = delta1 - gap/2pi
    return p.delta1_ghz - to_ghz(gap);
}

double spin_precession_time_ns(double bx_tesla, double g) {
    const double splitting = 2.0 * zeeman_angular(bx_tesla, g);
    if (splitting == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / splitting;
}

} // namespace flq
