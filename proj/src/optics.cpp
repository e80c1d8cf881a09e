#include "flq/optics.hpp"

#include <cmath>
#include <numbers>

namespace flq {

namespace {

DipoleOperator make_dipole_operator() {
    // d = q13 |e,z+><t,z+| + q24 |e,z-><t,z-| + H.c. with
    // q13 = (x + iy)/sqrt(2), q24 = (x - iy)/sqrt(2).
    const double r = 1.0 / std::numbers::sqrt2;
    const Complex i(0.0, 1.0);

    DipoleOperator d;
    d.x = CMatrix::Zero(4, 4);
    d.y = CMatrix::Zero(4, 4);
    d.z = CMatrix::Zero(4, 4);

    d.x(0, 2) = r;
    d.x(1, 3) = r;
    d.y(0, 2) = i * r;
    d.y(1, 3) = -i * r;

    d.x += CMatrix(d.x.adjoint());
    d.y += CMatrix(d.y.adjoint());
    return d;
}

} // namespace

const DipoleOperator& dipole_operator() {
    static const DipoleOperator d = make_dipole_operator();
    return d;
}

TransitionDipole transition_dipole(const Eigen::Vector4cd& psi_i,
                                   const Eigen::Vector4cd& psi_j) {
    if (std::abs(psi_i.norm() - 1.0) > 1e-10 || std::abs(psi_j.norm() - 1.0) > 1e-10)
        throw NotNormalized("transition_dipole: eigenvectors must be unit norm");
    const auto& d = dipole_operator();
    TransitionDipole out;
    out.p[0] = psi_i.dot(d.x * psi_j); // Eigen's dot conjugates the left factor
    out.p[1] = psi_i.dot(d.y * psi_j);
    out.p[2] = psi_i.dot(d.z * psi_j);
    return out;
}

double branching_ratio(const DriveParams& p) {
    const auto es = pseudo_faraday_eigensystem(p);
    const auto& e_up = es.find(Manifold::Electron, SpinSign::Plus);
    const auto& e_dn = es.find(Manifold::Electron, SpinSign::Minus);
    const auto& t_dn = es.find(Manifold::Trion, SpinSign::Minus);

    const double flipping = transition_dipole(e_up.vector, t_dn.vector).squared_norm();
    const double preserving = transition_dipole(e_dn.vector, t_dn.vector).squared_norm();
    if (preserving < 1e-30)
        throw DivisionByZero("branching_ratio: spin-preserving dipole vanishes");
    return flipping / preserving;
}

Complex beta_coupling(const DriveParams& p, SpinSign electron_spin) {
    const auto es = pseudo_faraday_eigensystem(p);
    const auto& e = es.find(Manifold::Electron, electron_spin);
    const auto& t_up = es.find(Manifold::Trion, SpinSign::Plus);
    const auto& t_dn = es.find(Manifold::Trion, SpinSign::Minus);

    const auto p_e3 = transition_dipole(e.vector, t_up.vector).p;
    const auto p_e4 = transition_dipole(e.vector, t_dn.vector).p;
    // conj(P_e4) . P_e3; nonzero only if the two decay channels interfere
    return p_e4.conjugate().cwiseProduct(p_e3).sum();
}

Complex angular_overlap_integral(const Eigen::Vector3cd& u, const Eigen::Vector3cd& v) {
    const double c = 4.0 * std::numbers::pi / 3.0;
    return c * u.cwiseProduct(v).sum();
}

} // namespace flq
