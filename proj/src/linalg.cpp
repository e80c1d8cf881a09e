#include "flq/linalg.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <limits>
#include <string>

namespace flq {

namespace {

void require_square(const CMatrix& a, const char* who) {
    if (a.rows() != a.cols())
        throw Error(std::string(who) + ": matrix must be square, got " +
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

void require_finite(const CMatrix& a, const char* who) {
    if (!a.allFinite())
        throw Error(std::string(who) + ": non-finite entries in result");
}

double one_norm(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

} // namespace

double max_abs(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().maxCoeff();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out = Eigen::kroneckerProduct(a, b);
    require_finite(out, "kron");
    return out;
}

HermitianEigensystem eig_hermitian(const CMatrix& a) {
    require_square(a, "eig_hermitian");
    const double scale = max_abs(a);
    const double dev = max_abs(a - a.adjoint());
    if (dev > 1e-10 * scale)
        throw NotHermitian("eig_hermitian: |a - a^dagger| = " + std::to_string(dev) +
                           " exceeds 1e-10 * max|a|");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
    if (es.info() != Eigen::Success)
        throw NoConvergence("eig_hermitian: iteration budget exceeded");
    HermitianEigensystem out{es.eigenvalues(), es.eigenvectors()};
    require_finite(out.vectors, "eig_hermitian");
    return out;
}

GeneralEigensystem eig_general(const CMatrix& a, double cond_threshold) {
    require_square(a, "eig_general");
    Eigen::ComplexEigenSolver<CMatrix> es(a, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success)
        throw NoConvergence("eig_general: Schur iteration failed to converge");
    const CMatrix& v = es.eigenvectors();
    Eigen::PartialPivLU<CMatrix> lu(v);
    const CMatrix vinv = lu.inverse();
    double cond = one_norm(v) * one_norm(vinv);
    if (!std::isfinite(cond)) cond = std::numeric_limits<double>::infinity();
    if (cond > cond_threshold)
        throw IllConditioned("eig_general: cond(V) estimate " + std::to_string(cond) +
                             " exceeds threshold " + std::to_string(cond_threshold));
    return GeneralEigensystem{es.eigenvalues(), v, cond};
}

CMatrix expm(const CMatrix& a, int max_squarings) {
    require_square(a, "expm");
    const Eigen::Index n = a.rows();
    const CMatrix id = CMatrix::Identity(n, n);

    // Pade order-13 coefficients and the associated scaling threshold.
    static const double b[14] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    const double theta13 = 5.371920351148152;

    const double nrm = one_norm(a);
    int s = 0;
    if (nrm > theta13)
        s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    if (s > max_squarings)
        throw Overflow("expm: scaling exponent " + std::to_string(s) + " exceeds cap " +
                       std::to_string(max_squarings));

    const CMatrix as = a * std::ldexp(1.0, -s);
    const CMatrix a2 = as * as;
    const CMatrix a4 = a2 * a2;
    const CMatrix a6 = a2 * a4;

    const CMatrix u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                            b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    const CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                      b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

    CMatrix f = solve(v - u, v + u);
    for (int i = 0; i < s; ++i) f = f * f;
    require_finite(f, "expm");
    return f;
}

CMatrix solve(const CMatrix& a, const CMatrix& b) {
    require_square(a, "solve");
    if (b.rows() != a.rows())
        throw Error("solve: dimension mismatch between a and b");
    Eigen::PartialPivLU<CMatrix> lu(a);
    const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    const double scale = max_abs(a);
    if (pivot_min <= 1e-13 * scale || pivot_min == 0.0)
        throw Singular("solve: pivot magnitude " + std::to_string(pivot_min) +
                       " below 1e-13 * max|a|");
    CMatrix x = lu.solve(b);
    require_finite(x, "solve");
    return x;
}

} // namespace flq
