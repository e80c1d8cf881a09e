// Dense complex linear algebra used throughout: Kronecker product,
// Hermitian and general eigendecomposition, matrix exponential, linear
// solve.  Backed by Eigen; matrices are at most a few hundred rows so
// everything is dense.
#pragma once

#include <Eigen/Dense>
#include <complex>

#include "flq/error.hpp"

namespace flq {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Largest absolute entry; zero for empty matrices.
double max_abs(const CMatrix& a);

// Kronecker product; block (i,j) of the result equals a(i,j) * b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

struct HermitianEigensystem {
    RVector values;  // ascending
    CMatrix vectors; // orthonormal columns, vectors.col(k) <-> values(k)
};

// Throws NotHermitian if max|a - a^dagger| > 1e-10 * max|a|.
HermitianEigensystem eig_hermitian(const CMatrix& a);

struct GeneralEigensystem {
    CVector values;
    CMatrix right_vectors;     // a * V = V * diag(values)
    double condition_estimate; // estimate of cond(V)
};

// General (non-Hermitian) eigendecomposition.  Throws IllConditioned when
// the eigenvector matrix condition estimate exceeds cond_threshold, which
// callers treat as a cue to fall back to expm.
GeneralEigensystem eig_general(const CMatrix& a, double cond_threshold = 1e8);

// Matrix exponential, Pade order-13 scaling-and-squaring.  Throws Overflow
// when the scaling exponent would exceed max_squarings.
CMatrix expm(const CMatrix& a, int max_squarings = 64);

// Solves a * x = b by pivoted LU.  Throws Singular when a pivot falls
// below 1e-13 * max|a|.
CMatrix solve(const CMatrix& a, const CMatrix& b);

} // namespace flq
