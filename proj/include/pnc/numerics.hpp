// SPDX-License-Identifier: Apache-2.0
//
// Dense complex linear-algebra kernels shared by the simulator.

#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace pnc {

using cd = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Raised when a least-squares system is numerically rank deficient.
class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a matrix expected to be Hermitian PSD is not.
class NotPsdError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unnormalized DFT matrix, entry (k, m) = exp(-j 2 pi k m / n).
CMatrix dft_matrix(Eigen::Index n);

/// First `cols` columns of the n-point DFT matrix.
CMatrix dft_columns(Eigen::Index n, Eigen::Index cols);

/// Circulant matrix with entry (k, r) = v[(k - r) mod n]; column 0 is v.
CMatrix circulant(const CVector& v);

/// Minimum-norm-residual solution of A x = b by Householder QR.
///
/// Throws SingularMatrixError when rows < cols or when the smallest |R_ii|
/// falls below `rank_tol` times the largest.
CVector solve_ls(const CMatrix& a, const CVector& b, double rank_tol = 1e-12);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Lower-triangular L with L L^H = A for Hermitian PSD A.
///
/// Positive-definite input goes through LLT. Singular PSD input (Jakes
/// correlation at low Doppler is numerically rank one) falls back to an
/// eigen-decomposition square root re-triangularized by QR. Eigenvalues
/// below -1e-8 * max(1, ||A||) raise NotPsdError.
CMatrix cholesky(const CMatrix& a);

/// Zero-order Bessel function of the first kind.
double bessel_j0(double x);

}  // namespace pnc
