// SPDX-License-Identifier: Apache-2.0

#include "pnc/numerics.hpp"

#include <cmath>
#include <string>

namespace pnc {

CMatrix dft_columns(Eigen::Index n, Eigen::Index cols) {
    if (n < 1 || cols < 0 || cols > n) {
        throw std::invalid_argument("dft_columns: need 0 <= cols <= n, n >= 1");
    }
    CMatrix f(n, cols);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index m = 0; m < cols; ++m) {
            // Reduce k*m mod n first so large indices keep full phase accuracy.
            const auto r = static_cast<double>((k * m) % n);
            f(k, m) = std::polar(1.0, -2.0 * kPi * r / static_cast<double>(n));
        }
    }
    return f;
}

CMatrix dft_matrix(Eigen::Index n) {
    if (n < 1) {
        throw std::invalid_argument("dft_matrix: n must be positive");
    }
    return dft_columns(n, n);
}

CMatrix circulant(const CVector& v) {
    const Eigen::Index n = v.size();
    if (n == 0) {
        throw std::invalid_argument("circulant: empty vector");
    }
    CMatrix c(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index k = 0; k < n; ++k) {
            c(k, r) = v((k - r + n) % n);
        }
    }
    return c;
}

CVector solve_ls(const CMatrix& a, const CVector& b, double rank_tol) {
    if (a.rows() != b.size()) {
        throw std::invalid_argument("solve_ls: dimension mismatch");
    }
    if (a.cols() == 0) {
        return CVector(0);
    }
    if (a.rows() < a.cols()) {
        throw SingularMatrixError("solve_ls: underdetermined system");
    }
    const Eigen::HouseholderQR<CMatrix> qr(a);
    const auto diag = qr.matrixQR().diagonal().cwiseAbs();
    const double largest = diag.maxCoeff();
    const double smallest = diag.minCoeff();
    if (!(largest > 0.0) || smallest < rank_tol * largest) {
        throw SingularMatrixError("solve_ls: rank-deficient matrix (min |R_ii| = " +
                                  std::to_string(smallest) + ")");
    }
    return qr.solve(b);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix cholesky(const CMatrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("cholesky: matrix must be square and non-empty");
    }
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw NotPsdError("cholesky: matrix is not Hermitian");
    }
    const CMatrix herm = 0.5 * (a + a.adjoint());

    const Eigen::LLT<CMatrix> llt(herm);
    if (llt.info() == Eigen::Success) {
        CMatrix l = llt.matrixL();
        if ((l * l.adjoint() - herm).norm() <= 1e-8 * herm.norm()) {
            return l;
        }
    }

    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
    if (eig.info() != Eigen::Success) {
        throw NotPsdError("cholesky: eigen-decomposition failed");
    }
    RVector lambda = eig.eigenvalues();
    if (lambda.minCoeff() < -1e-8 * scale) {
        throw NotPsdError("cholesky: negative eigenvalue " + std::to_string(lambda.minCoeff()));
    }
    // eigenvalues at round-off level would leak sqrt(eps) into the factor
    const double floor = 1e-13 * std::max(lambda.maxCoeff(), 0.0);
    for (Eigen::Index k = 0; k < lambda.size(); ++k) lambda(k) = lambda(k) > floor ? std::sqrt(lambda(k)) : 0.0;
    const CMatrix root = eig.eigenvectors() * lambda.cast<cd>().asDiagonal();
    // root root^H = A; QR of root^H = Q R gives root = R^H Q^H, so L = R^H.
    const Eigen::HouseholderQR<CMatrix> qr(root.adjoint());
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    return r.adjoint();
}

double bessel_j0(double x) {
    return std::cyl_bessel_j(0.0, std::abs(x));
}

}  // namespace pnc
