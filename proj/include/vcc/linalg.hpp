#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>

namespace vcc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Eigendecomposition of a Hermitian matrix.
/// `values` are sorted in descending order; column i of `vectors` is the
/// unit-norm eigenvector for values(i).
struct HermitianEig {
  RVector values;
  CMatrix vectors;
};

/// Cyclic Jacobi eigensolver for small dense Hermitian matrices.
///
/// Sweeps until the off-diagonal Frobenius norm falls below 1e-12 of the
/// matrix norm. Throws Error(kNotHermitian) when ||A - A^H|| exceeds 1e-10
/// relative to ||A||.
HermitianEig hermitian_eig(const CMatrix& a);

/// Moore-Penrose pseudo-inverse of a Hermitian PSD matrix via hermitian_eig.
/// Eigenvalues below rel_tol * lambda_max are treated as zero.
CMatrix hermitian_pinv(const CMatrix& a, double rel_tol = 1e-12);

/// Inverse of a Hermitian PSD Gram matrix. Uses Cholesky while the
/// factorisation is well conditioned and falls back to hermitian_pinv when the
/// smallest eigenvalue drops below 1e-12 of the largest.
CMatrix gram_inverse(const CMatrix& gram);

/// Number of eigenvalues above rel_tol * max(eigenvalues).
int numerical_rank(const RVector& descending_values, double rel_tol = 1e-10);

/// Line-oriented text dump: first line "rows cols", then one line per row of
/// space-separated "re,im" pairs.
void write_matrix_text(std::ostream& os, const CMatrix& m);
CMatrix read_matrix_text(std::istream& is);

}  // namespace vcc
