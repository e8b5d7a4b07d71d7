#include "vcc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vcc/error.hpp"

namespace vcc {
namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalTol = 1e-14;
constexpr double kHermitianTol = 1e-10;

double off_diagonal_norm(const CMatrix& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) sum += std::norm(a(i, j));
    }
  }
  return std::sqrt(sum);
}

// One complex Jacobi rotation zeroing a(p, q). The rotation is a phase
// normalisation diag(1, e^{-i phi}) followed by the classic real rotation.
void rotate(CMatrix& a, CMatrix& u, Eigen::Index p, Eigen::Index q) {
  const Complex apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const Complex phase_conj = std::conj(apq) / mag;  // e^{-i phi}

  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * mag);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Complex jpp = c;
  const Complex jpq = s;
  const Complex jqp = -s * phase_conj;
  const Complex jqq = c * phase_conj;

  const Eigen::Index n = a.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex aip = a(i, p);
    const Complex aiq = a(i, q);
    a(i, p) = aip * jpp + aiq * jqp;
    a(i, q) = aip * jpq + aiq * jqq;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex apj = a(p, j);
    const Complex aqj = a(q, j);
    a(p, j) = std::conj(jpp) * apj + std::conj(jqp) * aqj;
    a(q, j) = std::conj(jpq) * apj + std::conj(jqq) * aqj;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex uip = u(i, p);
    const Complex uiq = u(i, q);
    u(i, p) = uip * jpp + uiq * jqp;
    u(i, q) = uip * jpq + uiq * jqq;
  }
}

}  // namespace

HermitianEig hermitian_eig(const CMatrix& input) {
  if (input.rows() != input.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "hermitian_eig: matrix is not square");
  }
  const double scale = input.norm();
  const double asym = (input - input.adjoint()).norm();
  if (asym > kHermitianTol * std::max(scale, 1e-300)) {
    throw Error(ErrorCode::kNotHermitian,
                "hermitian_eig: input deviates from Hermitian by " + std::to_string(asym / scale));
  }

  const Eigen::Index n = input.rows();
  CMatrix a = 0.5 * (input + input.adjoint());
  CMatrix u = CMatrix::Identity(n, n);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= kOffDiagonalTol * scale) break;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) rotate(a, u, p, q);
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) {
    return a(l, l).real() > a(r, r).real();
  });

  HermitianEig out{RVector(n), CMatrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]).real();
    out.vectors.col(i) = u.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

CMatrix hermitian_pinv(const CMatrix& a, double rel_tol) {
  const Eigen::Index n = a.rows();
  if (n == 0) return CMatrix(0, 0);
  const HermitianEig eig = hermitian_eig(a);
  const double cutoff = rel_tol * std::max(eig.values(0), 0.0);
  CMatrix out = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (eig.values(i) > cutoff && eig.values(i) > 0.0) {
      out += (1.0 / eig.values(i)) * eig.vectors.col(i) * eig.vectors.col(i).adjoint();
    }
  }
  return out;
}

CMatrix gram_inverse(const CMatrix& gram) {
  const Eigen::Index n = gram.rows();
  if (n == 0) return CMatrix(0, 0);
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() == Eigen::Success) {
    const CMatrix& l = llt.matrixLLT();
    double min_pivot = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) min_pivot = std::min(min_pivot, std::norm(l(i, i)));
    const double max_diag = gram.diagonal().real().maxCoeff();
    if (min_pivot >= 1e-12 * max_diag) {
      return llt.solve(CMatrix::Identity(n, n));
    }
  }
  return hermitian_pinv(gram, 1e-12);
}

int numerical_rank(const RVector& values, double rel_tol) {
  if (values.size() == 0) return 0;
  const double top = values.maxCoeff();
  if (top <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) > rel_tol * top) ++rank;
  }
  return rank;
}

void write_matrix_text(std::ostream& os, const CMatrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  os.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << m(i, j).real() << ',' << m(i, j).imag();
    }
    os << '\n';
  }
}

CMatrix read_matrix_text(std::istream& is) {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0) {
    throw Error(ErrorCode::kIo, "read_matrix_text: bad header");
  }
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::string token;
      if (!(is >> token)) throw Error(ErrorCode::kIo, "read_matrix_text: truncated input");
      const auto comma = token.find(',');
      if (comma == std::string::npos) throw Error(ErrorCode::kIo, "read_matrix_text: expected re,im");
      m(i, j) = Complex(std::stod(token.substr(0, comma)), std::stod(token.substr(comma + 1)));
    }
  }
  return m;
}

}  // namespace vcc
