#include "kidecomp/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace kid {

double frobenius(const Matrix& a) { return a.norm(); }

double trace_norm(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().sum();
}

Complex hs_inner(const Matrix& a, const Matrix& b) {
  return (a.adjoint() * b).trace();
}

bool is_hermitian(const Matrix& a, double residual) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= residual * std::max(1.0, a.norm());
}

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite())
    fail(ErrorKind::InvalidInput, std::string(what) + " has non-finite entries");
}

Matrix identity(int d) { return Matrix::Identity(d, d); }

EighResult eigh(const Matrix& h, const Tolerance& tol) {
  require(h.rows() == h.cols(), ErrorKind::ShapeMismatch, "eigh needs a square matrix");
  require_finite(h, "eigh input");
  if (!is_hermitian(h, tol.residual))
    fail(ErrorKind::NotHermitian, "matrix is not Hermitian within tolerance");
  Matrix sym = (h + h.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::ConvergenceFailure, "Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix spectral_apply(const Matrix& h, const std::function<Complex(double)>& f,
                      bool support_only, const Tolerance& tol) {
  EighResult es = eigh(h, tol);
  const int d = static_cast<int>(h.rows());
  const double lam_max = es.eigenvalues.size() ? es.eigenvalues.maxCoeff() : 0.0;
  const double cut = tol.rank_cut * lam_max;
  Vector fvals(d);
  for (int k = 0; k < d; ++k) {
    const double lam = es.eigenvalues[k];
    if (support_only && !(lam > cut)) {
      fvals[k] = Complex(0.0, 0.0);
      continue;
    }
    const Complex v = f(lam);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail(ErrorKind::DomainError,
           "function value not finite at eigenvalue " + std::to_string(lam));
    fvals[k] = v;
  }
  return es.eigenvectors * fvals.asDiagonal() * es.eigenvectors.adjoint();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  const Eigen::Index p = b.rows(), q = b.cols();
  Matrix out(a.rows() * p, a.cols() * q);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * p, j * q, p, q) = a(i, j) * b;
  return out;
}

Matrix partial_trace(const Matrix& m, int dim_a, int dim_b, TraceSide side) {
  require(dim_a > 0 && dim_b > 0, ErrorKind::ShapeMismatch, "factor dims must be positive");
  require(m.rows() == m.cols() &&
              m.rows() == static_cast<Eigen::Index>(dim_a) * dim_b,
          ErrorKind::ShapeMismatch, "matrix dim must equal dim_a * dim_b");
  if (side == TraceSide::B) {
    Matrix out = Matrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        for (int k = 0; k < dim_b; ++k)
          out(i, j) += m(i * dim_b + k, j * dim_b + k);
    return out;
  }
  Matrix out = Matrix::Zero(dim_b, dim_b);
  for (int k = 0; k < dim_b; ++k)
    for (int l = 0; l < dim_b; ++l)
      for (int i = 0; i < dim_a; ++i)
        out(k, l) += m(i * dim_b + k, i * dim_b + l);
  return out;
}

Projection support_projection(const Matrix& s, const Tolerance& tol) {
  EighResult es = eigh(s, tol);
  const int d = static_cast<int>(s.rows());
  const double lam_max = es.eigenvalues.size() ? es.eigenvalues.maxCoeff() : 0.0;
  if (es.eigenvalues.size() && es.eigenvalues.minCoeff() < -tol.residual * std::max(lam_max, 1.0))
    fail(ErrorKind::NotPSD, "matrix has a negative eigenvalue beyond tolerance");
  const double cut = tol.rank_cut * lam_max;
  Matrix p = Matrix::Zero(d, d);
  int rank = 0;
  for (int k = 0; k < d; ++k) {
    const double lam = es.eigenvalues[k];
    if (lam > cut / 10.0 && lam < cut * 10.0)
      fail(ErrorKind::AmbiguousRank,
           "eigenvalue " + std::to_string(lam) + " within a factor 10 of the rank cutoff " +
               std::to_string(cut));
    if (lam > cut) {
      p += es.eigenvectors.col(k) * es.eigenvectors.col(k).adjoint();
      ++rank;
    }
  }
  return {std::move(p), rank};
}

}  // namespace kid
