#include "kidecomp/channels.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace kid {

namespace {

Matrix matrix_unit(int d, int i, int j) {
  Matrix e = Matrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

}  // namespace

Superoperator Superoperator::from_choi(int in_dim, int out_dim, Matrix choi) {
  require(in_dim > 0 && out_dim > 0, ErrorKind::InvalidInput, "channel dims must be positive");
  require(choi.rows() == static_cast<Eigen::Index>(in_dim) * out_dim && choi.rows() == choi.cols(),
          ErrorKind::ShapeMismatch, "Choi matrix dimension mismatch");
  require_finite(choi, "Choi matrix");
  Superoperator s;
  s.in_dim = in_dim;
  s.out_dim = out_dim;
  s.choi = std::move(choi);
  return s;
}

Superoperator Superoperator::from_kraus(std::vector<Matrix> kraus) {
  require(!kraus.empty(), ErrorKind::InvalidInput, "empty Kraus list");
  const int in_dim = static_cast<int>(kraus.front().rows());
  const int out_dim = static_cast<int>(kraus.front().cols());
  for (const Matrix& k : kraus)
    require(k.rows() == in_dim && k.cols() == out_dim, ErrorKind::ShapeMismatch,
            "Kraus operators must share a common shape");
  // Heisenberg action L(X) = sum_k K† X K.
  Matrix choi = Matrix::Zero(static_cast<Eigen::Index>(in_dim) * out_dim,
                             static_cast<Eigen::Index>(in_dim) * out_dim);
  for (const Matrix& k : kraus)
    for (int i = 0; i < in_dim; ++i)
      for (int j = 0; j < in_dim; ++j)
        choi.block(i * out_dim, j * out_dim, out_dim, out_dim) +=
            k.adjoint() * matrix_unit(in_dim, i, j) * k;
  Superoperator s = from_choi(in_dim, out_dim, std::move(choi));
  s.kraus = std::move(kraus);
  return s;
}

Superoperator Superoperator::from_heisenberg_action(
    int in_dim, int out_dim, const std::function<Matrix(const Matrix&)>& action) {
  Matrix choi(static_cast<Eigen::Index>(in_dim) * out_dim,
              static_cast<Eigen::Index>(in_dim) * out_dim);
  for (int i = 0; i < in_dim; ++i)
    for (int j = 0; j < in_dim; ++j) {
      Matrix img = action(matrix_unit(in_dim, i, j));
      require(img.rows() == out_dim && img.cols() == out_dim, ErrorKind::ShapeMismatch,
              "action image dimension mismatch");
      choi.block(i * out_dim, j * out_dim, out_dim, out_dim) = img;
    }
  return from_choi(in_dim, out_dim, std::move(choi));
}

Superoperator Superoperator::identity_channel(int d) {
  return from_heisenberg_action(d, d, [](const Matrix& x) { return x; });
}

Matrix apply(const Superoperator& lam, const Matrix& x, Picture picture) {
  if (picture == Picture::Heisenberg) {
    require(x.rows() == lam.in_dim && x.cols() == lam.in_dim, ErrorKind::ShapeMismatch,
            "Heisenberg input must live on the in-space");
    Matrix out = Matrix::Zero(lam.out_dim, lam.out_dim);
    for (int i = 0; i < lam.in_dim; ++i)
      for (int j = 0; j < lam.in_dim; ++j) {
        const Complex c = x(i, j);
        if (c != Complex(0.0, 0.0))
          out += c * lam.choi.block(i * lam.out_dim, j * lam.out_dim, lam.out_dim, lam.out_dim);
      }
    return out;
  }
  require(x.rows() == lam.out_dim && x.cols() == lam.out_dim, ErrorKind::ShapeMismatch,
          "Schrodinger input must live on the out-space");
  Matrix out(lam.in_dim, lam.in_dim);
  for (int i = 0; i < lam.in_dim; ++i)
    for (int j = 0; j < lam.in_dim; ++j)
      out(i, j) =
          (x * lam.choi.block(j * lam.out_dim, i * lam.out_dim, lam.out_dim, lam.out_dim))
              .trace();
  return out;
}

Superoperator compose(const Superoperator& outer, const Superoperator& inner) {
  require(inner.out_dim == outer.in_dim, ErrorKind::ShapeMismatch,
          "composition dimension mismatch");
  return Superoperator::from_heisenberg_action(
      inner.in_dim, outer.out_dim, [&](const Matrix& x) {
        return apply(outer, apply(inner, x, Picture::Heisenberg), Picture::Heisenberg);
      });
}

Superoperator pinching_channel(const std::vector<Matrix>& projections) {
  require(!projections.empty(), ErrorKind::InvalidInput, "empty projection family");
  return Superoperator::from_kraus(projections);
}

ChannelReport is_cptp_unital(const Superoperator& lam, const Tolerance& tol) {
  ChannelReport rep;
  Matrix sym = (lam.choi + lam.choi.adjoint()) / 2.0;
  if ((lam.choi - sym).norm() <= tol.residual * std::max(1.0, lam.choi.norm())) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    const double lam_max = std::max(es.eigenvalues().maxCoeff(), 0.0);
    rep.cp = es.eigenvalues().minCoeff() >= -tol.residual * std::max(lam_max, 1.0);
  }
  // trace over the in factor = Heisenberg image of the unit.
  Matrix lam_of_one = Matrix::Zero(lam.out_dim, lam.out_dim);
  for (int i = 0; i < lam.in_dim; ++i)
    lam_of_one += lam.choi.block(i * lam.out_dim, i * lam.out_dim, lam.out_dim, lam.out_dim);
  rep.tp = (lam_of_one - identity(lam.out_dim)).norm() <= tol.residual;
  // trace over the out factor = Schrodinger image of the unit (transposed).
  Matrix dual_of_one(lam.in_dim, lam.in_dim);
  for (int i = 0; i < lam.in_dim; ++i)
    for (int j = 0; j < lam.in_dim; ++j)
      dual_of_one(i, j) =
          lam.choi.block(j * lam.out_dim, i * lam.out_dim, lam.out_dim, lam.out_dim).trace();
  rep.unital = (dual_of_one - identity(lam.in_dim)).norm() <= tol.residual;
  return rep;
}

bool schwarz_block_check(const Superoperator& lam, const Matrix& a, const Tolerance& tol) {
  require(a.rows() == lam.in_dim && a.cols() == lam.in_dim, ErrorKind::ShapeMismatch,
          "probe must live on the in-space");
  const int n = lam.out_dim;
  Matrix block(2 * n, 2 * n);
  block.topLeftCorner(n, n) = apply(lam, (a.adjoint() * a).eval(), Picture::Heisenberg);
  block.topRightCorner(n, n) = apply(lam, a.adjoint().eval(), Picture::Heisenberg);
  block.bottomLeftCorner(n, n) = apply(lam, a, Picture::Heisenberg);
  block.bottomRightCorner(n, n) = identity(n);
  const double scale = std::max(1.0, block.norm());
  if ((block - block.adjoint()).norm() > tol.residual * scale) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es((block + block.adjoint()) / 2.0);
  return es.eigenvalues().minCoeff() >= -tol.residual * scale;
}

bool multiplicative_domain_member(const Superoperator& lam, const Matrix& a,
                                  const Tolerance& tol) {
  const Matrix la = apply(lam, a, Picture::Heisenberg);
  const Matrix lad = apply(lam, a.adjoint().eval(), Picture::Heisenberg);
  const double bound = tol.residual * (1.0 + a.squaredNorm());
  const double left =
      (apply(lam, (a.adjoint() * a).eval(), Picture::Heisenberg) - lad * la).norm();
  const double right =
      (apply(lam, (a * a.adjoint()).eval(), Picture::Heisenberg) - la * lad).norm();
  return left <= bound && right <= bound;
}

bool preserves_experiment(const Superoperator& lam, const StatisticalExperiment& e,
                          const Tolerance& tol) {
  require(lam.in_dim == lam.out_dim, ErrorKind::ShapeMismatch,
          "experiment preservation needs a square channel");
  require(lam.out_dim == e.dim, ErrorKind::ShapeMismatch, "channel/experiment dim mismatch");
  for (const Matrix& rho : e.states) {
    const Matrix moved = apply(lam, rho, Picture::Schrodinger);
    if (trace_norm(moved - rho) > tol.residual) return false;
  }
  return true;
}

}  // namespace kid
