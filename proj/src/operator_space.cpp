#include "kidecomp/operator_space.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace kid {

Matrix pack_basis(const std::vector<Matrix>& mats, int d) {
  Matrix packed(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(mats.size()));
  for (std::size_t k = 0; k < mats.size(); ++k)
    packed.col(static_cast<Eigen::Index>(k)) =
        Eigen::Map<const Vector>(mats[k].data(), static_cast<Eigen::Index>(d) * d);
  return packed;
}

Matrix unpack_column(const Matrix& packed, int col, int d) {
  return Eigen::Map<const Matrix>(packed.col(col).data(), d, d);
}

namespace {

// Incremental basis holder: append-only Gram-Schmidt with reorthogonalization.
// Keeping accepted columns fixed makes provenance tracking in close_algebra
// exact and the run deterministic.
class GrowingBasis {
 public:
  GrowingBasis(int d, const Tolerance& tol)
      : d_(d), tol_(tol), packed_(static_cast<Eigen::Index>(d) * d, 0) {}

  int size() const { return static_cast<int>(packed_.cols()); }
  const Matrix& packed() const { return packed_; }

  // Returns true when the candidate added a new direction. Residuals inside
  // (cut/10, 10*cut) are ambiguous and abort the computation.
  bool insert(const Matrix& cand) {
    Vector v = Eigen::Map<const Vector>(cand.data(), static_cast<Eigen::Index>(d_) * d_);
    const double nrm0 = v.norm();
    const double cut = tol_.rank_cut * std::max(1.0, nrm0);
    if (nrm0 <= cut / 10.0) return false;
    if (size() > 0) {
      v -= packed_ * (packed_.adjoint() * v);
      v -= packed_ * (packed_.adjoint() * v);
    }
    const double nrm = v.norm();
    if (nrm <= cut / 10.0) return false;
    if (nrm < cut * 10.0)
      fail(ErrorKind::AmbiguousRank,
           "projection residual " + std::to_string(nrm) +
               " within a factor 10 of the rank cutoff " + std::to_string(cut));
    packed_.conservativeResize(Eigen::NoChange, size() + 1);
    packed_.col(size() - 1) = v / nrm;
    return true;
  }

  std::vector<Matrix> matrices() const {
    std::vector<Matrix> out;
    out.reserve(size());
    for (int k = 0; k < size(); ++k) out.push_back(unpack_column(packed_, k, d_));
    return out;
  }

 private:
  int d_;
  Tolerance tol_;
  Matrix packed_;
};

int common_ambient_dim(const std::vector<Matrix>& mats) {
  require(!mats.empty(), ErrorKind::InvalidInput, "empty matrix list");
  const Eigen::Index d = mats.front().rows();
  for (const Matrix& m : mats)
    require(m.rows() == d && m.cols() == d, ErrorKind::ShapeMismatch,
            "matrices must share a square ambient dimension");
  return static_cast<int>(d);
}

}  // namespace

OperatorSubspace orthonormalize_span(const std::vector<Matrix>& mats, const Tolerance& tol) {
  OperatorSubspace out;
  if (mats.empty()) return out;
  out.ambient_dim = common_ambient_dim(mats);
  Matrix packed = pack_basis(mats, out.ambient_dim);
  Eigen::BDCSVD<Matrix> svd(packed, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  const double cut = tol.rank_cut * smax;
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv[k] > cut / 10.0 && sv[k] < cut * 10.0)
      fail(ErrorKind::AmbiguousRank,
           "singular value " + std::to_string(sv[k]) +
               " within a factor 10 of the rank cutoff " + std::to_string(cut));
    if (sv[k] > cut) ++rank;
  }
  out.basis.reserve(rank);
  for (int k = 0; k < rank; ++k)
    out.basis.push_back(unpack_column(svd.matrixU(), k, out.ambient_dim));
  return out;
}

OperatorAlgebra close_algebra(const OperatorSubspace& seed,
                              const std::vector<Matrix>& derivations,
                              const Tolerance& tol) {
  require(seed.ambient_dim > 0, ErrorKind::InvalidInput, "seed has no ambient dimension");
  const int d = seed.ambient_dim;
  for (const Matrix& h : derivations)
    require(h.rows() == d && h.cols() == d, ErrorKind::ShapeMismatch,
            "derivation dimension mismatch");

  GrowingBasis basis(d, tol);
  for (const Matrix& b : seed.basis) basis.insert(b);

  const int full = d * d;
  auto mat = [&](int k) { return unpack_column(basis.packed(), k, d); };

  int frontier = 0;
  int rounds = 0;
  while (basis.size() < full) {
    const int k_start = basis.size();
    if (frontier == k_start) break;
    if (++rounds > full + 2)
      fail(ErrorKind::NonConvergence, "closure dimension did not stabilize");

    for (int i = frontier; i < k_start && basis.size() < full; ++i)
      basis.insert(mat(i).adjoint().eval());

    const int k_adj = basis.size();
    for (int a = 0; a < k_adj && basis.size() < full; ++a) {
      for (int b = 0; b < k_adj && basis.size() < full; ++b) {
        if (a < frontier && b < frontier) continue;  // pair already processed
        basis.insert((mat(a) * mat(b)).eval());
      }
    }

    const int k_prod = basis.size();
    for (const Matrix& h : derivations)
      for (int i = frontier; i < k_prod && basis.size() < full; ++i) {
        Matrix bi = mat(i);
        basis.insert((h * bi - bi * h).eval());
      }

    frontier = k_start;
  }

  OperatorAlgebra out;
  out.ambient_dim = d;
  out.basis = basis.matrices();

  // Unit: support of sum b b† over the basis, verified to act as identity.
  Matrix s = Matrix::Zero(d, d);
  for (const Matrix& b : out.basis) s += b * b.adjoint();
  out.unit = support_projection(s, tol).matrix;
  for (const Matrix& b : out.basis) {
    const double err =
        std::max((out.unit * b - b).norm(), (b * out.unit - b).norm());
    if (err > tol.residual * std::max(1.0, b.norm()))
      fail(ErrorKind::NonConvergence, "computed unit does not act as identity on the closure");
  }
  return out;
}

OperatorAlgebra commutant(const OperatorSubspace& s, const Tolerance& tol) {
  require(s.ambient_dim > 0, ErrorKind::InvalidInput, "subspace has no ambient dimension");
  const int d = s.ambient_dim;
  const int dd = d * d;

  // Null space of X -> [b, X] stacked over the basis, computed from the
  // Hermitian normal matrix Q = sum L_b† L_b with L_b = I (x) b - bᵀ (x) I.
  // Each L_b† L_b expands into four Kronecker terms.
  Matrix q = Matrix::Zero(dd, dd);
  Matrix id = identity(d);
  for (const Matrix& b : s.basis) {
    q += kron(id, (b.adjoint() * b).eval());
    q += kron((b * b.adjoint()).conjugate().eval(), id);
    q -= kron(b.transpose().eval(), b.adjoint().eval());
    q -= kron(b.conjugate().eval(), b);
  }
  q = (q + q.adjoint()) / 2.0;

  Eigen::SelfAdjointEigenSolver<Matrix> es(q);
  require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure,
          "eigensolver failed on commutant normal matrix");
  const auto& lam = es.eigenvalues();
  const double lam_max = lam.size() ? std::max(lam.maxCoeff(), 0.0) : 0.0;
  const double cut = tol.rank_cut * lam_max;

  OperatorAlgebra out;
  out.ambient_dim = d;
  out.unit = id;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    const double v = std::abs(lam[k]);
    if (v > cut / 10.0 && v < cut * 10.0)
      fail(ErrorKind::AmbiguousRank, "commutant rank decision ambiguous at eigenvalue " +
                                         std::to_string(lam[k]));
    if (v <= cut)
      out.basis.push_back(Eigen::Map<const Matrix>(es.eigenvectors().col(k).data(), d, d));
  }
  return out;
}

OperatorSubspace intersect(const OperatorSubspace& s1, const OperatorSubspace& s2,
                           const Tolerance& tol) {
  require(s1.ambient_dim == s2.ambient_dim, ErrorKind::ShapeMismatch,
          "intersection needs matching ambient dimensions");
  OperatorSubspace out;
  out.ambient_dim = s1.ambient_dim;
  if (s1.basis.empty() || s2.basis.empty()) return out;
  const int d = s1.ambient_dim;
  Matrix b1 = pack_basis(s1.basis, d);
  Matrix b2 = pack_basis(s2.basis, d);
  Matrix p1 = b1 * b1.adjoint();
  Matrix p2 = b2 * b2.adjoint();
  Matrix m = p1 * p2 * p1;
  m = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure,
          "eigensolver failed on projector composition");
  const auto& lam = es.eigenvalues();
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (lam[k] > 1.0 - 10.0 * tol.cluster_gap && lam[k] < 1.0 - tol.cluster_gap)
      fail(ErrorKind::AmbiguousRank,
           "principal angle too close to the intersection threshold");
    if (lam[k] >= 1.0 - tol.cluster_gap)
      out.basis.push_back(Eigen::Map<const Matrix>(es.eigenvectors().col(k).data(), d, d));
  }
  return out;
}

OperatorAlgebra center(const OperatorAlgebra& a, const Tolerance& tol) {
  OperatorSubspace inter = intersect(a, commutant(a, tol), tol);
  OperatorAlgebra out;
  out.ambient_dim = a.ambient_dim;
  out.basis = std::move(inter.basis);
  out.unit = a.unit;
  return out;
}

bool contains(const OperatorSubspace& s, const Matrix& x, const Tolerance& tol) {
  require(x.rows() == s.ambient_dim && x.cols() == s.ambient_dim, ErrorKind::ShapeMismatch,
          "ambient dimension mismatch in containment test");
  Matrix recon = Matrix::Zero(s.ambient_dim, s.ambient_dim);
  for (const Matrix& b : s.basis) recon += hs_inner(b, x) * b;
  return (x - recon).norm() <= tol.residual * std::max(1.0, x.norm());
}

bool subspace_contained(const OperatorSubspace& inner, const OperatorSubspace& outer,
                        const Tolerance& tol) {
  for (const Matrix& b : inner.basis)
    if (!contains(outer, b, tol)) return false;
  return true;
}

bool algebra_closed(const OperatorAlgebra& a, const Tolerance& tol) {
  const int k = a.dimension();
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const Complex g = hs_inner(a.basis[i], a.basis[j]);
      const double target = (i == j) ? 1.0 : 0.0;
      if (std::abs(g - target) > tol.residual) return false;
    }
  }
  for (int i = 0; i < k; ++i) {
    if (!contains(a, a.basis[i].adjoint(), tol)) return false;
    for (int j = 0; j < k; ++j)
      if (!contains(a, a.basis[i] * a.basis[j], tol)) return false;
  }
  for (const Matrix& b : a.basis) {
    if ((a.unit * b - b).norm() > tol.residual * std::max(1.0, b.norm())) return false;
    if ((b * a.unit - b).norm() > tol.residual * std::max(1.0, b.norm())) return false;
  }
  return true;
}

}  // namespace kid
