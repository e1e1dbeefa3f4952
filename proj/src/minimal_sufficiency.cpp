#include "kidecomp/minimal_sufficiency.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace kid {

CocycleGenerators cocycle_generators(const StatisticalExperiment& e,
                                     const std::vector<double>& weights,
                                     const Tolerance& tol) {
  CocycleGenerators out;
  out.reference = average_state(e, weights);
  EighResult es = eigh(out.reference, tol);
  const double lam_max = es.eigenvalues.maxCoeff();
  if (es.eigenvalues.minCoeff() <= tol.rank_cut * lam_max)
    fail(ErrorKind::NotFaithful, "reference state has a kernel direction; restrict first");
  out.modular_generator =
      spectral_apply(out.reference, [](double x) { return Complex(std::log(x), 0.0); },
                     false, tol);
  Matrix inv_sqrt = spectral_apply(
      out.reference, [](double x) { return Complex(1.0 / std::sqrt(x), 0.0); }, false, tol);
  out.generators.reserve(e.states.size());
  for (const Matrix& rho : e.states) {
    Matrix d = inv_sqrt * rho * inv_sqrt;
    d = (d + d.adjoint()) / 2.0;
    out.generators.push_back(std::move(d));
  }
  return out;
}

OperatorAlgebra minimal_sufficient_algebra(const StatisticalExperiment& e,
                                           const std::vector<double>& weights,
                                           const Tolerance& tol) {
  CocycleGenerators gen = cocycle_generators(e, weights, tol);
  std::vector<Matrix> seed_mats;
  seed_mats.push_back(identity(e.dim));
  for (const Matrix& d : gen.generators) seed_mats.push_back(d);
  OperatorSubspace seed = orthonormalize_span(seed_mats, tol);
  return close_algebra(seed, {gen.modular_generator}, tol);
}

OperatorAlgebra minimal_sufficient_algebra(const StatisticalExperiment& e,
                                           const Tolerance& tol) {
  return minimal_sufficient_algebra(e, e.effective_weights(), tol);
}

Superoperator conditional_expectation(const OperatorAlgebra& m0, const Matrix& reference,
                                      const Tolerance& tol) {
  const int d = m0.ambient_dim;
  require(reference.rows() == d && reference.cols() == d, ErrorKind::ShapeMismatch,
          "reference state dimension mismatch");
  const int k = m0.dimension();
  require(k > 0, ErrorKind::InvalidInput, "empty subalgebra");

  // Normal equations of the weighted projection: G x = c with
  // G_ab = trace(ref b_a† b_b) and c_a = trace(ref b_a† A).
  Matrix gram(k, k);
  std::vector<Matrix> weighted;  // vec(b_a ref): trace(ref b_a† A) = <b_a ref, A>
  weighted.reserve(k);
  for (int a = 0; a < k; ++a) weighted.push_back(m0.basis[a] * reference);
  Matrix wpacked = pack_basis(weighted, d);
  Matrix bpacked = pack_basis(m0.basis, d);
  gram = wpacked.adjoint() * bpacked;
  gram = (gram + gram.adjoint()) / 2.0;
  Eigen::LDLT<Matrix> solver(gram);
  require(solver.info() == Eigen::Success, ErrorKind::ConvergenceFailure,
          "Gram factorization failed");

  Superoperator e = Superoperator::from_heisenberg_action(d, d, [&](const Matrix& x) {
    Vector coeff = solver.solve(
        wpacked.adjoint() *
        Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(d) * d));
    Vector img = bpacked * coeff;
    return Matrix(Eigen::Map<const Matrix>(img.data(), d, d));
  });

  // The projection is a conditional expectation only on modular-invariant
  // subalgebras; these checks turn an upstream closure bug into a loud error.
  const Matrix one = identity(d);
  if ((apply(e, one, Picture::Heisenberg) - one).norm() > 10.0 * tol.residual)
    fail(ErrorKind::NotInvariant, "projection is not unital");
  Superoperator ee = compose(e, e);
  if ((ee.choi - e.choi).norm() > 10.0 * tol.residual * std::max(1.0, e.choi.norm()))
    fail(ErrorKind::NotInvariant, "projection is not idempotent");
  Matrix sym = (e.choi + e.choi.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure,
          "eigensolver failed on expectation Choi matrix");
  const double lam_max = std::max(es.eigenvalues().maxCoeff(), 0.0);
  if ((e.choi - sym).norm() > 10.0 * tol.residual * std::max(1.0, lam_max) ||
      es.eigenvalues().minCoeff() < -10.0 * tol.residual * std::max(1.0, lam_max))
    fail(ErrorKind::NotInvariant, "projection is not completely positive");
  return e;
}

bool is_minimal_sufficient(const StatisticalExperiment& e, const Tolerance& tol) {
  RestrictedExperiment r = restrict_to_joint_support(e, tol);
  if (r.experiment.dim != e.dim) return false;
  OperatorAlgebra m0 =
      minimal_sufficient_algebra(r.experiment, r.experiment.effective_weights(), tol);
  return m0.dimension() == e.dim * e.dim;
}

}  // namespace kid
