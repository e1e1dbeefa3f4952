#include "kidecomp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "kidecomp/minimal_sufficiency.hpp"
#include "kidecomp/rng.hpp"

namespace kid {

std::vector<double> StatisticalExperiment::effective_weights() const {
  if (weights) return *weights;
  const int k = num_labels();
  return std::vector<double>(k, k > 0 ? 1.0 / k : 0.0);
}

ValidationReport validate(const StatisticalExperiment& e, const Tolerance& tol) {
  ValidationReport rep;
  if (e.labels.empty()) rep.violations.push_back("no labels");
  if (e.dim <= 0) rep.violations.push_back("nonpositive dimension");
  if (e.states.size() != e.labels.size())
    rep.violations.push_back("states/labels count mismatch");
  std::set<std::string> seen;
  for (const auto& l : e.labels)
    if (!seen.insert(l).second) rep.violations.push_back("duplicate label '" + l + "'");
  if (e.weights) {
    if (static_cast<int>(e.weights->size()) != e.num_labels())
      rep.violations.push_back("weights length mismatch");
    double sum = 0.0;
    for (double w : *e.weights) {
      if (!(w > 0.0)) rep.violations.push_back("weight not strictly positive");
      sum += w;
    }
    if (std::abs(sum - 1.0) > tol.residual)
      rep.violations.push_back("weights do not sum to 1");
  }
  const std::size_t n = std::min(e.states.size(), e.labels.size());
  for (std::size_t t = 0; t < n; ++t) {
    const Matrix& rho = e.states[t];
    const std::string& label = e.labels[t];
    if (rho.rows() != e.dim || rho.cols() != e.dim) {
      rep.violations.push_back("state '" + label + "' dimension mismatch");
      continue;
    }
    if (!rho.allFinite()) {
      rep.violations.push_back("state '" + label + "' has non-finite entries");
      continue;
    }
    if (!is_hermitian(rho, tol.residual)) {
      rep.violations.push_back("state '" + label + "' not Hermitian");
      continue;
    }
    EighResult es = eigh(rho, tol);
    if (es.eigenvalues.minCoeff() < -tol.residual)
      rep.violations.push_back("state '" + label + "' has a negative eigenvalue");
    if (std::abs(rho.trace().real() - 1.0) > tol.residual ||
        std::abs(rho.trace().imag()) > tol.residual)
      rep.violations.push_back("state '" + label + "' trace deviates from 1");
  }
  return rep;
}

Matrix average_state(const StatisticalExperiment& e, const std::vector<double>& weights) {
  require(static_cast<int>(weights.size()) == e.num_labels(), ErrorKind::ShapeMismatch,
          "weights length mismatch");
  Matrix avg = Matrix::Zero(e.dim, e.dim);
  for (int t = 0; t < e.num_labels(); ++t) avg += weights[t] * e.states[t];
  return avg;
}

Matrix average_state(const StatisticalExperiment& e) {
  return average_state(e, e.effective_weights());
}

RestrictedExperiment restrict_to_joint_support(const StatisticalExperiment& e,
                                               const Tolerance& tol) {
  Matrix avg = average_state(e);
  EighResult es = eigh(avg, tol);
  const double lam_max = es.eigenvalues.maxCoeff();
  require(es.eigenvalues.minCoeff() >= -tol.residual * std::max(lam_max, 1.0),
          ErrorKind::NotPSD, "average state is not PSD");
  const double cut = tol.rank_cut * lam_max;
  std::vector<int> kept;
  for (int k = 0; k < e.dim; ++k) {
    const double lam = es.eigenvalues[k];
    if (lam > cut / 10.0 && lam < cut * 10.0)
      fail(ErrorKind::AmbiguousRank, "joint support rank decision ambiguous");
    if (lam > cut) kept.push_back(k);
  }
  Matrix v(e.dim, kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) v.col(j) = es.eigenvectors.col(kept[j]);

  RestrictedExperiment out;
  out.isometry = v;
  out.experiment.dim = static_cast<int>(kept.size());
  out.experiment.labels = e.labels;
  out.experiment.weights = e.weights;
  out.experiment.states.reserve(e.states.size());
  for (const Matrix& rho : e.states) {
    Matrix r = v.adjoint() * rho * v;
    r = (r + r.adjoint()) / 2.0;
    out.experiment.states.push_back(std::move(r));
  }
  return out;
}

namespace {

// Block families must generate the full matrix algebra on their n-side;
// otherwise the planted block would split further.
bool block_family_irreducible(const std::vector<Matrix>& rhos, int n,
                              const Tolerance& tol) {
  if (n == 1) return true;
  StatisticalExperiment block;
  block.dim = n;
  for (std::size_t t = 0; t < rhos.size(); ++t) {
    block.labels.push_back("t" + std::to_string(t));
    block.states.push_back(rhos[t]);
  }
  try {
    RestrictedExperiment r = restrict_to_joint_support(block, tol);
    if (r.experiment.dim != n) return false;
    OperatorAlgebra m0 =
        minimal_sufficient_algebra(r.experiment, r.experiment.effective_weights(), tol);
    return m0.dimension() == n * n;
  } catch (const Error&) {
    return false;
  }
}

// Two planted blocks with the same n-side dimension merge whenever their
// label-weight ratios are constant (and the n-side families match); reject
// on constant ratios alone.
bool q_ratios_constant(const std::vector<std::vector<double>>& q, int i, int j) {
  const double r0 = q[0][i] / q[0][j];
  for (std::size_t t = 1; t < q.size(); ++t) {
    const double r = q[t][i] / q[t][j];
    if (std::abs(r - r0) > 1e-3 * std::max(1.0, std::abs(r0))) return false;
  }
  return true;
}

}  // namespace

PlantedInstance gen_planted(const std::vector<std::pair<int, int>>& block_dims,
                            int num_labels, std::uint64_t seed, const Tolerance& tol) {
  require(!block_dims.empty(), ErrorKind::InvalidInput, "at least one block required");
  require(num_labels >= 2, ErrorKind::InvalidInput, "at least two labels required");
  int d = 0;
  for (const auto& [n, m] : block_dims) {
    require(n >= 1 && m >= 1, ErrorKind::InvalidInput, "block dims must be positive");
    d += n * m;
  }
  require(d <= 64, ErrorKind::InvalidInput, "total dimension exceeds 64");

  const int nblocks = static_cast<int>(block_dims.size());
  Rng rng(seed);

  for (int attempt = 0; attempt < 100; ++attempt) {
    PlantedGroundTruth truth;
    truth.block_dims = block_dims;
    truth.planted_unitary = rng.haar_unitary(d);
    truth.planted_sigmas.clear();
    for (const auto& [n, m] : block_dims) {
      (void)n;
      truth.planted_sigmas.push_back(rng.ginibre_density(m));
    }
    truth.planted_q.assign(num_labels, {});
    truth.planted_rho.assign(num_labels, {});
    for (int t = 0; t < num_labels; ++t) {
      truth.planted_q[t] = rng.prob_vector(nblocks);
      for (const auto& [n, m] : block_dims) {
        (void)m;
        truth.planted_rho[t].push_back(rng.ginibre_density(n));
      }
    }

    // Irreducibility within blocks.
    bool ok = true;
    for (int i = 0; i < nblocks && ok; ++i) {
      std::vector<Matrix> fam;
      for (int t = 0; t < num_labels; ++t) fam.push_back(truth.planted_rho[t][i]);
      ok = block_family_irreducible(fam, block_dims[i].first, tol);
    }
    // No pair of blocks with equal n-side dimension and constant weight ratio.
    for (int i = 0; i < nblocks && ok; ++i)
      for (int j = i + 1; j < nblocks && ok; ++j)
        if (block_dims[i].first == block_dims[j].first &&
            q_ratios_constant(truth.planted_q, i, j))
          ok = false;
    if (!ok) continue;

    StatisticalExperiment e;
    e.dim = d;
    for (int t = 0; t < num_labels; ++t) {
      e.labels.push_back("theta" + std::to_string(t));
      Matrix direct = Matrix::Zero(d, d);
      int off = 0;
      for (int i = 0; i < nblocks; ++i) {
        const auto& [n, m] = block_dims[i];
        direct.block(off, off, n * m, n * m) =
            truth.planted_q[t][i] * kron(truth.planted_rho[t][i], truth.planted_sigmas[i]);
        off += n * m;
      }
      Matrix rho = truth.planted_unitary * direct * truth.planted_unitary.adjoint();
      rho = (rho + rho.adjoint()) / 2.0;
      e.states.push_back(std::move(rho));
    }
    return {std::move(e), std::move(truth)};
  }
  fail(ErrorKind::RetriesExhausted,
       "could not sample an irreducible planted instance in 100 attempts");
}

}  // namespace kid
