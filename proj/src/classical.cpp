#include "kidecomp/classical.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace kid {

namespace {

// P_i pushed back to the source space through the support isometry.
std::vector<Matrix> source_projections(const KIDecomposition& k) {
  const Matrix& v = k.support_isometry;
  std::vector<Matrix> out;
  out.reserve(k.blocks.size());
  for (const Block& blk : k.blocks) {
    Matrix p = v * blk.projection.matrix * v.adjoint();
    out.push_back(((p + p.adjoint()) / 2.0).eval());
  }
  return out;
}

Matrix support_complement(const KIDecomposition& k) {
  const Matrix& v = k.support_isometry;
  return identity(k.source_dim) - v * v.adjoint();
}

}  // namespace

ClassicalExperiment classical_part(const KIDecomposition& k) {
  ClassicalExperiment out;
  for (std::size_t i = 0; i < k.blocks.size(); ++i)
    out.index_labels.push_back(static_cast<int>(i));
  for (std::size_t t = 0; t < k.labels.size(); ++t) {
    std::vector<double> dist;
    dist.reserve(k.blocks.size());
    for (const Block& blk : k.blocks) dist.push_back(blk.q[t]);
    out.distributions[k.labels[t]] = std::move(dist);
  }
  return out;
}

bool is_broadcastable(const KIDecomposition& k) {
  for (const Block& blk : k.blocks)
    if (blk.n != 1) return false;
  return true;
}

Superoperator broadcast_channel(const KIDecomposition& k) {
  for (const Block& blk : k.blocks)
    if (blk.n != 1)
      fail(ErrorKind::NotClassical,
           "block with H-side dimension " + std::to_string(blk.n) + " admits no witness");

  const int d = k.source_dim;
  const int ds = k.support_dim();
  std::vector<Matrix> projs = source_projections(k);

  // Embedded block states (n = 1, so the block content is just sigma).
  std::vector<Matrix> block_states;
  for (const Block& blk : k.blocks) {
    Matrix inner = blk.unitary.adjoint() * blk.sigma * blk.unitary;  // on the support space
    Matrix s = k.support_isometry * inner * k.support_isometry.adjoint();
    block_states.push_back(((s + s.adjoint()) / 2.0).eval());
  }

  // Kraus operators of rho -> sum_i trace(P_i rho) w_i with w_i = s_i (x) s_i:
  // sqrt(lambda) |u> <p| over the spectral pairs of w_i and an orthonormal
  // basis of range(P_i). The support complement is routed to the first block
  // state so the witness is trace-preserving on the whole source space.
  std::vector<Matrix> kraus;
  Tolerance spec_tol;
  auto add_target = [&](const Matrix& weight_state, const Matrix& proj) {
    EighResult ew = eigh(weight_state);
    EighResult ep = eigh(proj);
    for (int a = 0; a < ep.eigenvalues.size(); ++a) {
      if (ep.eigenvalues[a] < 0.5) continue;
      for (int mu = 0; mu < ew.eigenvalues.size(); ++mu) {
        const double lam = ew.eigenvalues[mu];
        if (lam <= spec_tol.rank_cut) continue;
        Matrix kop = std::sqrt(lam) * ew.eigenvectors.col(mu) * ep.eigenvectors.col(a).adjoint();
        kraus.push_back(std::move(kop));
      }
    }
  };
  for (std::size_t i = 0; i < k.blocks.size(); ++i)
    add_target(kron(block_states[i], block_states[i]), projs[i]);
  if (ds < d)
    add_target(kron(block_states[0], block_states[0]), support_complement(k));
  return Superoperator::from_kraus(std::move(kraus));
}

ExtractionInstrument extraction_instrument(const KIDecomposition& k) {
  ExtractionInstrument out;
  std::vector<Matrix> projs = source_projections(k);
  if (k.support_dim() < k.source_dim) projs.push_back(support_complement(k));
  out.pinching = pinching_channel(projs);
  // Outcome statistics ride on the same data as the classical part.
  out.outcome_map = classical_part(k).distributions;
  return out;
}

}  // namespace kid
