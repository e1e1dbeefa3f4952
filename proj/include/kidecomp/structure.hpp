#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kidecomp/channels.hpp"
#include "kidecomp/experiment.hpp"
#include "kidecomp/minimal_sufficiency.hpp"
#include "kidecomp/operator_space.hpp"

namespace kid {

// One summand of the block decomposition H = ⊕_i H_i (x) K_i on the joint
// support. The unitary maps range(P_i) coordinates to C^n (x) C^m; sigma is
// the label-independent K-side state, q and rho_theta the per-label weight
// and H-side state.
struct Block {
  Projection projection;           // P_i on the support space
  int n = 0;                       // H-side dimension
  int m = 0;                       // K-side dimension
  Matrix unitary;                  // (n*m) x d', U P_i x = coordinates in C^n (x) C^m
  Matrix sigma;                    // m x m density matrix, faithful
  std::vector<double> q;           // per label, trace(rho_theta P_i)
  std::vector<Matrix> rho_theta;   // per label, n x n density matrix
  std::vector<bool> q_zero;        // per label: weight below tolerance, rho is a placeholder
};

struct KIDecomposition {
  Matrix support_isometry;  // source_dim x d'
  int source_dim = 0;
  std::vector<std::string> labels;
  std::vector<Block> blocks;

  int support_dim() const { return static_cast<int>(support_isometry.cols()); }
  std::vector<std::pair<int, int>> block_dims() const;
};

// Pairwise-orthogonal minimal projections of the center summing to the unit,
// found by eigenvalue clustering of a generic Hermitian central element.
std::vector<Projection> minimal_central_projections(const OperatorAlgebra& a,
                                                    const Tolerance& tol, std::uint64_t seed);

struct BlockFactorization {
  int n = 0;
  int m = 0;
  Matrix unitary;                   // (n*m) x d, isometry from range(P)
  std::vector<Matrix> matrix_units; // e_kl in the ambient space, n*n of them
};

// Matrix-units factorization of the compression of a *-algebra by a minimal
// central projection: P A P ≅ M_n (x) 1_m.
BlockFactorization factorize_block(const OperatorAlgebra& a, const Projection& p,
                                   const Tolerance& tol, std::uint64_t seed);

// Full pipeline: support restriction, minimal sufficient subalgebra, central
// projections, per-block factorization, state data extraction, canonical
// ordering, reconstruction check.
KIDecomposition ki_decomposition(const StatisticalExperiment& e, const Tolerance& tol,
                                 std::uint64_t seed);

// The conditional expectation assembled blockwise:
// A -> ⊕_i tr_{K_i}(P_i A P_i (1 (x) sigma_i)) (x) 1_{K_i},
// returned on the support space.
Superoperator explicit_conditional_expectation(const KIDecomposition& k);

struct KIVerifyItem {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct KIVerifyReport {
  std::vector<KIVerifyItem> items;
  bool pass() const {
    for (const auto& it : items)
      if (!it.pass) return false;
    return true;
  }
};

// Report-only contract check of a decomposition against its experiment:
// reconstruction residuals, projection family, sigma faithfulness, agreement
// of the two expectation constructions, and state preservation on probes.
KIVerifyReport verify_ki(const StatisticalExperiment& e, const KIDecomposition& k,
                         const Tolerance& tol = {});

// Reconstruction residual per label (Frobenius norm against the block form).
std::vector<double> reconstruction_residuals(const StatisticalExperiment& e,
                                             const KIDecomposition& k);

}  // namespace kid
