#pragma once

#include <functional>
#include <vector>

#include "kidecomp/experiment.hpp"
#include "kidecomp/linalg.hpp"

namespace kid {

enum class Picture { Heisenberg, Schrodinger };

// A linear map on matrices, stored through the Choi matrix of its
// Heisenberg-picture form L: M_in -> M_out,
//   choi = sum_ij E_ij (x) L(E_ij),
// with E_ij the matrix units of the input algebra. The Schrodinger action
// is the trace dual: trace(L*(rho) X) = trace(rho L(X)). Kraus operators,
// when present, are those of the Schrodinger map: L*(rho) = sum_k K rho K†
// with K of shape in_dim x out_dim.
struct Superoperator {
  int in_dim = 0;
  int out_dim = 0;
  Matrix choi;
  std::vector<Matrix> kraus;  // optional

  static Superoperator from_choi(int in_dim, int out_dim, Matrix choi);
  static Superoperator from_kraus(std::vector<Matrix> kraus);
  static Superoperator from_heisenberg_action(
      int in_dim, int out_dim, const std::function<Matrix(const Matrix&)>& action);
  static Superoperator identity_channel(int d);
};

Matrix apply(const Superoperator& lam, const Matrix& x, Picture picture);

// Heisenberg composition: (outer ∘ inner)(X) = outer(inner(X)).
Superoperator compose(const Superoperator& outer, const Superoperator& inner);

// Pinching along a projection family (Kraus = the projections themselves).
Superoperator pinching_channel(const std::vector<Matrix>& projections);

// Properties of the Schrodinger-picture channel: complete positivity,
// trace preservation, and unit preservation.
struct ChannelReport {
  bool cp = false;
  bool tp = false;
  bool unital = false;
};

ChannelReport is_cptp_unital(const Superoperator& lam, const Tolerance& tol = {});

// PSD test of [[L(A†A), L(A†)], [L(A), 1]]; certifies the Schwarz property
// pointwise at the probe A.
bool schwarz_block_check(const Superoperator& lam, const Matrix& a, const Tolerance& tol = {});

bool multiplicative_domain_member(const Superoperator& lam, const Matrix& a,
                                  const Tolerance& tol = {});

// max over labels of the trace-norm disturbance of the Schrodinger action.
bool preserves_experiment(const Superoperator& lam, const StatisticalExperiment& e,
                          const Tolerance& tol = {});

}  // namespace kid
