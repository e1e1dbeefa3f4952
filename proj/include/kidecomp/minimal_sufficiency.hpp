#pragma once

#include <vector>

#include "kidecomp/channels.hpp"
#include "kidecomp/experiment.hpp"
#include "kidecomp/operator_space.hpp"

namespace kid {

// Generating data for the minimal sufficient subalgebra of a faithful family:
// the weighted average as reference state, its logarithm as modular
// generator, and one symmetrized density ratio per label.
struct CocycleGenerators {
  Matrix reference;            // weighted average, faithful
  Matrix modular_generator;    // log of the reference
  std::vector<Matrix> generators;  // D_t = ref^{-1/2} rho_t ref^{-1/2}
};

CocycleGenerators cocycle_generators(const StatisticalExperiment& e,
                                     const std::vector<double>& weights,
                                     const Tolerance& tol = {});

// Closure of {1} and the density ratios under products, adjoints and the
// modular bracket. The defining contract: the reference-preserving
// conditional expectation onto the result fixes every state of the family,
// and the result sits inside any subalgebra with that property.
OperatorAlgebra minimal_sufficient_algebra(const StatisticalExperiment& e,
                                           const std::vector<double>& weights,
                                           const Tolerance& tol = {});
OperatorAlgebra minimal_sufficient_algebra(const StatisticalExperiment& e,
                                           const Tolerance& tol = {});

// Orthogonal projection onto span(m0) for the inner product
// <X,Y> = trace(ref X† Y). For a modular-invariant subalgebra this is the
// unique state-preserving conditional expectation; idempotence, unitality
// and complete positivity are asserted and raise NotInvariant on breach.
Superoperator conditional_expectation(const OperatorAlgebra& m0, const Matrix& reference,
                                      const Tolerance& tol = {});

// True iff the family is faithful on its ambient space and its minimal
// sufficient subalgebra is everything.
bool is_minimal_sufficient(const StatisticalExperiment& e, const Tolerance& tol = {});

}  // namespace kid
