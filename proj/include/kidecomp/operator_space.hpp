#pragma once

#include <vector>

#include "kidecomp/linalg.hpp"

namespace kid {

// A subspace of d x d matrices, carried as a Hilbert-Schmidt-orthonormal
// basis: <X,Y> = trace(X† Y).
struct OperatorSubspace {
  int ambient_dim = 0;
  std::vector<Matrix> basis;

  int dimension() const { return static_cast<int>(basis.size()); }
};

// A *-subalgebra: additionally closed under product and adjoint, with its
// unit (a projection acting as identity on every element).
struct OperatorAlgebra : OperatorSubspace {
  Matrix unit;
};

// Column k of the result is the column-major flattening of mats[k].
Matrix pack_basis(const std::vector<Matrix>& mats, int d);
Matrix unpack_column(const Matrix& packed, int col, int d);

OperatorSubspace orthonormalize_span(const std::vector<Matrix>& mats, const Tolerance& tol = {});

// Smallest subspace containing the seed and closed under adjoint, products,
// and X -> [H, X] for each derivation H. Passes run adjoint, then pairwise
// products, then brackets, re-orthonormalizing incrementally; the loop stops
// once a full round adds nothing.
OperatorAlgebra close_algebra(const OperatorSubspace& seed,
                              const std::vector<Matrix>& derivations,
                              const Tolerance& tol = {});

// { X : Xb = bX for every basis element b }, with unit 1_d.
OperatorAlgebra commutant(const OperatorSubspace& s, const Tolerance& tol = {});

OperatorAlgebra center(const OperatorAlgebra& a, const Tolerance& tol = {});

bool contains(const OperatorSubspace& s, const Matrix& x, const Tolerance& tol = {});

// Every element of inner lies in the span of outer (within tolerance).
bool subspace_contained(const OperatorSubspace& inner, const OperatorSubspace& outer,
                        const Tolerance& tol = {});

// Intersection via eigen-analysis of the composed subspace projectors.
OperatorSubspace intersect(const OperatorSubspace& s1, const OperatorSubspace& s2,
                           const Tolerance& tol = {});

// Checks orthonormality, adjoint/product closure and the unit action of an
// algebra; used by tests and by pipeline assertions.
bool algebra_closed(const OperatorAlgebra& a, const Tolerance& tol = {});

}  // namespace kid
