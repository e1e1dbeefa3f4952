#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "kidecomp/errors.hpp"

namespace kid {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Relative cutoffs and residual thresholds used across the toolkit.
// rank_cut decides numerical rank, residual gates verification checks,
// cluster_gap separates eigenvalue clusters.
struct Tolerance {
  double rank_cut = 1e-9;
  double residual = 1e-8;
  double cluster_gap = 1e-6;

  Tolerance() = default;
  Tolerance(double rank_cut_, double residual_, double cluster_gap_)
      : rank_cut(rank_cut_), residual(residual_), cluster_gap(cluster_gap_) {
    validate();
  }
  void validate() const {
    require(rank_cut > 0.0 && rank_cut < 1.0, ErrorKind::InvalidInput,
            "rank_cut must lie in (0,1)");
    require(residual > 0.0, ErrorKind::InvalidInput, "residual must be positive");
    require(cluster_gap > 0.0, ErrorKind::InvalidInput, "cluster_gap must be positive");
  }
};

struct Projection {
  Matrix matrix;
  int rank = 0;
};

struct EighResult {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // unitary, columns match eigenvalues
};

double frobenius(const Matrix& a);
double trace_norm(const Matrix& a);  // sum of singular values
Complex hs_inner(const Matrix& a, const Matrix& b);  // trace(a† b)
bool is_hermitian(const Matrix& a, double residual);
void require_finite(const Matrix& a, const char* what);

Matrix identity(int d);

// Hermitian eigendecomposition. Throws NotHermitian / ConvergenceFailure.
EighResult eigh(const Matrix& h, const Tolerance& tol = {});

// f applied on the spectrum. With support_only, eigenvalues at or below
// rank_cut * lambda_max map to zero instead of through f.
Matrix spectral_apply(const Matrix& h, const std::function<Complex(double)>& f,
                      bool support_only, const Tolerance& tol = {});

Matrix kron(const Matrix& a, const Matrix& b);

enum class TraceSide { A, B };

// Partial trace of a matrix on C^dA (x) C^dB over the given factor.
Matrix partial_trace(const Matrix& m, int dim_a, int dim_b, TraceSide side);

// Spectral projection onto the range of a PSD matrix. Eigenvalues near the
// rank cutoff (within a factor 10 on either side) raise AmbiguousRank.
Projection support_projection(const Matrix& s, const Tolerance& tol = {});

}  // namespace kid
