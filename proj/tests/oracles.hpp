// Test-only helpers kept independent of the library code paths they check:
// spans are ranked by plain SVD and algebra closures are brute-forced by
// re-spanning whole word lists each round.
#pragma once

#include <vector>

#include <Eigen/SVD>

#include "kidecomp/linalg.hpp"

namespace oracle {

using kid::Complex;
using kid::Matrix;

inline int span_rank(const std::vector<Matrix>& mats, double rel_cut = 1e-9) {
  if (mats.empty()) return 0;
  const auto d = mats.front().rows();
  Eigen::MatrixXcd packed(d * d, static_cast<Eigen::Index>(mats.size()));
  for (std::size_t k = 0; k < mats.size(); ++k)
    packed.col(static_cast<Eigen::Index>(k)) =
        Eigen::Map<const Eigen::VectorXcd>(mats[k].data(), d * d);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(packed);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > rel_cut * sv[0]) ++rank;
  return rank;
}

// Dimension of the *-algebra generated by the seeds (and brackets with the
// derivations), found by accumulating words until the rank stops growing.
inline int closure_dimension(std::vector<Matrix> words,
                             const std::vector<Matrix>& derivations = {}) {
  int rank = span_rank(words);
  for (int round = 0; round < 64; ++round) {
    std::vector<Matrix> next = words;
    for (const Matrix& a : words) next.push_back(a.adjoint());
    for (const Matrix& a : words)
      for (const Matrix& b : words) next.push_back(a * b);
    for (const Matrix& h : derivations)
      for (const Matrix& a : words) next.push_back(h * a - a * h);
    const int next_rank = span_rank(next);
    words = std::move(next);
    if (next_rank == rank) return rank;
    rank = next_rank;
  }
  return rank;
}

}  // namespace oracle
